#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sie/core.hpp"

namespace sie {

struct OperatorTerm {
  cplx J;
  Mat A;  // unit operator norm on subsystem A
  Mat B;  // unit operator norm on subsystem B
};

/// Operator on A (x) B, row/column index a * dB + b.
struct BipartiteOperator {
  std::vector<int> dims_A;
  std::vector<int> dims_B;
  Mat matrix;
  std::optional<std::vector<OperatorTerm>> terms;
  std::optional<double> analytic_se;  // known exact SE strength, if any

  BipartiteOperator() = default;
  BipartiteOperator(std::vector<int> dA, std::vector<int> dB, Mat m);
  /// Builds the matrix from the decomposition and keeps the terms.
  static BipartiteOperator from_terms(std::vector<int> dA, std::vector<int> dB, std::vector<OperatorTerm> terms);

  Eigen::Index dimA() const;
  Eigen::Index dimB() const;
  void validate() const;
};

struct SeEstimate {
  double lower = 0.0;
  double upper = kInf;
  std::string method;
  // Witness product state: phi_A on A (x) A', phi_B on B (x) B' (row index
  // system-major), plus ancilla dims.
  Vec witness_A, witness_B;
  int ancilla_A = 1, ancilla_B = 1;
  std::vector<double> trace;  // objective per iteration for the best seed

  bool exact() const { return upper - lower <= 1e-6; }
};

struct SearchOptions {
  int ancilla_A = 0;  // 0 selects the default min(dim_A, dim_B)
  int ancilla_B = 0;
  int seeds = 16;
  int iterations = 500;
  double tol = 1e-8;
  std::uint64_t rng_seed = 0x5EED;
  bool warm_start = true;  // seed the ancilla search with the ancilla-free optimum
};

double se_upper_from_decomposition(const BipartiteOperator& op);
/// Sum of sigma_k ||A_k|| ||B_k|| over the operator-Schmidt decomposition.
double se_upper_operator_schmidt(const BipartiteOperator& op);
/// Tightest of: analytic value, decomposition sum, operator-Schmidt bound,
/// min(dA, dB) ||op||.
double se_upper_bound(const BipartiteOperator& op);

SeEstimate se_lower_search(const BipartiteOperator& op, const SearchOptions& opts = {});
/// Sum of Schmidt coefficients of op (phi_A (x) phi_B), the searched objective.
double se_objective(const BipartiteOperator& op, const Vec& phi_A, int anc_A, const Vec& phi_B, int anc_B);

double se_subadditive_combine(const std::vector<std::pair<double, double>>& weighted_uppers);

SeEstimate alpha_se_lower_search(const BipartiteOperator& op, double alpha, const SearchOptions& opts = {});

struct AlphaBound {
  double value = 0.0;
  bool near_divergence = false;  // denominator below 1e-6
};
AlphaBound alpha_se_bound_from_decay(double C0, double g_tilde, double kappa, double alpha);

double long_range_se_bound(double J0, double eta);

}  // namespace sie
