#pragma once

#include <optional>
#include <vector>

#include "sie/core.hpp"

namespace sie {

/// Dense amplitude vector over a qudit chain. May be unnormalized.
class PureState {
 public:
  PureState() = default;
  PureState(std::vector<int> dims, Vec amps);

  /// |0...0> on the given sites.
  static PureState basis(std::vector<int> dims, std::size_t index = 0);
  /// Tensor product of per-site vectors, site 0 first.
  static PureState product(const std::vector<Vec>& sites);

  const std::vector<int>& dims() const { return dims_; }
  const Vec& amps() const { return amps_; }
  int sites() const { return static_cast<int>(dims_.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

  double norm_sq() const { return norm_sq_; }
  double norm() const;
  PureState normalized() const;

 private:
  std::vector<int> dims_;
  Vec amps_;
  double norm_sq_ = 0.0;
};

/// Bipartition of sites into A (left) and B (right). A need not be contiguous.
struct Cut {
  std::vector<int> left;
  std::vector<int> right;

  Cut() = default;
  Cut(std::vector<int> left_sites, int n_sites);
  /// Sites [0, s) versus [s, n).
  static Cut at(int s, int n_sites);
  void validate(int n_sites) const;
};

struct SchmidtSpectrum {
  std::vector<double> coeffs;   // descending, nonnegative
  std::optional<Mat> left;      // columns are left Schmidt vectors
  std::optional<Mat> right;     // columns are right Schmidt vectors
  double source_norm = 0.0;

  double sum() const;
  double sum_sq() const;
};

SchmidtSpectrum schmidt_decompose(const PureState& state, const Cut& cut, bool keep_vectors = false);
/// Schmidt spectrum of a state already reshaped as a (left x right) matrix.
SchmidtSpectrum schmidt_of_matrix(const Mat& amp_matrix, bool keep_vectors = false);

/// (1/(1-alpha)) log sum lambda^{2 alpha}; alpha = kInf for the min-entropy.
double renyi_entropy(const SchmidtSpectrum& spec, double alpha);
double renyi_entropy(const std::vector<double>& coeffs, double alpha);

struct Truncation {
  SchmidtSpectrum kept;
  double tail = 0.0;  // sqrt of the discarded squared weight
};
Truncation truncate_rank(const SchmidtSpectrum& spec, int D);

struct ExpansionTerm {
  cplx g;
  Vec a;  // unit vector on A
  Vec b;  // unit vector on B
};

struct OverlapSum {
  double lhs = 0.0;  // sum_s |<a_s, b_s | Psi>|
  double rhs = 0.0;  // sum_j |g_j|
};

/// Evaluates both sides of the overlap-sum inequality for Psi = sum_j g_j a_j (x) b_j.
/// Basis columns must be orthonormal; only min(#cols) pairs are used.
OverlapSum overlap_sum(const std::vector<ExpansionTerm>& terms, const Mat& basis_a, const Mat& basis_b);
bool overlap_sum_bound_check(const std::vector<ExpansionTerm>& terms, const Mat& basis_a, const Mat& basis_b);

/// lambda_{s0} <= (exp((1-alpha) E_alpha) / s0)^{1/(2 alpha)} for every s0.
bool schmidt_coeff_bound_check(const SchmidtSpectrum& spec, double alpha);

}  // namespace sie
