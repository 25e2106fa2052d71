#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sie/core.hpp"
#include "sie/se_strength.hpp"
#include "sie/spectra.hpp"

namespace sie {

struct LocalTerm {
  std::vector<int> support;  // sorted
  Mat matrix;                // on the composite space of `support`, support order
  double norm = 0.0;         // operator norm, cached

  LocalTerm() = default;
  LocalTerm(std::vector<int> support, Mat matrix);
};

struct ChainHamiltonian {
  int n = 0;
  int d = 2;
  int k = 2;  // locality
  std::vector<LocalTerm> terms;
  double g = 0.0;  // max_i sum_{Z contains i} ||h_Z||
  // Decay description: power law J0 r^{-eta}, or finite range (range > 0).
  double J0 = 0.0;
  double eta = 0.0;
  int range = 0;

  std::vector<int> dims() const { return std::vector<int>(n, d); }
  /// Recomputes g and checks the pair-decay bound; throws on violation.
  void check_invariants() const;
  double computed_g() const;
  /// max over pairs (i, i') at distance r of sum_{Z contains both} ||h_Z||.
  double pair_strength(int r) const;

  Mat dense(std::size_t cap = std::size_t{1} << 13) const;
  /// out = H in (term by term, no dense matrix).
  Vec apply(const Vec& in) const;
};

struct IsingFields {
  double hx = 0.0;
  double hz = 0.0;
};

/// J0 |i-j|^{-eta} Z_i Z_j plus fields hx X_i + hz Z_i. For d > 2, Z and X are
/// the Hermitian parts of the clock and shift matrices, (C + C^dag)/2 and
/// (S + S^dag)/2, both of unit norm. max_range > 0 drops couplings beyond it.
ChainHamiltonian build_long_range_ising(int n, double J0, double eta, IsingFields fields = {}, int d = 2,
                                        int max_range = 0);

/// Site operators used by the builder.
Mat site_z(int d);
Mat site_x(int d);

struct CutHamiltonian {
  int s = 0;  // sites [0, s) form A
  int n = 0;
  int d = 2;
  std::vector<LocalTerm> H_A, H_B, V;
  double boundary_norm_sum = 0.0;

  /// Dense V_AB with a unit-norm term decomposition (operator-Schmidt form of
  /// each boundary term).
  BipartiteOperator V_AB(std::size_t cap = std::size_t{1} << 12) const;
};

CutHamiltonian split_at_cut(const ChainHamiltonian& H, int s);

// ---- extremal constructions ----------------------------------------------

/// Saturating dynamics: V = sum_{j=1}^M J (|jj><00| + h.c.) on a fresh pair,
/// pulse t/n, then swap the pair out; repeated n times.
struct SaturationDynamics {
  int M = 1;
  double J = 1.0;
  int n_pairs = 1;

  struct Stage {
    std::string kind;  // "pulse" or "swap"
    double duration = 0.0;
    int pair = 0;
  };
  std::vector<Stage> stages(double t) const;

  /// Schmidt coefficients of one pair after a pulse of length x.
  std::vector<double> pair_coeffs(double x) const;
  /// Amplitudes on |00>, |jj> of one pair after a pulse of length x.
  Vec pair_state(double x) const;
  double renyi(double alpha, double t) const;  // n * E_alpha(pair(t/n))
  double half_entropy_closed(double t) const;  // 2n log(cos z + sqrt(M) sin z)
  double rate_lower_bound(double t) const;     // 2MJ - 2t(MJ)^2/n
  double validity_time() const;                // n sqrt(M) / (2MJ)
  BipartiteOperator V() const;                 // with analytic SE value MJ
  /// Exact staged simulation on (M+1)^{2(n+1)} amplitudes (small cases only).
  PureState simulate_dense(double t) const;
};
SaturationDynamics build_saturation_dynamics(int M, double J, int n_pairs);

struct UnboundedDynamics {
  int D0 = 1;
  double J = 1.0;
  double t = 0.0;
  std::vector<double> spectrum() const;  // cos^{D0} x, cos^{s-1} x sin x; x = Jt/D0
  double renyi(double alpha) const;
  double lower_bound(double alpha) const;
  /// Exact simulation on A1 A0 B0 B1 with dims (D0+1, 3, 3, D0+1); the fast
  /// pulses are applied as their exact unitaries.
  PureState simulate_dense() const;
};
UnboundedDynamics build_unbounded_dynamics(int D0, double J, double t);

struct ToyTwoQubit {
  Mat H;  // |00><11| + h.c.
  Vec state(double t) const;              // cos t |00> - i sin t |11>
  double rate(double alpha, double t) const;
  BipartiteOperator V() const;
};
ToyTwoQubit build_toy_two_qubit();

/// sum_{s=1}^N |s><s| (x) |s><s| on N x N, SE strength 1.
BipartiteOperator build_ising_projector_interaction(int N);

// ---- serialization ---------------------------------------------------------

nlohmann::json to_json(const ChainHamiltonian& H);
ChainHamiltonian chain_from_json(const nlohmann::json& j);

}  // namespace sie
