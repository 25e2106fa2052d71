#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sie/core.hpp"
#include "sie/models.hpp"

namespace sie {

// ---- Kolmogorov widths ---------------------------------------------------------

struct WidthBounds {
  double lower = 0.0;  // (1/2) min[2/(1+4 ln 9) log(eN/D)/D, 1]
  double upper = 0.0;  // 2 (log N / D)^{1/2}
};
WidthBounds kolmogorov_bounds(int N, int D);

struct FitOptions {
  int seeds = 32;
  int sweeps = 60;   // alternations between the two factors
  int lawson = 40;   // reweighting passes per Chebyshev row fit
  std::uint64_t rng_seed = 0xF17;
};

struct WidthResult {
  int N = 0, D = 0;
  double lower_bound = 0.0, upper_bound = 0.0;
  double numeric_estimate = 0.0;  // best max|I - W| found; an upper bound on the infimum
  RMat witness;
  std::string witness_kind;       // "all-half", "identity" or "search"
};

/// min over rank(W) <= D of max_{s,s'} |delta_{ss'} - W_{ss'}|, searched.
WidthResult rank_constrained_identity_fit(int N, int D, const FitOptions& opts = {});

/// Complex counterpart: best rank-D max-entry fit to an arbitrary target.
struct ComplexFit {
  double value = 0.0;
  Mat witness;
};
ComplexFit rank_constrained_fit(const Mat& target, int D, const std::vector<Mat>& candidates,
                                const FitOptions& opts = {});

double no_go_lower_bound(double t);  // 1 + 3t/2 - e^t

struct NoGoReport {
  int N = 0, D = 0;
  double t = 0.0;
  double lower = 0.0;        // no_go_lower_bound(t)
  double estimate = 0.0;     // searched inf ||exp(-iVt) - U_D|| (upper estimate of the infimum)
  double upper = 0.0;        // sin(t/2) rank-1 witness, 0 when D >= N
  double identity_fit = 0.0; // rank_constrained_identity_fit(N, D)
  double chain_value = 0.0;  // t * identity_fit - (e^t - 1 - t)
  double offdiag_leak = 0.0; // largest off-diagonal |entry| of the dense propagator
  int witness_rank = -1;     // operator-Schmidt rank of the witness (N <= 16)
};
NoGoReport no_go_experiment(int N, int D, double t, const FitOptions& opts = {});

void write_width_csv(std::ostream& out, const std::vector<WidthResult>& widths, const std::vector<NoGoReport>& nogo);

// ---- ordered-simplex moments -----------------------------------------------------

using Rational = boost::multiprecision::cpp_rational;

/// int_{0 < x_s < ... < x_1 < 1} prod_i x_i^{q_i} dx, exactly.
Rational simplex_moment(const std::vector<int>& q);
double simplex_moment_double(const std::vector<int>& q);

// ---- merge operator series -------------------------------------------------------

struct MergeTerm {
  int j = 1;      // position in the decomposition V = sum_j V_j (1-based)
  Mat V;          // dense on the full space
  std::vector<int> support;  // for tie-breaking; may be empty
};

struct MergeSeries {
  cplx z;
  int s0 = 0, M = 0, Q = 0;
  double kappa = 1.0, D0 = 1.0, C0 = 1.0;
  double Q_param = 0.0;  // commutator growth constant
  double g_tilde = 0.0;  // sum_j ||V_j||
  double Q0_inv = 0.0;   // min(1/(4Q), 1/(4 e C0 g))
  std::vector<Mat> bins;                   // V_{r_m}
  std::vector<std::vector<int>> bin_members;
  Mat series;     // Psi_{Q, M, s0}
  Mat exact;      // exp(-z H0) exp(z (H0 + V))
  double error = 0.0;        // ||exact - series||
  double error_bound = 0.0;  // 2^{-s0-1} e^{1/(2e)} + (2^{-M-1} + 2^{-Q-1}) e^{3/(4e)}
  double log2_sr_bound = 0.0;  // (1+2/k) M + 3Q + (2 + 2/k + log2 D0) s0
};

struct MergeOptions {
  std::optional<double> Q_param;  // default 2 ||H0||
  std::size_t dim_cap = std::size_t{1} << 10;
};

MergeSeries build_merge_series(const Mat& H0, std::vector<MergeTerm> terms, cplx z, int s0, int M, int Q,
                               double kappa, double D0, double C0, const MergeOptions& opts = {});

/// Bin index m with j in [4^{m/kappa}, 4^{(m+1)/kappa}).
int merge_bin(int j, double kappa);

struct TruncationParams {
  double Q0 = 0.0;
  long long m_real = 0, m_imag = 0;  // ceil(t Q0), ceil(beta Q0)
  double log_sr_real = 0.0;          // natural log of the real-time bound
  double log_sr_imag = 0.0;          // natural log of the imaginary-time bound
};
TruncationParams truncation_theorem_params(double t_or_beta, double Q_param, double C0, double g_tilde,
                                           double kappa, double D0, double eps0 = 1.0);

// ---- long-range decomposition ---------------------------------------------------

struct DecompositionCheck {
  int cut = 0;
  double kappa = 0.0, C0 = 0.0, g_tilde = 0.0, g_tilde_cap = 0.0;
  double D0 = 0.0;
  std::vector<double> tails;   // sum_{j >= D+1} ||V_j|| for D = 0, 1, ...
  std::vector<double> bounds;  // C0 g (D+1)^{-kappa}
  bool pass = false;
};

/// Boundary terms of `H` at cut s ordered by diameter, then descending norm,
/// then support; checks the tail bound term by term.
DecompositionCheck long_range_decomposition_check(const ChainHamiltonian& H, int s);

/// Boundary terms at cut s as V_j in that order, embedded densely.
std::vector<MergeTerm> boundary_terms(const ChainHamiltonian& H, int s);

}  // namespace sie
