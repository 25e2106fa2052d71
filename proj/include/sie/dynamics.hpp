#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sie/core.hpp"
#include "sie/linalg.hpp"
#include "sie/models.hpp"
#include "sie/se_strength.hpp"
#include "sie/spectra.hpp"

namespace sie {

/// c_alpha prefactor of the Renyi rate bound, alpha >= 1/2 (kInf allowed).
double c_alpha(double alpha);

/// exp(-iHt) through one eigendecomposition, for repeated time sampling.
class Propagator {
 public:
  explicit Propagator(const Mat& H);
  Vec evolve(const Vec& psi, double t) const;
  Mat unitary(double t) const;
  const HermEig& eig() const { return eig_; }

 private:
  HermEig eig_;
};

struct EvolveOptions {
  std::size_t dim_cap = std::size_t{1} << 16;
  double tol = 1e-14;  // truncation threshold of the series, relative to ||psi||
};

/// Single-shot exp(-iHt)|psi> by a scaled Taylor series on the vector.
PureState evolve_dense(const Mat& H, const PureState& psi, double t, const EvolveOptions& opts = {});
/// Same, applying the chain Hamiltonian term by term (no dense matrix).
PureState evolve_dense(const ChainHamiltonian& H, const PureState& psi, double t, const EvolveOptions& opts = {});

struct RateSample {
  double t = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;
  double rate = 0.0;
  double bound = 0.0;  // NaN when alpha < 1/2 ("none")
  std::string flag;    // "", "kink" (one-sided value), "below-threshold"
};

struct RateOptions {
  double h = 1e-3;  // base finite-difference step
};

std::vector<RateSample> measure_rate_profile(const Mat& H, const PureState& psi0, const Cut& cut,
                                             const std::vector<double>& alphas, const std::vector<double>& times,
                                             double se_upper, const RateOptions& opts = {});

/// Entropy of exp(-iHt)psi0 across `cut` for each time, one decomposition.
std::vector<double> entropy_trace(const Propagator& P, const PureState& psi0, const Cut& cut, double alpha,
                                  const std::vector<double>& times);

void write_rate_csv(std::ostream& out, const std::vector<RateSample>& samples);

struct UnitaryGrowth {
  double t = 0.0;
  double lower = 0.0;  // searched lower bound on SE(exp(-iHt))
  double cap = 0.0;    // exp(SE_upper(V) t)
};

std::vector<UnitaryGrowth> check_unitary_se_growth(const Mat& H, const std::vector<int>& dims_A,
                                                   const std::vector<int>& dims_B, const std::vector<double>& times,
                                                   double se_upper_V, const SearchOptions& search = {});

struct AdiabaticOptions {
  double gap_floor = 1e-3;
  int initial_steps = 64;
  int max_steps = 1 << 16;
  double tol = 1e-8;
};

struct AdiabaticResult {
  PureState state;
  int steps = 0;
  double min_gap = kInf;
  double last_change = 0.0;
};

/// T exp(-i int_0^{1/eps} H(eps x) dx) |psi0> with piecewise-constant
/// (midpoint) nu steps, doubling the step count until the state moves by less
/// than `tol`.
AdiabaticResult adiabatic_evolve(const std::function<Mat(double)>& H_of_nu, const PureState& psi0, double epsilon,
                                 const AdiabaticOptions& opts = {});

/// Right-hand side of the adiabatic error estimate,
/// (c0 g eps / Delta^2)(2 + 7 c0 g / Delta).
double adiabatic_error_bound(double c_tilde0, double g_tilde, double Delta, double epsilon);

}  // namespace sie
