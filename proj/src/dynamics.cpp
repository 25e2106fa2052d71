#include "sie/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sie/io.hpp"
#include "sie/kernels.hpp"

namespace sie {

double c_alpha(double alpha) {
  if (std::isnan(alpha) || alpha < 0.5) fail(Code::BelowThreshold, "c_alpha needs alpha >= 1/2");
  if (std::isinf(alpha)) return 2.0;
  if (alpha == 0.5) return 2.0;
  if (std::abs(1.0 - alpha) < 1e-9) return 4.0 / std::numbers::e;
  const double b = 2.0 * alpha - 1.0;
  const double e1 = b / (2.0 - 2.0 * alpha), e2 = 1.0 / (2.0 - 2.0 * alpha);
  return 2.0 * alpha / (1.0 - alpha) * (std::pow(b, e1) - std::pow(b, e2));
}

// ---- propagation -----------------------------------------------------------

Propagator::Propagator(const Mat& H) : eig_(H) {}

Vec Propagator::evolve(const Vec& psi, double t) const {
  Vec c = eig_.evecs.adjoint() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::exp(-kI * eig_.evals[i] * t);
  return eig_.evecs * c;
}

Mat Propagator::unitary(double t) const {
  return eig_.apply([t](double e) { return std::exp(-kI * e * t); });
}

namespace {

// Shared Taylor driver: psi <- sum_k (-i tau H)^k / k! psi, repeated.
template <class Apply>
Vec taylor_evolve(Apply&& apply_H, double norm_bound, Vec v, double t, double tol) {
  if (t == 0.0 || norm_bound == 0.0) return v;
  const int steps = std::max(1, static_cast<int>(std::ceil(norm_bound * std::abs(t) / 0.5)));
  const double tau = t / steps;
  const double vn = std::sqrt(kernels::norm_sq(v));
  for (int s = 0; s < steps; ++s) {
    Vec term = v, acc = v;
    for (int k = 1; k < 60; ++k) {
      term = apply_H(term);
      term *= -kI * tau / static_cast<double>(k);
      kernels::axpy(1.0, term, acc);
      if (std::sqrt(kernels::norm_sq(term)) <= tol * vn) break;
    }
    v = std::move(acc);
  }
  return v;
}

double one_norm(const Mat& H) {
  // max column sum bounds the spectral norm of a Hermitian matrix
  return H.size() ? H.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
}

}  // namespace

PureState evolve_dense(const Mat& H, const PureState& psi, double t, const EvolveOptions& opts) {
  if (psi.dim() > opts.dim_cap) fail(Code::TooLarge, "state dimension exceeds evolution cap");
  if (H.rows() != static_cast<Eigen::Index>(psi.dim())) fail(Code::Mismatch, "Hamiltonian size");
  Vec out = taylor_evolve([&](const Vec& x) -> Vec { return H * x; }, one_norm(H), psi.amps(), t, opts.tol);
  return PureState(psi.dims(), std::move(out));
}

PureState evolve_dense(const ChainHamiltonian& H, const PureState& psi, double t, const EvolveOptions& opts) {
  if (psi.dim() > opts.dim_cap) fail(Code::TooLarge, "state dimension exceeds evolution cap");
  if (psi.dims() != H.dims()) fail(Code::Mismatch, "state and chain dimensions differ");
  double bound = 0.0;
  for (const auto& term : H.terms) bound += term.norm;
  Vec out = taylor_evolve([&](const Vec& x) { return H.apply(x); }, bound, psi.amps(), t, opts.tol);
  return PureState(psi.dims(), std::move(out));
}

// ---- rates -----------------------------------------------------------------

std::vector<double> entropy_trace(const Propagator& P, const PureState& psi0, const Cut& cut, double alpha,
                                  const std::vector<double>& times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    const PureState s(psi0.dims(), P.evolve(psi0.amps(), t));
    out.push_back(renyi_entropy(schmidt_decompose(s, cut), alpha));
  }
  return out;
}

std::vector<RateSample> measure_rate_profile(const Mat& H, const PureState& psi0, const Cut& cut,
                                             const std::vector<double>& alphas, const std::vector<double>& times,
                                             double se_upper, const RateOptions& opts) {
  const Propagator P(H);
  const PureState start = psi0.normalized();
  const double h = opts.h;
  std::vector<RateSample> out;
  for (double t : times) {
    // Spectra at the stencil points are shared by all alphas.
    const double pts[5] = {t - h, t - h / 2, t, t + h / 2, t + h};
    std::vector<double> spec[5];
    for (int k = 0; k < 5; ++k) {
      const PureState s(start.dims(), P.evolve(start.amps(), pts[k]));
      spec[k] = schmidt_decompose(s, cut).coeffs;
      double n2 = 0.0;
      for (double c : spec[k]) n2 += c * c;
      for (double& c : spec[k]) c /= std::sqrt(n2);
    }
    for (double a : alphas) {
      double E[5];
      for (int k = 0; k < 5; ++k) E[k] = renyi_entropy(spec[k], a);
      const double Dh = (E[4] - E[0]) / (2 * h);
      const double Dh2 = (E[3] - E[1]) / h;
      const double fwd = (E[3] - E[2]) / (h / 2), bwd = (E[2] - E[1]) / (h / 2);
      RateSample r;
      r.t = t;
      r.alpha = a;
      r.entropy = E[2];
      const double scale = std::max(1.0, std::abs(Dh2));
      const bool smooth = std::abs(Dh - Dh2) <= 1e-5 * scale && std::abs(fwd - bwd) <= 0.1 * scale;
      if (smooth) {
        r.rate = (4.0 * Dh2 - Dh) / 3.0;
      } else {
        r.rate = fwd;
        r.flag = "kink";
      }
      if (a < 0.5) {
        r.bound = std::nan("");
        r.flag = r.flag.empty() ? "below-threshold" : r.flag + ";below-threshold";
      } else {
        r.bound = c_alpha(a) * se_upper;
      }
      out.push_back(r);
    }
  }
  return out;
}

void write_rate_csv(std::ostream& out, const std::vector<RateSample>& samples) {
  io::CsvWriter w(out);
  w.row({"t", "alpha", "entropy", "rate", "bound", "flag"});
  for (const auto& s : samples)
    w.row({io::fmt_double(s.t), io::fmt_double(s.alpha), io::fmt_double(s.entropy), io::fmt_double(s.rate),
           std::isnan(s.bound) ? "none" : io::fmt_double(s.bound), s.flag});
}

std::vector<UnitaryGrowth> check_unitary_se_growth(const Mat& H, const std::vector<int>& dims_A,
                                                   const std::vector<int>& dims_B, const std::vector<double>& times,
                                                   double se_upper_V, const SearchOptions& search) {
  const Propagator P(H);
  std::vector<UnitaryGrowth> out;
  for (double t : times) {
    const BipartiteOperator U(dims_A, dims_B, P.unitary(t));
    const SeEstimate e = se_lower_search(U, search);
    out.push_back({t, e.lower, std::exp(se_upper_V * std::abs(t))});
  }
  return out;
}

// ---- adiabatic -------------------------------------------------------------

namespace {

Vec adiabatic_pass(const std::function<Mat(double)>& H_of_nu, const Vec& psi0, double epsilon, int steps,
                   double& min_gap) {
  const double T = 1.0 / epsilon, dt = T / steps;
  Vec v = psi0;
  for (int k = 0; k < steps; ++k) {
    const double nu = (k + 0.5) / steps;
    const Propagator P(H_of_nu(nu));
    const RVec& e = P.eig().evals;
    if (e.size() > 1) min_gap = std::min(min_gap, e[1] - e[0]);
    v = P.evolve(v, dt);
  }
  return v;
}

}  // namespace

AdiabaticResult adiabatic_evolve(const std::function<Mat(double)>& H_of_nu, const PureState& psi0, double epsilon,
                                 const AdiabaticOptions& opts) {
  if (!(epsilon > 0.0)) fail(Code::BadArgument, "epsilon must be positive");
  AdiabaticResult r;
  int steps = std::max(1, opts.initial_steps);
  double gap = kInf;
  Vec prev = adiabatic_pass(H_of_nu, psi0.amps(), epsilon, steps, gap);
  for (;;) {
    if (gap < opts.gap_floor) fail(Code::GapClosed, "spectral gap fell below the floor along the path");
    const int next = steps * 2;
    Vec cur = adiabatic_pass(H_of_nu, psi0.amps(), epsilon, next, gap);
    r.last_change = (cur - prev).norm();
    steps = next;
    prev = std::move(cur);
    if (r.last_change < opts.tol || steps >= opts.max_steps) break;
  }
  if (gap < opts.gap_floor) fail(Code::GapClosed, "spectral gap fell below the floor along the path");
  r.state = PureState(psi0.dims(), prev);
  r.steps = steps;
  r.min_gap = gap;
  return r;
}

double adiabatic_error_bound(double c0, double g, double Delta, double epsilon) {
  return c0 * g * epsilon / (Delta * Delta) * (2.0 + 7.0 * c0 * g / Delta);
}

}  // namespace sie
