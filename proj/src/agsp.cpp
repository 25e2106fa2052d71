#include "sie/agsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "sie/dynamics.hpp"
#include "sie/io.hpp"
#include "sie/kernels.hpp"
#include "sie/linalg.hpp"

namespace sie {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GL = boost::math::quadrature::gauss<double, 20>;

// Filter values k(E_i) with `panels` equal Gauss-Legendre panels on [-tc, tc].
// Each node contributes w g(t) exp(-i E t) as a whole vector.
Vec filter_sum(const RVec& energies, double beta, double tc, int panels) {
  const auto& x = GL::abscissa();
  const auto& w = GL::weights();
  const double width = 2.0 * tc / panels;
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * beta);
  Vec acc = Vec::Zero(energies.size());
  Vec phase(energies.size());
  auto add_node = [&](double t, double weight) {
    const double g = weight * norm * std::exp(-t * t / (4.0 * beta));
    for (Eigen::Index i = 0; i < energies.size(); ++i) phase[i] = std::exp(-kI * energies[i] * t);
    kernels::axpy(g, phase, acc);
  };
  for (int p = 0; p < panels; ++p) {
    const double mid = -tc + (p + 0.5) * width, half = 0.5 * width;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == 0.0) {
        add_node(mid, half * w[j]);
      } else {
        add_node(mid + half * x[j], half * w[j]);
        add_node(mid - half * x[j], half * w[j]);
      }
    }
  }
  return acc;
}

Vec phase_aligned(const Vec& v, const Vec& ref) {
  const cplx ov = ref.dot(v);
  if (std::abs(ov) == 0.0) return v;
  return v * (std::conj(ov) / std::abs(ov));
}

double distance_up_to_phase(const Vec& a, const Vec& b) { return (phase_aligned(a, b) - b).norm(); }

Mat as_matrix(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const RowMat>(v.data(), rows, cols);
}

Eigen::Index prod(const std::vector<int>& d) {
  Eigen::Index p = 1;
  for (int x : d) p *= x;
  return p;
}

}  // namespace

AgspOperator build_agsp(const Mat& H, double beta, const AgspOptions& opts) {
  if (!(beta > 0.0)) fail(Code::BadArgument, "beta must be positive");
  if (H.rows() != H.cols() || H.rows() < 2) fail(Code::Mismatch, "AGSP needs a square operator of size >= 2");
  const HermEig eig(H);
  AgspOperator K;
  K.beta = beta;
  K.shift = eig.evals[0];
  K.gap = eig.evals[1] - eig.evals[0];
  if (K.gap < 1e-9) fail(Code::Degenerate, "ground state is degenerate within 1e-9");
  K.t_c = 2.0 * beta * K.gap;
  K.energies = eig.evals.array() - K.shift;
  K.evecs = eig.evecs;

  int panels = 1;
  Vec prev = filter_sum(K.energies, beta, K.t_c, panels);
  for (;;) {
    const Vec cur = filter_sum(K.energies, beta, K.t_c, 2 * panels);
    panels *= 2;
    // The operator is diagonal in the eigenbasis, so its norm change is the
    // largest filter change.
    K.quad_change = (cur - prev).cwiseAbs().maxCoeff();
    prev = cur;
    if (K.quad_change < opts.quad_tol || panels >= opts.max_panels) break;
  }
  K.nodes = panels * static_cast<int>(GL::abscissa().size()) * 2;
  K.filter = prev.real();
  K.K = K.evecs * K.filter.cast<cplx>().asDiagonal() * K.evecs.adjoint();
  return K;
}

bool AgspChecks::pass(double tol) const {
  return ground_defect <= ground_bound + tol && excited_norm <= excited_bound + tol &&
         gaussian_distance <= gaussian_bound + tol;
}

AgspChecks check_agsp(const AgspOperator& K) {
  AgspChecks c;
  const Eigen::Index n = K.K.rows();
  const Vec omega = K.ground();
  const double decay = std::exp(-K.beta * K.gap * K.gap);
  c.ground_defect = (K.K * omega - omega).norm();
  c.ground_bound = decay;
  const Mat perp = Mat::Identity(n, n) - omega * omega.adjoint();
  c.excited_norm = op_norm(K.K * perp);
  c.excited_bound = 2.0 * decay;
  // exp(-beta H^2) of the shifted Hamiltonian, rebuilt as a matrix function.
  const Mat Hs = K.evecs * K.energies.cast<cplx>().asDiagonal() * K.evecs.adjoint();
  const Mat gauss = expm_herm(Hs * Hs, -K.beta);
  c.gaussian_distance = op_norm(K.K - gauss);
  c.gaussian_bound = std::exp(-K.t_c * K.t_c / (4.0 * K.beta));
  return c;
}

double agsp_se_cap(double beta, double Delta, double J_tilde) { return std::exp(2.0 * beta * Delta * J_tilde); }

// ---- ground-state tails -----------------------------------------------------

GroundTailReport ground_tail_experiment(const ChainHamiltonian& H, const std::vector<int>& cuts,
                                        const std::vector<int>& D_grid, double gap_floor) {
  GroundTailReport r;
  const std::vector<int> dims = H.dims();
  const std::size_t dim = total_dim(dims, std::size_t{1} << 24);
  Vec ground;
  if (dim <= 1024) {
    const HermEig eig(H.dense());
    r.E0 = eig.evals[0];
    r.E1 = eig.evals[1];
    ground = eig.evecs.col(0);
  } else {
    double bound = 0.0;
    for (const auto& t : H.terms) bound += t.norm;
    const LowEigen low =
        lowest_eigenpairs([&](const Vec& x) { return H.apply(x); }, static_cast<Eigen::Index>(dim), 2, bound);
    r.E0 = low.evals[0];
    r.E1 = low.evals[1];
    ground = low.evecs[0];
  }
  r.gap = r.E1 - r.E0;
  r.small_gap = r.gap < gap_floor;
  if (H.eta > 2.0) {
    r.J_tilde = long_range_se_bound(H.J0, H.eta);
  } else {
    for (int s = 1; s < H.n; ++s) r.J_tilde = std::max(r.J_tilde, split_at_cut(H, s).boundary_norm_sum);
  }
  r.exponent = -r.gap / (2.0 * r.J_tilde + r.gap);

  const PureState psi(dims, ground);
  for (int s : cuts) {
    const SchmidtSpectrum spec = schmidt_decompose(psi, Cut::at(s, H.n));
    r.spectra.push_back(spec.coeffs);
    std::vector<double> lx, ly;
    for (int D : D_grid) {
      GroundTailRow row;
      row.cut = s;
      row.D = D;
      for (std::size_t j = static_cast<std::size_t>(D); j < spec.coeffs.size(); ++j)
        row.tail_sq += spec.coeffs[j] * spec.coeffs[j];
      row.bound = 32.0 * std::pow(static_cast<double>(D), r.exponent);
      if (row.tail_sq > 1e-28) {
        lx.push_back(std::log(static_cast<double>(D)));
        ly.push_back(std::log(row.tail_sq));
      }
      r.rows.push_back(row);
    }
    double slope = std::nan("");
    if (lx.size() >= 2) {
      const double n = static_cast<double>(lx.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
      }
      slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    r.slopes.emplace_back(s, slope);
  }
  return r;
}

// ---- area law ----------------------------------------------------------------

double c_kappa_1(double kappa) {
  const double q = std::pow(2.0, -2.0 * kappa);
  return (2.0 - q) / (kappa * (1.0 - q));
}

double c_kappa_2(double kappa) {
  const double q = std::pow(2.0, -2.0 * kappa);
  return (6.0 + 2.0 * kappa) * std::numbers::ln2 / ((1.0 - q) * (1.0 - q));
}

AreaLawConstants area_law_constants(double g_tilde, double Delta, double S0, double c_tilde0) {
  if (!(g_tilde > 0.0) || !(Delta > 0.0) || S0 < 0.0 || c_tilde0 < 0.0)
    fail(Code::BadArgument, "area-law constants need g, Delta > 0 and S0, c0 >= 0");
  AreaLawConstants c;
  c.kappa_Delta = Delta / (2.0 * Delta + 4.0 * g_tilde);
  const double g3 = g_tilde * g_tilde * g_tilde;
  c.log_C = (S0 + 3.0) / (4.0 * c.kappa_Delta) + std::log(12.0) +
            3.0 * c_tilde0 * g3 * (2.0 * Delta / g_tilde + 7.0 * c_tilde0) / (Delta * Delta * Delta);
  c.C = std::exp(c.log_C);
  c.c_kappa_1 = c_kappa_1(c.kappa_Delta);
  c.c_kappa_2 = c_kappa_2(c.kappa_Delta);
  c.entropy_bound = c.c_kappa_1 * c.log_C + c.c_kappa_2;
  return c;
}

Mat BoundaryFamily::H(double nu) const {
  const Eigen::Index a = H_A.rows(), b = H_B.rows();
  return kron(H_A, identity(b)) + kron(identity(a), H_B) + V(nu);
}

BoundaryFamily two_qudit_family(int d, double g_tilde, double level_spacing) {
  if (d < 2) fail(Code::BadArgument, "qudit dimension must be >= 2");
  BoundaryFamily f;
  f.dims_A = {d};
  f.dims_B = {d};
  Mat h = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) h(i, i) = level_spacing * i;
  f.H_A = h;
  f.H_B = h;
  const Mat x = site_x(d);
  const Mat xx = kron(x, x);
  f.V = [xx, g_tilde](double nu) -> Mat { return nu * g_tilde * xx; };
  f.V_op = [x, d, g_tilde](double nu) {
    return BipartiteOperator::from_terms({d}, {d}, {OperatorTerm{nu * g_tilde, x, x}});
  };
  return f;
}

BoundaryAdiabaticReport boundary_adiabatic_experiment(const BoundaryFamily& family, double epsilon, double beta,
                                                      const std::vector<int>& D_grid, int nu_grid) {
  if (nu_grid < 3) fail(Code::BadArgument, "nu grid needs at least 3 points");
  BoundaryAdiabaticReport r;
  r.epsilon = epsilon;
  r.beta = beta;
  const Eigen::Index dA = prod(family.dims_A), dB = prod(family.dims_B);

  // Gap, SE strength and smoothness scanned on the grid.
  r.Delta = kInf;
  double dmax = 0.0;
  const double h = 1e-4;
  for (int i = 0; i < nu_grid; ++i) {
    const double nu = static_cast<double>(i) / (nu_grid - 1);
    const HermEig eig(family.H(nu));
    r.Delta = std::min(r.Delta, eig.evals[1] - eig.evals[0]);
    r.g_tilde = std::max(r.g_tilde, se_upper_bound(family.V_op(nu)));
    const double lo = std::max(0.0, nu - h), hi = std::min(1.0, nu + h), mid = 0.5 * (lo + hi);
    const Mat d1 = (family.V(hi) - family.V(lo)) / (hi - lo);
    const Mat d2 = (family.V(hi) - 2.0 * family.V(mid) + family.V(lo)) / (0.25 * (hi - lo) * (hi - lo));
    dmax = std::max({dmax, op_norm(d1), op_norm(d2)});
  }
  if (r.Delta < 1e-9) fail(Code::GapClosed, "family is gapless on the sampled grid");
  r.c_tilde0 = r.g_tilde > 0.0 ? dmax / r.g_tilde : 0.0;

  const HermEig e0(family.H(0.0)), e1(family.H(1.0));
  const Vec omega0 = e0.evecs.col(0), omega1 = e1.evecs.col(0);
  r.S0 = renyi_entropy(schmidt_of_matrix(as_matrix(omega0, dA, dB)), kInf);
  r.E1_target = renyi_entropy(schmidt_of_matrix(as_matrix(omega1, dA, dB)), 1.0);
  r.constants = area_law_constants(std::max(r.g_tilde, 1e-300), r.Delta, r.S0, r.c_tilde0);
  r.entropy_pass = r.E1_target <= r.constants.entropy_bound;

  std::vector<int> dims = family.dims_A;
  dims.insert(dims.end(), family.dims_B.begin(), family.dims_B.end());
  const AdiabaticResult ad = adiabatic_evolve([&](double nu) { return family.H(nu); }, PureState(dims, omega0),
                                              epsilon);
  r.adiabatic_steps = ad.steps;
  r.adiabatic_infidelity = distance_up_to_phase(ad.state.amps(), omega1);
  r.adiabatic_bound = adiabatic_error_bound(r.c_tilde0, r.g_tilde, r.Delta, epsilon);

  const AgspOperator K = build_agsp(family.H(1.0), beta);
  Vec filtered = K.K * ad.state.amps();
  filtered /= filtered.norm();
  const SchmidtSpectrum spec = schmidt_of_matrix(as_matrix(filtered, dA, dB), true);
  r.pass = r.entropy_pass && r.adiabatic_infidelity <= r.adiabatic_bound;
  for (int D : D_grid) {
    const Eigen::Index keep = std::min<Eigen::Index>(D, static_cast<Eigen::Index>(spec.coeffs.size()));
    Mat m = Mat::Zero(dA, dB);
    for (Eigen::Index s = 0; s < keep; ++s)
      m += spec.coeffs[s] * spec.left->col(s) * spec.right->col(s).transpose();
    Vec v = Eigen::Map<const Vec>(RowMat(m).data(), dA * dB);
    if (v.norm() > 0.0) v /= v.norm();
    AdiabaticRow row;
    row.D = D;
    row.error = distance_up_to_phase(v, omega1);
    row.bound = r.constants.C * std::pow(static_cast<double>(D), -r.constants.kappa_Delta);
    row.pass = row.error <= row.bound;
    r.pass = r.pass && row.pass;
    r.rows.push_back(row);
  }
  return r;
}

nlohmann::json to_json(const BoundaryAdiabaticReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"D", row.D}, {"error", row.error}, {"bound", io::fmt_double(row.bound)}, {"pass", row.pass}});
  return {{"epsilon", r.epsilon},
          {"beta", r.beta},
          {"Delta", r.Delta},
          {"g_tilde", r.g_tilde},
          {"c_tilde0", r.c_tilde0},
          {"S0", r.S0},
          {"kappa_Delta", r.constants.kappa_Delta},
          {"log_C", r.constants.log_C},
          {"c_kappa_1", r.constants.c_kappa_1},
          {"c_kappa_2", r.constants.c_kappa_2},
          {"entropy_bound", r.constants.entropy_bound},
          {"E1", r.E1_target},
          {"adiabatic_error", r.adiabatic_infidelity},
          {"adiabatic_bound", r.adiabatic_bound},
          {"adiabatic_steps", r.adiabatic_steps},
          {"rows", rows},
          {"entropy_pass", r.entropy_pass},
          {"pass", r.pass}};
}

nlohmann::json to_json(const AgspOperator& K, const AgspChecks& c) {
  return {{"beta", K.beta},
          {"gap", K.gap},
          {"t_c", K.t_c},
          {"shift", K.shift},
          {"nodes", K.nodes},
          {"quad_change", K.quad_change},
          {"ground_defect", c.ground_defect},
          {"ground_bound", c.ground_bound},
          {"excited_norm", c.excited_norm},
          {"excited_bound", c.excited_bound},
          {"gaussian_distance", c.gaussian_distance},
          {"gaussian_bound", c.gaussian_bound}};
}

}  // namespace sie
