// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sie/agsp.hpp"
#include "sie/dynamics.hpp"
#include "sie/linalg.hpp"
#include "sie/lowrank.hpp"
#include "sie/models.hpp"
#include "sie/mps.hpp"
#include "sie/rng.hpp"
#include "sie/se_strength.hpp"
#include "sie/tdmrg.hpp"

using namespace sie;

namespace {

constexpr double kRateTol = 1e-4;
constexpr double kSaturationTol = 1e-4;
constexpr double kSlopeLo = 0.60, kSlopeHi = 1.0;
constexpr double kSeTolSat = 1e-4, kSeTolIsing = 1e-6;
constexpr double kAgspQuadTol = 1e-8;
constexpr double kFitTol = 1e-6;
constexpr double kNoGoFloor = 0.095;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Outcome c_alpha_anchors() {
  const bool ok = c_alpha(0.5) == 2.0 && c_alpha(1.0) == 4.0 / std::numbers::e && c_alpha(kInf) == 2.0 &&
                  std::abs(c_alpha(0.75) - 1.5) <= 1e-12;
  return {ok, "c(3/4)=" + fmt(c_alpha(0.75))};
}

Outcome sie_sweep() {
  const std::vector<double> alphas = {0.5, 0.75, 1.0, 2.0, kInf};
  const std::vector<double> times = {0.15, 0.45, 0.9};
  double worst = -kInf;
  for (int i = 0; i < 200; ++i) {
    Rng rng(2024, static_cast<std::uint64_t>(i));
    const int dA = 2 + rng.below(7);
    const int dB = 2 + rng.below(std::min(15, 256 / dA - 1));
    std::vector<OperatorTerm> terms;
    const int nt = 1 + rng.below(3);
    for (int k = 0; k < nt; ++k)
      terms.push_back({0.2 + 0.8 * rng.uniform(), random_hermitian(rng, dA), random_hermitian(rng, dB)});
    const auto V = BipartiteOperator::from_terms({dA}, {dB}, terms);
    const Mat H = kron(random_hermitian(rng, dA) * (2.0 * rng.uniform()), identity(dB)) +
                  kron(identity(dA), random_hermitian(rng, dB) * (2.0 * rng.uniform())) + V.matrix;
    const PureState psi({dA, dB}, random_vector(rng, dA * dB));
    for (const auto& s : measure_rate_profile(H, psi, Cut::at(1, 2), alphas, times, se_upper_bound(V)))
      worst = std::max(worst, std::abs(s.rate) - s.bound);
  }
  return {worst <= kRateTol, "max excess " + fmt(worst)};
}

Outcome saturation() {
  const auto s = build_saturation_dynamics(4, 1.0, 10);
  const double E = s.renyi(0.5, 1.0);
  const bool value = std::abs(E - 6.40402) <= kSaturationTol;
  const bool rate = E / 1.0 >= s.rate_lower_bound(1.0) - 1e-12;
  const double ratio = build_saturation_dynamics(4, 1.0, 1000).renyi(0.5, 1.0) / (2.0 * 4.0);
  return {value && rate && std::abs(ratio - 1.0) <= 0.02, "E=" + fmt(E) + " ratio(n=1000)=" + fmt(ratio)};
}

Outcome threshold_violation() {
  std::vector<double> x, y;
  bool half = true;
  for (int D0 : {16, 64, 256, 1024}) {
    const auto u = build_unbounded_dynamics(D0, 1.0, 1.0);
    x.push_back(std::log(static_cast<double>(D0)));
    y.push_back(u.renyi(0.25));
    half = half && u.renyi(0.5) <= 2.0 * 1.0 * 1.0 + 1e-6;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / x.size(), my += y[i] / y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  const double slope = sxy / sxx;
  return {half && slope >= kSlopeLo && slope <= kSlopeHi, "slope " + fmt(slope) + " vs 2/3"};
}

Outcome se_targets() {
  SearchOptions plain;
  plain.ancilla_A = plain.ancilla_B = 1;
  const double sat = se_lower_search(build_saturation_dynamics(4, 1.0, 1).V(), plain).lower;
  const double ising = se_lower_search(build_ising_projector_interaction(8), plain).lower;
  Mat S = Mat::Zero(4, 4);
  S(0, 0) = S(3, 3) = S(1, 2) = S(2, 1) = 1.0;
  SearchOptions anc;
  anc.ancilla_A = anc.ancilla_B = 2;
  const double sw = se_lower_search(BipartiteOperator({2}, {2}, S), anc).lower;
  const bool ok = std::abs(sat - 4.0) <= kSeTolSat && std::abs(ising - 1.0) <= kSeTolIsing && sw >= std::sqrt(2.0) - 1e-6;
  return {ok, "MJ " + fmt(sat) + ", ising " + fmt(ising) + ", swap " + fmt(sw)};
}

Outcome agsp() {
  AgspOptions ao;
  ao.quad_tol = kAgspQuadTol;
  SearchOptions so;
  so.seeds = 2;
  so.iterations = 80;
  bool ineq = true, cap = true;
  double worst_margin = kInf;
  for (int i = 0; i < 100; ++i) {
    Rng rng(7, 1000 + static_cast<std::uint64_t>(i));
    const int dA = 2 + rng.below(6);
    const int dB = 2 + rng.below(std::max(1, 64 / dA - 1));
    std::vector<OperatorTerm> terms;
    for (int k = 0; k < 2; ++k)
      terms.push_back({0.1 + 0.4 * rng.uniform(), random_hermitian(rng, dA), random_hermitian(rng, dB)});
    const auto V = BipartiteOperator::from_terms({dA}, {dB}, terms);
    const Mat H = kron(random_hermitian(rng, dA), identity(dB)) + kron(identity(dA), random_hermitian(rng, dB)) + V.matrix;
    const auto K = build_agsp(H, 1.0, ao);
    const auto c = check_agsp(K);
    ineq = ineq && c.ground_defect <= c.ground_bound && c.excited_norm <= c.excited_bound;
    worst_margin = std::min({worst_margin, c.ground_bound - c.ground_defect, c.excited_bound - c.excited_norm});
    so.rng_seed = static_cast<std::uint64_t>(i);
    cap = cap && se_lower_search(BipartiteOperator({dA}, {dB}, K.K), so).lower <= agsp_se_cap(1.0, K.gap, se_upper_bound(V));
  }
  return {ineq && cap, "min margin " + fmt(worst_margin)};
}

Outcome tdmrg() {
  bool ok = true;
  std::ostringstream d;
  for (int D : {32, 64, 128}) {
    TdmrgConfig c;
    c.H = build_long_range_ising(8, 0.5, 3.0, {1.0, 0.0});
    c.t = 0.5;
    c.D = D;
    c.N_steps = default_steps(c.H, c.t, 0.5);
    c.initial = Mps::product(std::vector<Vec>(8, Vec::Unit(2, 0)));
    const auto r = tdmrg_run(c);
    const PureState exact = evolve_dense(c.H, to_dense(c.initial), c.t);
    Vec v = to_dense(r.state).amps();
    v /= v.norm();
    const double err = (exact.amps() - v).norm();
    const auto& cert = r.certificate;
    bool zeta = true;
    for (const auto& s : cert.steps) zeta = zeta && s.zeta <= cert.zeta_cap + 1e-9;
    const bool run_ok = cert.normalized_bound && err <= *cert.normalized_bound && zeta && cert.naive_bound > cert.final_bound &&
                        cert.invariants_ok();
    ok = ok && run_ok;
    d << "D=" << D << " err " << fmt(err) << " <= " << fmt(cert.normalized_bound.value_or(kInf)) << "; ";
  }
  return {ok, d.str()};
}

Outcome existence() {
  const auto H = build_long_range_ising(8, 0.5, 3.0, {1.0, 0.0});
  const auto r = state_mps_existence_check(H, PureState::basis(H.dims()), 0.5, {4, 16, 64});
  bool ok = r.lambda_ok;
  for (const auto& row : r.rows) ok = ok && row.error_sq <= row.bound;
  return {ok, "worst s*lambda_s/e^{Jt} " + fmt(r.worst_lambda_ratio)};
}

Outcome kolmogorov() {
  FitOptions o;
  const double two = rank_constrained_identity_fit(2, 1, o).numeric_estimate;
  bool half = true;
  for (int N : {2, 5, 16, 40}) {
    const RMat W = RMat::Constant(N, N, 0.5);
    half = half && (RMat::Identity(N, N) - W).cwiseAbs().maxCoeff() == 0.5;
  }
  const auto ng = no_go_experiment(16, 1, 0.3, o);
  return {std::abs(two - 0.5) <= kFitTol && half && ng.estimate >= kNoGoFloor,
          "fit(2,1)=" + fmt(two) + ", no-go " + fmt(ng.estimate)};
}

Outcome merge() {
  using namespace pauli;
  const Mat H0 = 0.5 * (kron(Z(), I()) + kron(I(), Z()));
  const std::vector<MergeTerm> terms{{1, Mat(0.5 * kron(X(), X())), {0, 1}}};
  double err[5][5][5] = {};
  bool within = true;
  for (int s0 = 2; s0 <= 4; ++s0)
    for (int M = 2; M <= 4; ++M)
      for (int Q = 2; Q <= 4; ++Q) {
        const auto s = build_merge_series(H0, terms, cplx(0, 0.1), s0, M, Q, 1.0, 4.0, 1.0);
        within = within && std::abs(s.z) <= s.Q0_inv && s.error <= s.error_bound;
        err[s0][M][Q] = s.error;
      }
  bool mono = true;
  for (int a = 2; a <= 4; ++a)
    for (int b = 2; b <= 4; ++b)
      for (int c = 2; c <= 4; ++c) {
        const double e = err[a][b][c] * (1.0 + 1e-9) + 1e-15;
        if (a < 4) mono = mono && err[a + 1][b][c] <= e;
        if (b < 4) mono = mono && err[a][b + 1][c] <= e;
        if (c < 4) mono = mono && err[a][b][c + 1] <= e;
      }
  return {within && mono, "max error " + fmt(err[2][2][2])};
}

Outcome desk_scale_substitutes() {
  // Ground-state tails.
  const auto H = build_long_range_ising(8, 1.0, 3.0, {1.0, 0.0});
  const auto gt = ground_tail_experiment(H, {2, 4}, {1, 2, 4, 8});
  bool tails = true;
  for (std::size_t i = 0; i < gt.rows.size(); ++i) {
    tails = tails && gt.rows[i].tail_sq <= gt.rows[i].bound;
    if (i > 0 && gt.rows[i].cut == gt.rows[i - 1].cut)
      tails = tails && (gt.rows[i].tail_sq < gt.rows[i - 1].tail_sq || gt.rows[i].tail_sq <= 1e-24);
  }
  // Boundary-adiabatic entropy.
  const auto ad = boundary_adiabatic_experiment(two_qudit_family(3, 1.0, 2.0), 0.05, 2.0, {1, 2, 3}, 101);
  // Gibbs tails.
  const auto six = build_long_range_ising(6, 1.0, 3.0, {1.0, 0.0});
  const auto g1 = gibbs_tail_experiment(six, 1.0, {1, 2, 4, 8});
  const auto g2 = gibbs_tail_experiment(six, 2.0, {1, 2, 4, 8});
  bool beta = g1.monotone && g2.monotone;
  for (std::size_t i = 0; i < g1.rows.size(); ++i)
    if (g2.rows[i].tail_sq > 1e-24) beta = beta && g1.rows[i].tail_sq < g2.rows[i].tail_sq;
  return {tails && ad.entropy_pass && beta,
          "E1 " + fmt(ad.E1_target) + " <= " + fmt(ad.constants.entropy_bound) + "; paper-scale constants not reproduced"};
}

Outcome selftest(const std::string& cli, const std::string& out) {
  if (cli.empty()) return {false, "CLI path not given"};
  const std::string cmd = "\"" + cli + "\" selftest --out \"" + out + "\" > \"" + out + ".log\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return {rc == 0, "exit " + std::to_string(rc)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::string out = argc > 2 ? argv[2] : "acceptance_selftest";
  struct Item {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items = {
      {1, "c_alpha anchors", 1, c_alpha_anchors},
      {2, "Renyi rate bound sweep", 300, sie_sweep},
      {3, "saturating dynamics", 10, saturation},
      {4, "threshold violation below alpha 1/2", 10, threshold_violation},
      {5, "SE strength analytic targets", 60, se_targets},
      {6, "AGSP inequalities and SE cap", 300, agsp},
      {7, "t-DMRG certificate soundness", 600, tdmrg},
      {8, "MPS existence bound", 120, existence},
      {9, "Kolmogorov width and no-go", 180, kolmogorov},
      {10, "merge series bound", 120, merge},
      {11, "desk-scale substitutes for paper-scale constants", 600, desk_scale_substitutes},
      {12, "selftest suite", 900, [&] { return selftest(cli, out); }},
  };
  int failures = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= it.budget_s;
    if (!pass) ++failures;
    std::printf("[%s] %2d %s (%.1fs / %.0fs) %s\n", pass ? "PASS" : "FAIL", it.id, it.name, secs, it.budget_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
