#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sie/agsp.hpp"
#include "sie/linalg.hpp"
#include "sie/models.hpp"
#include "sie/rng.hpp"
#include "test_util.hpp"

using namespace sie;

namespace {

// Composite Simpson rule for (4 pi beta)^{-1/2} int_{-tc}^{tc} exp(-t^2/(4 beta)) cos(E t) dt.
double filter_oracle(double E, double beta, double tc) {
  const int n = 20000;
  const double h = 2.0 * tc / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = -tc + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::exp(-t * t / (4.0 * beta)) * std::cos(E * t);
  }
  return s * h / 3.0 / std::sqrt(4.0 * std::numbers::pi * beta);
}

Mat random_gapped(Rng& rng, int n) {
  const Mat U = random_unitary(rng, n);
  RVec e(n);
  e[0] = 0.0;
  for (int i = 1; i < n; ++i) e[i] = 0.3 + 2.0 * rng.uniform();
  return U * e.cast<cplx>().asDiagonal() * U.adjoint();
}

}  // namespace

TEST_CASE("AGSP on a two-level system") {
  Mat H = Mat::Zero(2, 2);
  H(1, 1) = 1.0;
  const auto K = build_agsp(H, 4.0);
  CHECK(K.t_c == doctest::Approx(8.0));
  const double excited = (K.K * Vec::Unit(2, 1)).norm();
  CHECK(excited == doctest::Approx(filter_oracle(1.0, 4.0, 8.0)).epsilon(1e-9));
  // Untruncated value is e^{-4}; the cutoff at t_c = 8 moves it by at most e^{-t_c^2/(4 beta)} = e^{-4}.
  CHECK(std::abs(excited - std::exp(-4.0)) <= std::exp(-4.0));
  CHECK(excited == doctest::Approx(0.021087).epsilon(1e-4));
  // Without the cutoff the filter reproduces e^{-beta E^2}.
  CHECK(filter_oracle(1.0, 4.0, 40.0) == doctest::Approx(0.018316).epsilon(1e-4));
  const auto c = check_agsp(K);
  CHECK(c.pass(1e-10));
  CHECK(c.ground_defect <= std::exp(-4.0));
}

TEST_CASE("AGSP shifts the ground energy and rejects degeneracy") {
  Mat H = Mat::Zero(3, 3);
  H(0, 0) = -5.0;
  H(1, 1) = -3.0;
  H(2, 2) = 1.0;
  const auto K = build_agsp(H, 1.0);
  CHECK(K.shift == doctest::Approx(-5.0));
  CHECK(K.gap == doctest::Approx(2.0));
  CHECK(K.energies[0] == doctest::Approx(0.0));
  CHECK(check_agsp(K).pass(1e-10));
  CHECK_CODE(build_agsp(Mat(Mat::Identity(3, 3)), 1.0), Code::Degenerate);
  CHECK_CODE(build_agsp(H, 0.0), Code::BadArgument);
}

TEST_CASE("property: AGSP inequalities on random gapped Hamiltonians") {
  Rng rng(51);
  AgspOptions o;
  o.quad_tol = 1e-8;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + rng.below(15);
    const double beta = 0.2 + 2.0 * rng.uniform();
    const auto K = build_agsp(random_gapped(rng, n), beta, o);
    CHECK(check_agsp(K).pass(1e-8));
  }
}

TEST_CASE("AGSP SE cap") {
  CHECK(agsp_se_cap(0.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(agsp_se_cap(1.0, 1.0, 1.0) == doctest::Approx(7.389056).epsilon(1e-7));

  // Dense 3-qubit chain split 1|2: the searched SE of K stays under the cap.
  const auto chain = build_long_range_ising(3, 0.5, 3.0, {1.0, 0.0});
  const auto K = build_agsp(chain.dense(), 0.5);
  const double J = split_at_cut(chain, 1).boundary_norm_sum;
  SearchOptions s;
  s.seeds = 2;
  const auto e = se_lower_search(BipartiteOperator({2}, {2, 2}, K.K), s);
  CHECK(e.lower <= agsp_se_cap(0.5, K.gap, J) + 1e-9);
}

TEST_CASE("area-law constants") {
  const auto c = area_law_constants(1.0, 1.0, 0.0, 1.0);
  CHECK(c.kappa_Delta == doctest::Approx(1.0 / 6.0));
  CHECK(c.log_C == doctest::Approx(4.5 + std::log(12.0) + 27.0));
  // Long-double evaluation of the closed form at kappa = 1/6.
  const long double q = std::pow(2.0L, -1.0L / 3.0L);
  const long double oracle = (2.0L - q) / ((1.0L / 6.0L) * (1.0L - q));
  CHECK(c_kappa_1(1.0 / 6.0) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-13));
  CHECK(c_kappa_1(1.0 / 6.0) == doctest::Approx(35.0839).epsilon(1e-5));
  CHECK(c.entropy_bound == doctest::Approx(c.c_kappa_1 * c.log_C + c.c_kappa_2));
  CHECK(c.c_kappa_2 > 0.0);
  CHECK_CODE(area_law_constants(0.0, 1.0, 0.0, 1.0), Code::BadArgument);
}

TEST_CASE("ground-state tails") {
  const auto decoupled = build_long_range_ising(6, 0.0, 3.0, {1.0, 0.0});
  const auto flat = ground_tail_experiment(decoupled, {1, 3}, {1, 2});
  for (const auto& row : flat.rows) CHECK(row.tail_sq <= 1e-20);

  const auto H = build_long_range_ising(10, 1.0, 3.0, {1.0, 0.0});
  const auto r = ground_tail_experiment(H, {2, 5}, {1, 2, 4, 8, 16, 32});
  CHECK_FALSE(r.small_gap);
  CHECK(r.exponent < 0.0);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (r.rows[i].cut != r.rows[i - 1].cut) continue;
    CHECK(r.rows[i].tail_sq <= r.rows[i - 1].tail_sq);
    if (r.rows[i - 1].tail_sq > 1e-24) CHECK(r.rows[i].tail_sq < r.rows[i - 1].tail_sq);
  }
  for (const auto& [cut, slope] : r.slopes) CHECK(slope <= 0.0);
  // Cut 2 has Schmidt rank at most 4.
  for (const auto& row : r.rows)
    if (row.cut == 2 && row.D >= 4) CHECK(row.tail_sq <= 1e-24);
}

TEST_CASE("boundary adiabatic experiment on two qutrits") {
  const auto fam = two_qudit_family(3, 1.0, 2.0);
  const auto r = boundary_adiabatic_experiment(fam, 0.05, 2.0, {1, 2, 3}, 51);
  CHECK(r.S0 == doctest::Approx(0.0).scale(1.0));
  CHECK(r.entropy_pass);
  CHECK(r.E1_target <= r.constants.entropy_bound);
  CHECK(r.adiabatic_infidelity <= r.adiabatic_bound);
  for (const auto& row : r.rows) CHECK(row.pass);
  CHECK(r.pass);
  const auto j = to_json(r);
  CHECK(j.contains("entropy_bound"));
}
