#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sie/dynamics.hpp"
#include "sie/linalg.hpp"
#include "sie/models.hpp"
#include "sie/rng.hpp"
#include "test_util.hpp"

using namespace sie;

TEST_CASE("c_alpha anchors and limits") {
  CHECK(c_alpha(0.5) == doctest::Approx(2.0));
  CHECK(c_alpha(1.0) == doctest::Approx(4.0 / std::numbers::e));
  CHECK(c_alpha(kInf) == doctest::Approx(2.0));
  CHECK(c_alpha(1.0 + 1e-6) == doctest::Approx(4.0 / std::numbers::e).epsilon(1e-5));
  CHECK(c_alpha(1.0 - 1e-6) == doctest::Approx(4.0 / std::numbers::e).epsilon(1e-5));
  CHECK(c_alpha(0.5 + 1e-9) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(c_alpha(1e6) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK_CODE(c_alpha(0.4), Code::BelowThreshold);
}

TEST_CASE("property: toy rate never exceeds c_alpha") {
  const auto toy = build_toy_two_qubit();
  for (double a : {0.5, 0.6, 0.75, 1.0, 1.5, 2.0, 5.0, kInf}) {
    double sup = 0.0;
    for (int k = 1; k < 2000; ++k) sup = std::max(sup, std::abs(toy.rate(a, k * (std::numbers::pi / 2) / 2000)));
    CHECK(sup <= c_alpha(a) + 1e-9);
  }
}

TEST_CASE("propagator, Taylor evolution and expm agree") {
  Rng rng(41);
  const Mat H = random_hermitian(rng, 8);
  const PureState psi({2, 4}, random_vector(rng, 8));
  const Propagator P(H);
  for (double t : {0.0, 0.3, 2.5}) {
    const Vec a = P.evolve(psi.amps(), t);
    const Vec b = evolve_dense(H, psi, t).amps();
    const Vec c = expm_herm(H, cplx(0, -t)) * psi.amps();
    CHECK((a - c).norm() <= 1e-10);
    CHECK((b - c).norm() <= 1e-10);
  }
  const auto chain = build_long_range_ising(4, 0.5, 3.0, {0.6, 0.1});
  const PureState start({2, 2, 2, 2}, random_vector(rng, 16));
  CHECK((evolve_dense(chain, start, 0.7).amps() - evolve_dense(chain.dense(), start, 0.7).amps()).norm() <= 1e-10);
  CHECK_CODE(evolve_dense(Mat(Mat::Identity(4, 4)), start, 0.1), Code::Mismatch);
}

TEST_CASE("rate profile on the toy model") {
  const auto toy = build_toy_two_qubit();
  const auto samples = measure_rate_profile(toy.H, PureState::basis({2, 2}), Cut::at(1, 2), {0.3, 0.5, 1.0, 2.0},
                                            {0.2, 0.5, 1.0}, 1.0);
  REQUIRE(samples.size() == 12);
  for (const auto& s : samples) {
    if (s.alpha < 0.5) {
      CHECK(std::isnan(s.bound));
      CHECK(s.flag.find("below-threshold") != std::string::npos);
      continue;
    }
    CHECK(s.rate == doctest::Approx(toy.rate(s.alpha, s.t)).epsilon(1e-6).scale(1.0));
    CHECK(std::abs(s.rate) <= s.bound + 1e-6);
  }
  std::ostringstream csv;
  write_rate_csv(csv, samples);
  CHECK(csv.str().rfind("t,alpha,entropy,rate,bound,flag", 0) == 0);
  CHECK(csv.str().find("none") != std::string::npos);
}

TEST_CASE("property: rate bounded by c_alpha times the decomposition bound on random Hamiltonians") {
  Rng rng(42);
  for (int k = 0; k < 30; ++k) {
    std::vector<OperatorTerm> ts{{rng.cnormal(), random_hermitian(rng, 2), random_hermitian(rng, 3)}};
    ts.push_back({std::conj(ts[0].J), ts[0].A.adjoint(), ts[0].B.adjoint()});
    const auto V = BipartiteOperator::from_terms({2}, {3}, ts);
    const Mat H = V.matrix + kron(random_hermitian(rng, 2), Mat::Identity(3, 3));
    const PureState psi({2, 3}, random_vector(rng, 6));
    for (const auto& s : measure_rate_profile(H, psi, Cut::at(1, 2), {0.5, 1.0, kInf}, {0.3, 0.9}, se_upper_bound(V)))
      CHECK(std::abs(s.rate) <= s.bound + 1e-4);
  }
}

TEST_CASE("unitary SE growth stays under exp(SE t)") {
  const auto toy = build_toy_two_qubit();
  SearchOptions o;
  o.seeds = 2;
  for (const auto& g : check_unitary_se_growth(toy.H, {2}, {2}, {0.0, 0.2, 0.6}, 1.0, o)) {
    CHECK(g.lower <= g.cap + 1e-9);
    CHECK(g.lower >= 1.0 - 1e-9);
  }
}

TEST_CASE("adiabatic evolution") {
  const auto path = [](double nu) -> Mat { return -((1.0 - nu) * pauli::X() + nu * pauli::Z()); };
  Vec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const PureState start({2}, plus);
  double prev_err = kInf;
  for (double eps : {0.5, 0.1, 0.02}) {
    const auto r = adiabatic_evolve(path, start, eps);
    const double err = std::sqrt(std::max(0.0, 1.0 - std::norm(r.state.amps()[0])));
    CHECK(r.min_gap >= std::sqrt(2.0) - 1e-3);
    CHECK(err <= adiabatic_error_bound(1.0, std::sqrt(2.0), r.min_gap, eps) + 1e-9);
    CHECK(err <= prev_err + 1e-6);
    prev_err = err;
  }
  CHECK(adiabatic_error_bound(1.0, 1.0, 1.0, 0.1) == doctest::Approx(0.9));
  CHECK_CODE(adiabatic_evolve([](double) { return Mat(Mat::Zero(2, 2)); }, start, 0.1), Code::GapClosed);
  CHECK_CODE(adiabatic_evolve(path, start, 0.0), Code::BadArgument);
}
