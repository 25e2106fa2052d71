#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sie/dynamics.hpp"
#include "sie/linalg.hpp"
#include "sie/models.hpp"
#include "sie/rng.hpp"
#include "sie/spectra.hpp"
#include "test_util.hpp"

using namespace sie;

TEST_CASE("long-range Ising builder") {
  const auto two = build_long_range_ising(2, 1.0, 3.0);
  REQUIRE(two.terms.size() == 1);
  CHECK(two.terms[0].norm == doctest::Approx(1.0));

  const auto four = build_long_range_ising(4, 1.0, 3.0);
  bool found = false;
  for (const auto& t : four.terms)
    if (t.support == std::vector<int>{0, 3}) {
      found = true;
      CHECK(t.norm == doctest::Approx(1.0 / 27.0));
    }
  CHECK(found);

  const auto H = build_long_range_ising(6, 0.7, 3.0, {0.4, 0.2});
  // Summation oracle for g.
  double g = 0.0;
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (const auto& t : H.terms)
      if (std::find(t.support.begin(), t.support.end(), i) != t.support.end()) s += op_norm(t.matrix);
    g = std::max(g, s);
  }
  CHECK(H.g == doctest::Approx(g).epsilon(1e-12));
  CHECK(H.computed_g() == doctest::Approx(g).epsilon(1e-12));
  H.check_invariants();
  CHECK(H.pair_strength(2) <= 0.7 / 8.0 + 1e-12);
  CHECK_CODE(build_long_range_ising(4, 1.0, 2.0), Code::EtaTooSmall);
}

TEST_CASE("dense and term-wise application agree") {
  const auto H = build_long_range_ising(5, 0.5, 3.0, {1.0, 0.3});
  Rng rng(31);
  const Vec v = random_vector(rng, 32);
  CHECK((H.dense() * v - H.apply(v)).norm() <= 1e-12);
  CHECK(is_hermitian(H.dense()));
}

TEST_CASE("cut splitting") {
  const auto two = build_long_range_ising(2, 1.0, 3.0, {0.5, 0.0});
  const auto c = split_at_cut(two, 1);
  CHECK(c.V.size() == 1);
  CHECK(c.H_A.size() == 1);
  CHECK(c.H_A[0].support == std::vector<int>{0});

  const auto six = build_long_range_ising(6, 0.8, 3.0, {1.0, 0.0});
  for (int s = 1; s < 6; ++s) {
    const auto cut = split_at_cut(six, s);
    CHECK(cut.boundary_norm_sum <= 3.0 * 0.8 + 1e-12);
    CHECK(cut.H_A.size() + cut.H_B.size() + cut.V.size() == six.terms.size());
    // Exact partition: the pieces rebuild H.
    Mat sum = Mat::Zero(64, 64);
    for (const auto* part : {&cut.H_A, &cut.H_B, &cut.V})
      for (const auto& t : *part) sum += embed(t.matrix, t.support, six.dims());
    CHECK((sum - six.dense()).norm() <= 1e-12);
  }

  const auto nn = build_long_range_ising(6, 1.0, 3.0, {1.0, 0.0}, 2, 1);
  for (int s = 1; s < 6; ++s) CHECK(split_at_cut(nn, s).V.size() == 1);
  CHECK_CODE(split_at_cut(six, 0), Code::BadCut);
}

TEST_CASE("saturation dynamics closed forms") {
  const auto s = build_saturation_dynamics(4, 1.0, 10);
  CHECK(std::abs(s.renyi(0.5, 1.0) - 6.40402) <= 1e-4);
  CHECK(s.rate_lower_bound(1.0) == doctest::Approx(4.8));
  const double z = std::sqrt(4.0) * 1.0 * 1.0 / 10;
  CHECK(s.half_entropy_closed(1.0) == doctest::Approx(20.0 * std::log(std::cos(z) + 2.0 * std::sin(z))));

  const Vec pair = s.pair_state(0.1);
  CHECK(std::abs(pair[0] - std::cos(std::sqrt(4.0) * 0.1)) <= 1e-12);
  CHECK(pair.norm() == doctest::Approx(1.0));
}

TEST_CASE("saturation dynamics: staged dense simulation matches the per-pair formula") {
  const auto s = build_saturation_dynamics(1, 0.8, 2);
  const PureState psi = s.simulate_dense(1.0);
  const auto sp = schmidt_decompose(psi, Cut({0, 1, 2}, 6));
  CHECK(renyi_entropy(sp, 0.5) == doctest::Approx(s.renyi(0.5, 1.0)).epsilon(1e-10));
}

TEST_CASE("property: saturation rate bound inside the validity window") {
  for (int M : {1, 2, 4})
    for (double J : {0.5, 1.0})
      for (int n : {5, 10, 40}) {
        const auto s = build_saturation_dynamics(M, J, n);
        for (double t : {0.1, 0.5, 1.0, 2.0}) {
          if (t > s.validity_time()) continue;
          CHECK(s.renyi(0.5, t) / t >= s.rate_lower_bound(t) - 1e-12);
        }
      }
}

TEST_CASE("unbounded dynamics") {
  const auto u = build_unbounded_dynamics(16, 1.0, 1.0);
  // 30-digit evaluation of the spectrum sum.
  CHECK(u.renyi(0.25) == doctest::Approx(2.1336005978229).epsilon(1e-12));
  CHECK(u.lower_bound(0.25) == doctest::Approx(-0.46210).epsilon(1e-4));
  CHECK(u.renyi(0.25) >= u.lower_bound(0.25));
  CHECK(build_unbounded_dynamics(16, 1.0, 0.0).renyi(0.25) == doctest::Approx(0.0));
  CHECK_CODE(build_unbounded_dynamics(4, 1.0, 1.5), Code::TimeTooLong);

  // Exact simulation of the pulse sequence reproduces the closed-form spectrum.
  const auto small = build_unbounded_dynamics(4, 1.0, 0.8);
  const auto sp = schmidt_decompose(small.simulate_dense(), Cut::at(2, 4));
  const auto closed = small.spectrum();
  for (std::size_t i = 0; i < closed.size(); ++i) CHECK(sp.coeffs[i] == doctest::Approx(closed[i]).epsilon(1e-10));

  // Slope against log D0 stays in the window around (1 - 2a)/(1 - a), while
  // E_{1/2} never exceeds 2 J t.
  const double a = 0.25;
  std::vector<double> lx, ly;
  for (int D0 : {16, 64, 256, 1024}) {
    const auto ud = build_unbounded_dynamics(D0, 1.0, 1.0);
    lx.push_back(std::log(static_cast<double>(D0)));
    ly.push_back(ud.renyi(a));
    CHECK(ud.renyi(0.5) <= 2.0 + 1e-6);
  }
  const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
  CHECK(slope >= 0.6);
  CHECK(slope <= 1.0);
}

TEST_CASE("toy two-qubit model") {
  const auto toy = build_toy_two_qubit();
  CHECK(toy.rate(0.5, 0.3) == doctest::Approx(1.054984).epsilon(1e-6));
  CHECK(toy.rate(0.5, 1e-7) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(toy.rate(0.3, 1e-6) > toy.rate(0.3, 1e-4));
  CHECK(toy.rate(0.3, 1e-6) > 50.0);
  // Finite-difference oracle from dense evolution.
  const PureState start = PureState::basis({2, 2});
  for (double t : {0.1, 0.4, 0.7, 1.0})
    for (double a : {0.5, 0.75, 2.0}) {
      const double h = 1e-4;
      auto E = [&](double s) {
        return renyi_entropy(schmidt_decompose(evolve_dense(toy.H, start, s), Cut::at(1, 2)), a);
      };
      const double fd = (E(t + h) - E(t - h)) / (2 * h);
      CHECK(fd == doctest::Approx(toy.rate(a, t)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("Ising projector interaction") {
  const auto one = build_ising_projector_interaction(1);
  CHECK(one.matrix.rows() == 1);
  for (int N : {2, 5, 8}) {
    const auto V = build_ising_projector_interaction(N);
    CHECK(op_norm(V.matrix) == doctest::Approx(1.0));
    CHECK((V.matrix * V.matrix - V.matrix).norm() <= 1e-12);
  }
}

TEST_CASE("chain JSON round trip") {
  const auto H = build_long_range_ising(4, 0.5, 3.0, {0.7, -0.2});
  const auto back = chain_from_json(to_json(H));
  CHECK(back.n == H.n);
  CHECK(back.terms.size() == H.terms.size());
  CHECK((back.dense() - H.dense()).norm() <= 1e-15);
}
