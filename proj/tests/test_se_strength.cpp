#include <doctest.h>

#include <cmath>

#include "sie/linalg.hpp"
#include "sie/models.hpp"
#include "sie/rng.hpp"
#include "sie/se_strength.hpp"
#include "sie/spectra.hpp"
#include "test_util.hpp"

using namespace sie;

namespace {

BipartiteOperator random_operator(Rng& rng, int dA, int dB, int terms) {
  std::vector<OperatorTerm> ts;
  for (int k = 0; k < terms; ++k) ts.push_back({rng.cnormal(), random_hermitian(rng, dA), random_hermitian(rng, dB)});
  return BipartiteOperator::from_terms({dA}, {dB}, ts);
}

BipartiteOperator swap2() {
  Mat S = Mat::Zero(4, 4);
  S(0, 0) = S(3, 3) = S(1, 2) = S(2, 1) = 1.0;
  return BipartiteOperator({2}, {2}, S);
}

SearchOptions no_ancilla() {
  SearchOptions o;
  o.ancilla_A = o.ancilla_B = 1;
  return o;
}

}  // namespace

TEST_CASE("upper bound from a decomposition") {
  const auto xx = BipartiteOperator::from_terms({2}, {2}, {{0.7, pauli::X(), pauli::X()}});
  CHECK(se_upper_from_decomposition(xx) == doctest::Approx(0.7));
  const auto zero = BipartiteOperator::from_terms({2}, {2}, {});
  CHECK(se_upper_from_decomposition(zero) == doctest::Approx(0.0));
  CHECK_CODE(se_upper_from_decomposition(BipartiteOperator({2}, {2}, Mat::Identity(4, 4))), Code::NoDecomposition);

  // 2M unit-norm pieces of the saturating coupling bound it by 2MJ.
  const int M = 4;
  std::vector<OperatorTerm> pieces;
  for (int j = 1; j <= M; ++j) {
    Mat up = Mat::Zero(5, 5), down = Mat::Zero(5, 5);
    up(j, 0) = 1.0;
    down(0, j) = 1.0;
    pieces.push_back({1.0, up, up});
    pieces.push_back({1.0, down, down});
  }
  const auto sat = BipartiteOperator::from_terms({5}, {5}, pieces);
  CHECK(se_upper_from_decomposition(sat) == doctest::Approx(2.0 * M));
  CHECK((sat.matrix - build_saturation_dynamics(M, 1.0, 1).V().matrix).norm() <= 1e-12);
}

TEST_CASE("search recovers the saturating value MJ") {
  const BipartiteOperator V = build_saturation_dynamics(4, 1.0, 1).V();
  const SeEstimate e = se_lower_search(V, no_ancilla());
  CHECK(e.lower == doctest::Approx(4.0).epsilon(1e-4 / 4.0));
  CHECK(e.lower <= e.upper + 1e-9);
}

TEST_CASE("swap needs an ancilla to reach sqrt 2") {
  SearchOptions o;
  o.ancilla_A = o.ancilla_B = 2;
  const SeEstimate e = se_lower_search(swap2(), o);
  CHECK(e.lower >= std::sqrt(2.0) - 1e-6);
  const SeEstimate plain = se_lower_search(swap2(), no_ancilla());
  CHECK(e.lower >= plain.lower - 1e-9);
}

TEST_CASE("Ising projector interaction has SE strength 1") {
  const SeEstimate e = se_lower_search(build_ising_projector_interaction(8), no_ancilla());
  CHECK(e.lower == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("witness reproduces the reported lower value") {
  Rng rng(21);
  const auto op = random_operator(rng, 2, 3, 2);
  SearchOptions o;
  o.seeds = 4;
  const SeEstimate e = se_lower_search(op, o);
  CHECK(se_objective(op, e.witness_A, e.ancilla_A, e.witness_B, e.ancilla_B) == doctest::Approx(e.lower).epsilon(1e-9));
}

TEST_CASE("subadditive combination") {
  CHECK(se_subadditive_combine({{1.0, 3.0}}) == doctest::Approx(3.0));
  CHECK(se_subadditive_combine({{0.5, 2.0}, {0.5, 2.0}}) == doctest::Approx(2.0));
  CHECK_CODE(se_subadditive_combine({{-0.1, 1.0}}), Code::BadWeight);
}

TEST_CASE("alpha-SE search") {
  const auto V = build_ising_projector_interaction(8);
  SearchOptions o = no_ancilla();
  o.seeds = 4;
  const SeEstimate half = alpha_se_lower_search(V, 0.5, o);
  const SeEstimate plain = se_lower_search(V, o);
  CHECK(half.lower == doctest::Approx(plain.lower).epsilon(1e-9));
  const SeEstimate quarter = alpha_se_lower_search(V, 0.25, o);
  CHECK(quarter.lower >= std::pow(8.0, 1.0 / (2 * 0.25) - 1.0) - 1e-6);
  const auto zero = BipartiteOperator::from_terms({2}, {2}, {});
  CHECK(alpha_se_lower_search(zero, 0.5, o).lower == doctest::Approx(0.0));
}

TEST_CASE("alpha bound from power-law decay") {
  CHECK(alpha_se_bound_from_decay(1.0, 1.0, 1.0, 0.5).value == doctest::Approx(2.0));
  CHECK(alpha_se_bound_from_decay(1.0, 1.0, 200.0, 0.5).value == doctest::Approx(1.0).epsilon(1e-12));
  const AlphaBound near = alpha_se_bound_from_decay(1.0, 1.0, 1.0, 0.25 + 1e-9);
  CHECK(near.near_divergence);
  CHECK(std::isfinite(near.value));
  CHECK_CODE(alpha_se_bound_from_decay(1.0, 1.0, 1.0, 0.2), Code::AlphaOutOfRange);
  CHECK_CODE(alpha_se_bound_from_decay(1.0, 1.0, 1.0, 0.6), Code::AlphaOutOfRange);
}

TEST_CASE("long-range SE bound") {
  CHECK(long_range_se_bound(1.0, 3.0) == doctest::Approx(3.0));
  CHECK(long_range_se_bound(0.0, 3.0) == doctest::Approx(0.0));
  CHECK(long_range_se_bound(2.0, 4.0) == doctest::Approx(4.0));
  CHECK_CODE(long_range_se_bound(1.0, 2.0), Code::EtaTooSmall);
}

TEST_CASE("property: lower <= upper on random operators") {
  Rng rng(22);
  SearchOptions o;
  o.seeds = 2;
  o.iterations = 60;
  for (int k = 0; k < 500; ++k) {
    const int dA = 2 + rng.below(2), dB = 2 + rng.below(2);
    const auto op = random_operator(rng, dA, dB, 1 + rng.below(3));
    o.rng_seed = static_cast<std::uint64_t>(k);
    const SeEstimate e = se_lower_search(op, o);
    CHECK(e.lower <= se_upper_bound(op) + 1e-9);
  }
}

TEST_CASE("property: more iterations and ancillas never lower the search value") {
  Rng rng(23);
  for (int k = 0; k < 10; ++k) {
    const auto op = random_operator(rng, 2, 3, 2);
    SearchOptions shortrun = no_ancilla(), longrun = no_ancilla();
    shortrun.iterations = 5;
    longrun.iterations = 200;
    shortrun.warm_start = longrun.warm_start = false;
    shortrun.rng_seed = longrun.rng_seed = static_cast<std::uint64_t>(100 + k);
    const double a = se_lower_search(op, shortrun).lower, b = se_lower_search(op, longrun).lower;
    CHECK(b >= a - 1e-9);
    SearchOptions anc;
    anc.ancilla_A = anc.ancilla_B = 2;
    anc.rng_seed = longrun.rng_seed;
    CHECK(se_lower_search(op, anc).lower >= b - 1e-9);
  }
}
