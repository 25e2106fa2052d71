#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "sie/linalg.hpp"
#include "sie/lowrank.hpp"
#include "sie/models.hpp"
#include "sie/rng.hpp"
#include "test_util.hpp"

using namespace sie;

TEST_CASE("Kolmogorov width bounds") {
  const auto b = kolmogorov_bounds(16, 4);
  CHECK(b.lower == doctest::Approx(0.060945).epsilon(1e-5));
  CHECK(b.upper == doctest::Approx(2.0 * std::sqrt(std::log(16.0) / 4.0)).epsilon(1e-14));
  CHECK(b.upper == doctest::Approx(1.665128).epsilon(2e-5));
  // Direct formula evaluation.
  const double lo = 0.5 * std::min(2.0 / (1.0 + 4.0 * std::log(9.0)) * std::log(std::numbers::e * 16 / 4) / 4, 1.0);
  CHECK(b.lower == doctest::Approx(lo).epsilon(1e-14));
  CHECK(kolmogorov_bounds(1 << 20, 1).lower == doctest::Approx(0.5));
}

TEST_CASE("rank-constrained identity fit") {
  FitOptions o;
  o.seeds = 8;
  const auto two = rank_constrained_identity_fit(2, 1, o);
  CHECK(two.numeric_estimate == doctest::Approx(0.5).epsilon(1e-9));
  // Grid-search oracle over symmetric rank-1 W = a * ones and W = v v^T.
  double grid = 1.0;
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 200; ++j) {
      const double x = -1.0 + 0.01 * i, y = -1.0 + 0.01 * j;
      grid = std::min(grid, std::max({std::abs(1 - x * x), std::abs(1 - y * y), std::abs(x * y)}));
    }
  CHECK(two.numeric_estimate <= grid + 1e-9);
  CHECK(rank_constrained_identity_fit(5, 5, o).numeric_estimate == doctest::Approx(0.0));
  for (int N : {3, 6})
    for (int D : {1, 2}) {
      const auto r = rank_constrained_identity_fit(N, D, o);
      CHECK(r.numeric_estimate <= 0.5 + 1e-9);
      CHECK(r.numeric_estimate >= r.lower_bound - 1e-6);
      // The witness has the claimed rank and value.
      Eigen::JacobiSVD<RMat> svd(r.witness);
      int rank = 0;
      for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) rank += svd.singularValues()[k] > 1e-9;
      CHECK(rank <= D);
      CHECK((RMat::Identity(N, N) - r.witness).cwiseAbs().maxCoeff() == doctest::Approx(r.numeric_estimate));
    }
}

TEST_CASE("no-go bound and experiment") {
  CHECK(no_go_lower_bound(0.2) == doctest::Approx(0.078597).epsilon(1e-5));
  CHECK(no_go_lower_bound(0.4) == doctest::Approx(0.108175).epsilon(1e-5));
  CHECK(no_go_lower_bound(0.0) == doctest::Approx(0.0));

  FitOptions o;
  o.seeds = 8;
  const auto r = no_go_experiment(16, 1, 0.3, o);
  CHECK(r.estimate >= 0.095);
  CHECK(r.estimate >= r.chain_value - 1e-9);
  CHECK(r.estimate <= r.upper + 1e-9);
  const auto full = no_go_experiment(4, 4, 0.3, o);
  CHECK(full.estimate <= std::exp(0.3) - 1.3 + 1e-9);

  std::ostringstream csv;
  write_width_csv(csv, {rank_constrained_identity_fit(2, 1, o)}, {r});
  CHECK(csv.str().find("N,D") == 0);
}

TEST_CASE("ordered-simplex moments") {
  CHECK(simplex_moment({3}) == Rational(1, 4));
  CHECK(simplex_moment({0, 0}) == Rational(1, 2));
  CHECK(simplex_moment({0, 0, 0}) == Rational(1, 6));
  // Two-variable closed form 1/((q2+1)(q1+q2+2)).
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) CHECK(simplex_moment({a, b}) == Rational(1, (b + 1) * (a + b + 2)));
  CHECK(simplex_moment_double({2, 1}) == doctest::Approx(1.0 / 10.0));
}

TEST_CASE("property: simplex moments agree with Monte Carlo") {
  Rng rng(61);
  const std::vector<std::vector<int>> qs = {{1, 2}, {0, 3, 1}, {2, 2, 2, 2}, {8}, {1, 1, 1, 1, 1, 1, 1, 1}};
  for (const auto& q : qs) {
    const int s = static_cast<int>(q.size());
    const int samples = 1'000'000;
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> x(s);
    for (int k = 0; k < samples; ++k) {
      for (double& v : x) v = rng.uniform();
      std::sort(x.begin(), x.end(), std::greater<>());
      double p = 1.0;
      for (int i = 0; i < s; ++i) p *= std::pow(x[i], q[i]);
      sum += p;
      sum_sq += p * p;
    }
    double fact = 1.0;
    for (int i = 2; i <= s; ++i) fact *= i;
    const double mean = sum / samples;
    const double sigma = std::sqrt(std::max(0.0, sum_sq / samples - mean * mean) / samples);
    CHECK(std::abs(mean / fact - simplex_moment_double(q)) <= 3.0 * sigma / fact + 1e-15);
  }
}

TEST_CASE("merge series") {
  using namespace pauli;
  const Mat H0 = 0.5 * (kron(Z(), I()) + kron(I(), Z()));
  const std::vector<MergeTerm> terms{{1, Mat(0.5 * kron(X(), X())), {0, 1}}};

  const MergeSeries s = build_merge_series(H0, terms, cplx(0, 0.1), 4, 4, 4, 1.0, 4.0, 1.0);
  const double bound = std::pow(2.0, -5) * std::exp(1.0 / (2 * std::numbers::e)) +
                       2.0 * std::pow(2.0, -5) * std::exp(3.0 / (4 * std::numbers::e));
  CHECK(s.error_bound == doctest::Approx(bound));
  CHECK(s.error <= bound);
  // Dense oracle for the exact operator.
  const Mat exact = expm_herm(H0, cplx(0, -0.1)) * expm_herm(H0 + terms[0].V, cplx(0, 0.1));
  CHECK((exact - s.exact).norm() <= 1e-12);

  const MergeSeries zero = build_merge_series(H0, {{1, Mat(Mat::Zero(4, 4)), {0, 1}}}, cplx(0, 0.1), 2, 2, 2, 1.0, 4.0, 1.0);
  CHECK((zero.series - Mat::Identity(4, 4)).norm() <= 1e-14);

  // s0 = M = Q = ceil(log2(2/eps)) gives error <= eps.
  for (double eps : {0.25, 0.05}) {
    const int o = static_cast<int>(std::ceil(std::log2(2.0 / eps)));
    CHECK(build_merge_series(H0, terms, cplx(0, 0.1), o, o, o, 1.0, 4.0, 1.0).error <= eps);
  }
  CHECK_CODE(build_merge_series(H0, terms, cplx(0, 1.0), 2, 2, 2, 1.0, 4.0, 1.0), Code::ZOutOfRange);
  CHECK(merge_bin(1, 1.0) == 0);
  CHECK(merge_bin(4, 1.0) == 1);
  CHECK(merge_bin(15, 1.0) == 1);
  CHECK(merge_bin(16, 1.0) == 2);
}

TEST_CASE("property: merge-series error is monotone in each order") {
  Rng rng(62);
  for (int k = 0; k < 20; ++k) {
    const Mat H0 = kron(random_hermitian(rng, 2), Mat::Identity(2, 2)) + kron(Mat::Identity(2, 2), random_hermitian(rng, 2));
    std::vector<MergeTerm> terms{{1, Mat(0.5 * kron(random_hermitian(rng, 2), random_hermitian(rng, 2))), {0, 1}},
                                 {2, Mat(0.2 * kron(random_hermitian(rng, 2), random_hermitian(rng, 2))), {0, 1}}};
    const double zmax = build_merge_series(H0, terms, cplx(0, 0.0), 1, 1, 1, 1.0, 4.0, 1.0).Q0_inv;
    const cplx z(0.3 * zmax * rng.normal(), 0.6 * zmax);
    // Orders held at 3 leave an error floor; above it the error wobbles by a few percent.
    const double floor = build_merge_series(H0, terms, z, 3, 3, 3, 1.0, 4.0, 1.0).error;
    double prev[3] = {kInf, kInf, kInf};
    for (int o = 1; o <= 5; ++o) {
      const double e[3] = {build_merge_series(H0, terms, z, o, 3, 3, 1.0, 4.0, 1.0).error,
                           build_merge_series(H0, terms, z, 3, o, 3, 1.0, 4.0, 1.0).error,
                           build_merge_series(H0, terms, z, 3, 3, o, 1.0, 4.0, 1.0).error};
      for (int i = 0; i < 3; ++i) {
        CHECK(e[i] <= prev[i] * (1.0 + 1e-9) + 0.1 * floor);
        prev[i] = e[i];
      }
    }
  }
}

TEST_CASE("truncation theorem parameters") {
  // Q = 2gk with g = 1, k = 2: the Q part of the min is 1/16.
  const auto p = truncation_theorem_params(1.0 / 16.0, 4.0, 1.0, 0.01, 1.0, 4.0);
  CHECK(p.Q0 == doctest::Approx(16.0));
  CHECK(p.m_real == 1);
  CHECK(p.log_sr_real == doctest::Approx((6.0 + 4.0 + 2.0) * std::log(8.0)));
  CHECK(p.log_sr_imag == doctest::Approx(2.0 * 12.0 * std::log(48.0)));
  CHECK(truncation_theorem_params(0.0, 4.0, 1.0, 1.0, 1.0, 4.0).log_sr_real == doctest::Approx(0.0));
  CHECK_CODE(truncation_theorem_params(1.0, 0.0, 1.0, 1.0, 1.0, 4.0), Code::BadArgument);
}

TEST_CASE("long-range decomposition tail bound") {
  for (double eta : {2.5, 3.0, 4.0}) {
    const auto H = build_long_range_ising(10, 1.0, eta);
    for (int s : {3, 5}) {
      const auto c = long_range_decomposition_check(H, s);
      CHECK(c.kappa == doctest::Approx((eta - 2.0) / 3.0));
      CHECK(c.g_tilde <= 4.0 * (1.0 + 1.0 / (eta - 2.0)) + 1e-12);
      // Direct summation oracle of the tails.
      const auto terms = boundary_terms(H, s);
      double total = 0.0;
      for (const auto& t : terms) total += op_norm(t.V);
      CHECK(c.tails.front() == doctest::Approx(total));
      for (std::size_t D = 0; D < c.tails.size(); ++D) CHECK(c.tails[D] <= c.bounds[D] + 1e-12);
      CHECK(c.pass);
      for (std::size_t j = 1; j < terms.size(); ++j) CHECK(terms[j].j == terms[j - 1].j + 1);
    }
  }
}
