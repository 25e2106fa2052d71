#include <doctest.h>

#include <vector>

#include "sie/kernels.hpp"
#include "sie/rng.hpp"

using namespace sie;

namespace {

std::vector<cplx> draw(Rng& rng, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& z : v) z = rng.cnormal();
  return v;
}

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
  Rng rng(11);
  for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 64u, 1001u}) {
    const auto x = draw(rng, n), y = draw(rng, n);
    double ns = 0.0;
    cplx d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ns += std::norm(x[i]);
      d += std::conj(x[i]) * y[i];
    }
    CHECK(kernels::scalar::norm_sq(x.data(), n) == doctest::Approx(ns).epsilon(1e-13));
    const cplx got = kernels::scalar::dot(x.data(), y.data(), n);
    CHECK(std::abs(got - d) <= 1e-12 * (1.0 + std::abs(d)));
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 unavailable; equivalence check skipped");
    return;
  }
  Rng rng(12);
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 31u, 257u, 4099u}) {
    const auto x = draw(rng, n), y = draw(rng, n);
    const double a = kernels::scalar::norm_sq(x.data(), n), b = kernels::avx2::norm_sq(x.data(), n);
    CHECK(std::abs(a - b) <= 1e-13 * a);
    const cplx da = kernels::scalar::dot(x.data(), y.data(), n), db = kernels::avx2::dot(x.data(), y.data(), n);
    CHECK(std::abs(da - db) <= 1e-12 * (1.0 + std::sqrt(a) * std::sqrt(kernels::scalar::norm_sq(y.data(), n))));
    auto y1 = y, y2 = y;
    const cplx c(0.3, -1.7);
    kernels::scalar::axpy(c, x.data(), y1.data(), n);
    kernels::avx2::axpy(c, x.data(), y2.data(), n);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(y1[i] - y2[i]));
    CHECK(diff <= 1e-14 * 8);
  }
}

TEST_CASE("dispatch selection and the Eigen wrappers") {
  const kernels::Isa before = kernels::active();
  kernels::select(kernels::Isa::Scalar);
  CHECK(kernels::active() == kernels::Isa::Scalar);
  Rng rng(13);
  const Vec v = Vec::NullaryExpr(33, [&] { return rng.cnormal(); });
  const Vec w = Vec::NullaryExpr(33, [&] { return rng.cnormal(); });
  const double s = kernels::norm_sq(v);
  const cplx ds = kernels::dot(v, w);
  kernels::select(kernels::Isa::Avx2);
  CHECK(kernels::active() == (kernels::avx2_available() ? kernels::Isa::Avx2 : kernels::Isa::Scalar));
  CHECK(kernels::norm_sq(v) == doctest::Approx(s).epsilon(1e-13));
  CHECK(std::abs(kernels::dot(v, w) - ds) <= 1e-12);
  CHECK(kernels::norm_sq(v) == doctest::Approx(v.squaredNorm()).epsilon(1e-13));
  CHECK(std::abs(kernels::dot(v, w) - v.dot(w)) <= 1e-12);
  Vec y = w;
  kernels::axpy(cplx(2.0, 1.0), v, y);
  CHECK((y - (w + cplx(2.0, 1.0) * v)).norm() <= 1e-13);
  kernels::select(before);
  CHECK(std::string(kernels::isa_name(kernels::Isa::Scalar)) == "scalar");
}
