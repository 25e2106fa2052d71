#include "sie/rng.hpp"

#include <cmath>
#include <numbers>

namespace sie {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed) ^ mix(stream + kGolden)) {}

Rng::result_type Rng::operator()() { return mix(key_ + (++ctr_) * kGolden); }

Rng Rng::split(std::uint64_t stream) const {
  Rng r(0);
  r.key_ = mix(key_ ^ mix(stream * 0xD1B54A32D192ED03ull + 1));
  return r;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cplx Rng::cnormal() { return {normal() * std::numbers::sqrt2 / 2, normal() * std::numbers::sqrt2 / 2}; }

int Rng::below(int n) { return static_cast<int>(uniform() * n); }

Vec random_vector(Rng& rng, Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.cnormal();
  return v / v.norm();
}

Mat random_hermitian(Rng& rng, Eigen::Index n) {
  Mat g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.cnormal();
  Mat h = (g + g.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  const double nrm = es.eigenvalues().cwiseAbs().maxCoeff();
  return nrm > 0 ? Mat(h / nrm) : h;
}

Mat random_unitary(Rng& rng, Eigen::Index n) {
  Mat g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.cnormal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

}  // namespace sie
