// Built with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "sie/kernels.hpp"

namespace sie::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double norm_sq(const cplx* x, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(x);
  const std::size_t m = 2 * n;
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(p + i);
    const __m256d v1 = _mm256_loadu_pd(p + i + 4);
    a0 = _mm256_fmadd_pd(v0, v0, a0);
    a1 = _mm256_fmadd_pd(v1, v1, a1);
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < m; ++i) s += p[i] * p[i];
  return s;
}

cplx dot(const cplx* x, const cplx* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  const double* py = reinterpret_cast<const double*>(y);
  // Lanes hold (re, im) pairs. re accumulates x*y lane-wise (xr*yr + xi*yi
  // after the pair sum); im accumulates x*swap(y) = (xr*yi, xi*yr).
  __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d a = _mm256_loadu_pd(px + 2 * k);
    const __m256d b = _mm256_loadu_pd(py + 2 * k);
    re = _mm256_fmadd_pd(a, b, re);
    im = _mm256_fmadd_pd(a, _mm256_permute_pd(b, 0b0101), im);
  }
  alignas(32) double r[4], q[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(q, im);
  double sr = r[0] + r[1] + r[2] + r[3];
  double si = (q[0] - q[1]) + (q[2] - q[3]);
  for (; k < n; ++k) {
    sr += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    si += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {sr, si};
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d v = _mm256_loadu_pd(px + 2 * k);
    const __m256d t1 = _mm256_mul_pd(ar, v);
    const __m256d t2 = _mm256_mul_pd(ai, _mm256_permute_pd(v, 0b0101));
    // (ar*xr - ai*xi, ar*xi + ai*xr)
    const __m256d prod = _mm256_addsub_pd(t1, t2);
    _mm256_storeu_pd(py + 2 * k, _mm256_add_pd(_mm256_loadu_pd(py + 2 * k), prod));
  }
  for (; k < n; ++k) y[k] += a * x[k];
}

}  // namespace sie::kernels::avx2
