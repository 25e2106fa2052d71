#include "sie/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace sie::kernels {

namespace scalar {

double norm_sq(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

cplx dot(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace scalar

#ifndef SIE_HAVE_AVX2_TU
namespace avx2 {
double norm_sq(const cplx* x, std::size_t n) { return scalar::norm_sq(x, n); }
cplx dot(const cplx* x, const cplx* y, std::size_t n) { return scalar::dot(x, y, n); }
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) { scalar::axpy(a, x, y, n); }
}  // namespace avx2
#endif

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(SIE_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

namespace {

Isa detect() {
  const char* env = std::getenv("SIE_FORCE_SCALAR");
  if (env && std::strcmp(env, "0") != 0 && *env) return Isa::Scalar;
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active() { return current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

double norm_sq(std::span<const cplx> x) {
  return active() == Isa::Avx2 ? avx2::norm_sq(x.data(), x.size()) : scalar::norm_sq(x.data(), x.size());
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) fail(Code::Mismatch, "dot: length mismatch");
  return active() == Isa::Avx2 ? avx2::dot(x.data(), y.data(), x.size())
                               : scalar::dot(x.data(), y.data(), x.size());
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  if (x.size() != y.size()) fail(Code::Mismatch, "axpy: length mismatch");
  if (active() == Isa::Avx2)
    avx2::axpy(a, x.data(), y.data(), x.size());
  else
    scalar::axpy(a, x.data(), y.data(), x.size());
}

}  // namespace sie::kernels
