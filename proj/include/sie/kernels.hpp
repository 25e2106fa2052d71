#pragma once

#include <cstddef>
#include <span>

#include "sie/core.hpp"

// Complex vector kernels used in the dense-state inner loops (norms, overlaps,
// quadrature accumulation, series summation). Each has a scalar reference and
// an AVX2+FMA variant; the variant is picked once at startup from CPUID.
namespace sie::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool avx2_available();

/// The ISA in use. Honors SIE_FORCE_SCALAR=1 in the environment.
Isa active();
/// Override the choice (tests, benchmarks). Falls back to Scalar if unsupported.
void select(Isa isa);

double norm_sq(std::span<const cplx> x);
cplx dot(std::span<const cplx> x, std::span<const cplx> y);  // sum conj(x_i) y_i
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);

namespace scalar {
double norm_sq(const cplx* x, std::size_t n);
cplx dot(const cplx* x, const cplx* y, std::size_t n);
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double norm_sq(const cplx* x, std::size_t n);
cplx dot(const cplx* x, const cplx* y, std::size_t n);
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
}  // namespace avx2

// Eigen conveniences.
inline double norm_sq(const Vec& v) { return norm_sq(std::span<const cplx>(v.data(), v.size())); }
inline cplx dot(const Vec& x, const Vec& y) {
  return dot(std::span<const cplx>(x.data(), x.size()), std::span<const cplx>(y.data(), y.size()));
}
inline void axpy(cplx a, const Vec& x, Vec& y) {
  axpy(a, std::span<const cplx>(x.data(), x.size()), std::span<cplx>(y.data(), y.size()));
}

}  // namespace sie::kernels
