#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sie/core.hpp"

namespace sie {

// Site ordering convention everywhere: site 0 is the most significant digit of
// the composite index, i.e. index = sum_i s_i * prod_{j>i} dims[j].

Mat kron(const Mat& a, const Mat& b);
Mat identity(Eigen::Index n);

namespace pauli {
Mat I();
Mat X();
Mat Y();
Mat Z();
}  // namespace pauli

/// Largest singular value.
double op_norm(const Mat& m);
/// Largest |eigenvalue| of a Hermitian matrix (cheaper than the SVD).
double herm_norm(const Mat& h);
bool is_hermitian(const Mat& m, double tol = 1e-12);

/// Spectral decomposition of a Hermitian matrix, ascending eigenvalues.
struct HermEig {
  RVec evals;
  Mat evecs;
  explicit HermEig(const Mat& h);
  /// V f(E) V^dagger.
  Mat apply(const std::function<cplx(double)>& f) const;
};

/// exp(z H) for Hermitian H and arbitrary complex z.
Mat expm_herm(const Mat& h, cplx z);

/// Permute tensor factors: output site k is input site perm[k].
Vec permute_sites(const Vec& amps, const std::vector<int>& dims, const std::vector<int>& perm);

/// Apply `op` (acting on the composite space of `support`, in support order)
/// to a state on sites with dimensions `dims`. Adds coeff*op*in to out.
void apply_local_add(const Mat& op, const std::vector<int>& support, const std::vector<int>& dims,
                     const Vec& in, Vec& out, cplx coeff = 1.0);

/// Embed an operator on `support` into the full space as a dense matrix.
Mat embed(const Mat& op, const std::vector<int>& support, const std::vector<int>& dims);

/// Operator-Schmidt realignment: for X on A (x) B returns R with
/// R[(a,a'),(b,b')] = X[(a,b),(a',b')].
Mat realign(const Mat& x, Eigen::Index dA, Eigen::Index dB);
Mat unrealign(const Mat& r, Eigen::Index dA, Eigen::Index dB);

/// Singular values (descending) of a general complex matrix.
RVec singular_values(const Mat& m);

struct LowEigen {
  std::vector<double> evals;  // ascending
  std::vector<Vec> evecs;
  int matvecs = 0;
};

/// Lowest `k` eigenpairs of a Hermitian operator given by its action:
/// restarted Lanczos with full reorthogonalization, one level at a time,
/// deflating converged vectors with a shift of 2*norm_bound.
LowEigen lowest_eigenpairs(const std::function<Vec(const Vec&)>& matvec, Eigen::Index dim, int k,
                           double norm_bound, std::uint64_t seed = 7, double tol = 1e-10);

}  // namespace sie
