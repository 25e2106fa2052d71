#include "sie/linalg.hpp"

#include <Eigen/SVD>

namespace sie {

const char* code_name(Code c) {
  switch (c) {
    case Code::ZeroState: return "ZeroState";
    case Code::BadCut: return "BadCut";
    case Code::Unnormalized: return "Unnormalized";
    case Code::BadAlpha: return "BadAlpha";
    case Code::BadExpansion: return "BadExpansion";
    case Code::NoDecomposition: return "NoDecomposition";
    case Code::BadWeight: return "BadWeight";
    case Code::AlphaOutOfRange: return "AlphaOutOfRange";
    case Code::EtaTooSmall: return "EtaTooSmall";
    case Code::TimeTooLong: return "TimeTooLong";
    case Code::BelowThreshold: return "BelowThreshold";
    case Code::TooLarge: return "TooLarge";
    case Code::GapClosed: return "GapClosed";
    case Code::Degenerate: return "Degenerate";
    case Code::ZOutOfRange: return "ZOutOfRange";
    case Code::Mismatch: return "Mismatch";
    case Code::UnsupportedLocality: return "UnsupportedLocality";
    case Code::IntermediateTooLarge: return "IntermediateTooLarge";
    case Code::StepTooCoarse: return "StepTooCoarse";
    case Code::BoundVacuous: return "BoundVacuous";
    case Code::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

std::size_t total_dim(const std::vector<int>& dims, std::size_t cap) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d < 1) fail(Code::BadArgument, "site dimension must be positive");
    if (n > cap / static_cast<std::size_t>(d)) fail(Code::TooLarge, "Hilbert dimension exceeds cap");
    n *= static_cast<std::size_t>(d);
  }
  if (n > cap) fail(Code::TooLarge, "Hilbert dimension exceeds cap");
  return n;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

namespace pauli {
Mat I() { return Mat::Identity(2, 2); }
Mat X() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Mat Y() {
  Mat m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
Mat Z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double herm_norm(const Mat& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

HermEig::HermEig(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  evals = es.eigenvalues();
  evecs = es.eigenvectors();
}

Mat HermEig::apply(const std::function<cplx(double)>& f) const {
  Vec d(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) d[i] = f(evals[i]);
  return evecs * d.asDiagonal() * evecs.adjoint();
}

Mat expm_herm(const Mat& h, cplx z) {
  return HermEig(h).apply([z](double e) { return std::exp(z * e); });
}

Vec permute_sites(const Vec& amps, const std::vector<int>& dims, const std::vector<int>& perm) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n) fail(Code::Mismatch, "permutation length");
  std::vector<long long> in_stride(n), out_dims(n), out_stride(n);
  long long s = 1;
  for (int i = n - 1; i >= 0; --i) {
    in_stride[i] = s;
    s *= dims[i];
  }
  for (int k = 0; k < n; ++k) out_dims[k] = dims[perm[k]];
  s = 1;
  for (int k = n - 1; k >= 0; --k) {
    out_stride[k] = s;
    s *= out_dims[k];
  }
  Vec out(amps.size());
  std::vector<long long> digit(n, 0);
  for (long long x = 0; x < amps.size(); ++x) {
    // x is the output index; digits in output order.
    long long src = 0;
    for (int k = 0; k < n; ++k) src += digit[k] * in_stride[perm[k]];
    out[x] = amps[src];
    for (int k = n - 1; k >= 0; --k) {
      if (++digit[k] < out_dims[k]) break;
      digit[k] = 0;
    }
  }
  return out;
}

void apply_local_add(const Mat& op, const std::vector<int>& support, const std::vector<int>& dims,
                     const Vec& in, Vec& out, cplx coeff) {
  const int n = static_cast<int>(dims.size());
  std::vector<long long> stride(n);
  long long s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = s;
    s *= dims[i];
  }
  const int k = static_cast<int>(support.size());
  long long dl = 1;
  for (int q : support) dl *= dims[q];
  if (op.rows() != dl || op.cols() != dl) fail(Code::Mismatch, "local operator size");
  // off[l] = full-index offset of local configuration l.
  std::vector<long long> off(dl, 0);
  for (long long l = 0; l < dl; ++l) {
    long long rem = l;
    for (int j = k - 1; j >= 0; --j) {
      const int q = support[j];
      off[l] += (rem % dims[q]) * stride[q];
      rem /= dims[q];
    }
  }
  for (long long x = 0; x < in.size(); ++x) {
    const cplx v = in[x];
    if (v == cplx(0.0)) continue;
    long long l = 0, base = x;
    for (int j = 0; j < k; ++j) {
      const int q = support[j];
      const long long digit = (x / stride[q]) % dims[q];
      l = l * dims[q] + digit;
      base -= digit * stride[q];
    }
    const cplx cv = coeff * v;
    for (long long lp = 0; lp < dl; ++lp) {
      const cplx a = op(lp, l);
      if (a != cplx(0.0)) out[base + off[lp]] += a * cv;
    }
  }
}

Mat embed(const Mat& op, const std::vector<int>& support, const std::vector<int>& dims) {
  long long n = 1;
  for (int d : dims) n *= d;
  Mat full = Mat::Zero(n, n);
  Vec e = Vec::Zero(n), col(n);
  for (long long j = 0; j < n; ++j) {
    e.setZero();
    e[j] = 1.0;
    col.setZero();
    apply_local_add(op, support, dims, e, col);
    full.col(j) = col;
  }
  return full;
}

Mat realign(const Mat& x, Eigen::Index dA, Eigen::Index dB) {
  Mat r(dA * dA, dB * dB);
  for (Eigen::Index a = 0; a < dA; ++a)
    for (Eigen::Index ap = 0; ap < dA; ++ap)
      for (Eigen::Index b = 0; b < dB; ++b)
        for (Eigen::Index bp = 0; bp < dB; ++bp) r(a * dA + ap, b * dB + bp) = x(a * dB + b, ap * dB + bp);
  return r;
}

Mat unrealign(const Mat& r, Eigen::Index dA, Eigen::Index dB) {
  Mat x(dA * dB, dA * dB);
  for (Eigen::Index a = 0; a < dA; ++a)
    for (Eigen::Index ap = 0; ap < dA; ++ap)
      for (Eigen::Index b = 0; b < dB; ++b)
        for (Eigen::Index bp = 0; bp < dB; ++bp) x(a * dB + b, ap * dB + bp) = r(a * dA + ap, b * dB + bp);
  return x;
}

RVec singular_values(const Mat& m) {
  if (m.size() == 0) return RVec();
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues();
}

}  // namespace sie

namespace sie {

namespace {

// Ground pair of `op` by restarted Lanczos; returns (value, vector).
std::pair<double, Vec> lanczos_ground(const std::function<Vec(const Vec&)>& op, Vec v, double tol, int& matvecs) {
  const Eigen::Index n = v.size();
  const int m = static_cast<int>(std::min<Eigen::Index>(n, 120));
  double theta = 0.0;
  for (int restart = 0; restart < 200; ++restart) {
    std::vector<Vec> Q;
    std::vector<double> a, b;
    v /= v.norm();
    Q.push_back(v);
    for (int j = 0; j < m; ++j) {
      Vec w = op(Q[j]);
      ++matvecs;
      a.push_back(Q[j].dot(w).real());
      for (const Vec& q : Q) w -= q * q.dot(w);
      for (const Vec& q : Q) w -= q * q.dot(w);  // second pass keeps orthogonality tight
      const double beta = w.norm();
      if (j + 1 == m || beta < 1e-13) break;
      b.push_back(beta);
      Q.push_back(w / beta);
    }
    const int k = static_cast<int>(a.size());
    RMat T = RMat::Zero(k, k);
    for (int i = 0; i < k; ++i) T(i, i) = a[i];
    for (int i = 0; i + 1 < k; ++i) T(i, i + 1) = T(i + 1, i) = b[i];
    Eigen::SelfAdjointEigenSolver<RMat> es(T);
    theta = es.eigenvalues()[0];
    Vec x = Vec::Zero(n);
    for (int i = 0; i < k; ++i) x += es.eigenvectors()(i, 0) * Q[i];
    x /= x.norm();
    const Vec r = op(x) - theta * x;
    ++matvecs;
    v = x;
    if (r.norm() <= tol * std::max(1.0, std::abs(theta)) || k == n) break;
  }
  return {theta, v};
}

}  // namespace

LowEigen lowest_eigenpairs(const std::function<Vec(const Vec&)>& matvec, Eigen::Index dim, int k, double norm_bound,
                           std::uint64_t seed, double tol) {
  LowEigen out;
  const double shift = 2.0 * norm_bound + 1.0;
  for (int level = 0; level < k; ++level) {
    auto op = [&](const Vec& x) {
      Vec y = matvec(x);
      for (const Vec& g : out.evecs) y += shift * g * g.dot(x);
      return y;
    };
    Vec start(dim);
    std::uint64_t s = seed + 0x9E37u * static_cast<std::uint64_t>(level + 1);
    for (Eigen::Index i = 0; i < dim; ++i) {
      s = s * 6364136223846793005ull + 1442695040888963407ull;
      start[i] = cplx(static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5, 0.0);
    }
    for (const Vec& g : out.evecs) start -= g * g.dot(start);
    auto [val, vec] = lanczos_ground(op, start, tol, out.matvecs);
    for (const Vec& g : out.evecs) vec -= g * g.dot(vec);
    vec /= vec.norm();
    out.evals.push_back(val);
    out.evecs.push_back(vec);
  }
  return out;
}

}  // namespace sie
