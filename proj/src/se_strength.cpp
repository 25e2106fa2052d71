#include "sie/se_strength.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "sie/linalg.hpp"
#include "sie/rng.hpp"

namespace sie {

namespace {

Eigen::Index prod(const std::vector<int>& d) {
  Eigen::Index p = 1;
  for (int x : d) p *= x;
  return p;
}

}  // namespace

BipartiteOperator::BipartiteOperator(std::vector<int> dA, std::vector<int> dB, Mat m)
    : dims_A(std::move(dA)), dims_B(std::move(dB)), matrix(std::move(m)) {
  validate();
}

BipartiteOperator BipartiteOperator::from_terms(std::vector<int> dA, std::vector<int> dB,
                                                std::vector<OperatorTerm> terms) {
  const Eigen::Index a = prod(dA), b = prod(dB);
  Mat m = Mat::Zero(a * b, a * b);
  for (const auto& t : terms) {
    if (t.A.rows() != a || t.B.rows() != b) fail(Code::Mismatch, "term factor dimension");
    m += t.J * kron(t.A, t.B);
  }
  BipartiteOperator op(std::move(dA), std::move(dB), std::move(m));
  op.terms = std::move(terms);
  op.validate();
  return op;
}

Eigen::Index BipartiteOperator::dimA() const { return prod(dims_A); }
Eigen::Index BipartiteOperator::dimB() const { return prod(dims_B); }

void BipartiteOperator::validate() const {
  const Eigen::Index n = dimA() * dimB();
  if (matrix.rows() != n || matrix.cols() != n) fail(Code::Mismatch, "operator size differs from dims");
  if (terms) {
    Mat m = Mat::Zero(n, n);
    for (const auto& t : *terms) m += t.J * kron(t.A, t.B);
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((m - matrix).cwiseAbs().maxCoeff() > 1e-10 * scale)
      fail(Code::BadExpansion, "term decomposition does not reconstruct the matrix");
  }
}

double se_upper_from_decomposition(const BipartiteOperator& op) {
  if (!op.terms) fail(Code::NoDecomposition, "operator carries no term decomposition");
  double s = 0.0;
  for (const auto& t : *op.terms) {
    const double na = op_norm(t.A), nb = op_norm(t.B);
    if (std::abs(na - 1.0) > 1e-9 || std::abs(nb - 1.0) > 1e-9)
      fail(Code::BadExpansion, "decomposition factors must have unit operator norm");
    s += std::abs(t.J);
  }
  return s;
}

double se_upper_operator_schmidt(const BipartiteOperator& op) {
  const Eigen::Index dA = op.dimA(), dB = op.dimB();
  const Mat r = realign(op.matrix, dA, dB);
  Eigen::BDCSVD<Mat> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  double total = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] <= 1e-14 * std::max(1.0, s[0])) break;
    const Mat a = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        svd.matrixU().col(k).data(), dA, dA);
    const Vec vb = svd.matrixV().col(k).conjugate();
    const Mat b = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        vb.data(), dB, dB);
    total += s[k] * op_norm(a) * op_norm(b);
  }
  return total;
}

double se_upper_bound(const BipartiteOperator& op) {
  double best = static_cast<double>(std::min(op.dimA(), op.dimB())) * op_norm(op.matrix);
  best = std::min(best, se_upper_operator_schmidt(op));
  if (op.terms) best = std::min(best, se_upper_from_decomposition(op));
  if (op.analytic_se) best = std::min(best, *op.analytic_se);
  return best;
}

namespace {

// Alternating maximization of ||Psi||_p with Psi = op (phi_A (x) phi_B),
// phi_A an (dA x nA) matrix, phi_B an (dB x nB) matrix, ||phi||_F = 1.
// For p = 1 every half step is an exact maximization of a linear functional
// (given the polar factor W of Psi), so the objective never decreases.
class ProductSearch {
 public:
  ProductSearch(const BipartiteOperator& op, int nA, int nB, double p)
      : F_(op.matrix), dA_(op.dimA()), dB_(op.dimB()), nA_(nA), nB_(nB), p_(p) {
    cols_.reserve(dA_);
    for (Eigen::Index a0 = 0; a0 < dA_; ++a0) cols_.push_back(F_.middleCols(a0 * dB_, dB_));
  }

  // G_a0 = F[:, (a0, .)] * Y, each (dA dB) x nB.
  std::vector<Mat> contract_B(const Mat& Y) const {
    std::vector<Mat> g(dA_);
    for (Eigen::Index a0 = 0; a0 < dA_; ++a0) g[a0] = cols_[a0] * Y;
    return g;
  }

  Mat psi(const Mat& X, const std::vector<Mat>& g) const {
    Mat out = Mat::Zero(dA_ * nA_, dB_ * nB_);
    for (Eigen::Index a = 0; a < dA_; ++a)
      for (Eigen::Index b = 0; b < dB_; ++b)
        for (Eigen::Index a0 = 0; a0 < dA_; ++a0) {
          const auto row = g[a0].row(a * dB_ + b);
          for (Eigen::Index ap = 0; ap < nA_; ++ap) {
            const cplx x = X(a0, ap);
            if (x == cplx(0.0)) continue;
            out.block(a * nA_ + ap, b * nB_, 1, nB_) += x * row;
          }
        }
    return out;
  }

  double value(const Mat& X, const Mat& Y) const { return schatten(psi(X, contract_B(Y))); }

  double schatten(const Mat& m) const {
    const RVec s = singular_values(m);
    if (p_ == 1.0) return s.sum();
    const double floor = s.size() ? 1e-14 * s[0] : 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > floor) acc += std::pow(s[i], p_);
    return std::pow(acc, 1.0 / p_);
  }

  // Gradient-like dual element: the polar factor for p = 1, otherwise
  // U diag(sigma^{p-1}) V^dagger (scale irrelevant, steps are normalized).
  Mat dual(const Mat& m) const {
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& s = svd.singularValues();
    const double floor = s.size() ? 1e-12 * s[0] : 0.0;
    RVec w(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
      w[i] = s[i] > floor ? (p_ == 1.0 ? 1.0 : std::pow(s[i], p_ - 1.0)) : 0.0;
    return svd.matrixU() * w.asDiagonal() * svd.matrixV().adjoint();
  }

  // C(a0, a') = sum conj(W[(a,a'),(b,b')]) G_a0[(a,b), b'].
  Mat coeff_A(const Mat& W, const std::vector<Mat>& g) const {
    Mat c = Mat::Zero(dA_, nA_);
    for (Eigen::Index a0 = 0; a0 < dA_; ++a0)
      for (Eigen::Index a = 0; a < dA_; ++a)
        for (Eigen::Index b = 0; b < dB_; ++b) {
          const auto grow = g[a0].row(a * dB_ + b);
          for (Eigen::Index ap = 0; ap < nA_; ++ap)
            c(a0, ap) += (W.block(a * nA_ + ap, b * nB_, 1, nB_).conjugate().cwiseProduct(grow)).sum();
        }
    return c;
  }

  // D(b0, b') = sum conj(W[(a,a'),(b,b')]) H_a'[(a,b), b0],
  // H_a' = sum_a0 X(a0, a') F[:, (a0, .)].
  Mat coeff_B(const Mat& W, const Mat& X) const {
    Mat d = Mat::Zero(dB_, nB_);
    for (Eigen::Index ap = 0; ap < nA_; ++ap) {
      Mat h = Mat::Zero(dA_ * dB_, dB_);
      for (Eigen::Index a0 = 0; a0 < dA_; ++a0)
        if (X(a0, ap) != cplx(0.0)) h += X(a0, ap) * cols_[a0];
      for (Eigen::Index a = 0; a < dA_; ++a)
        for (Eigen::Index b = 0; b < dB_; ++b) {
          // d(b0, b') += sum_b' ... = h(row, b0) * conj(W(row', b')).
          const auto hrow = h.row(a * dB_ + b);                        // over b0
          const auto wrow = W.block(a * nA_ + ap, b * nB_, 1, nB_);  // over b'
          d.noalias() += hrow.transpose() * wrow.conjugate();
        }
    }
    return d;
  }

  static Mat normalize(const Mat& m) {
    const double n = m.norm();
    return n > 0 ? Mat(m / n) : m;
  }

  // One ascent step on one side; returns the new objective.
  double step_A(Mat& X, const Mat& Y, double current) const {
    const auto g = contract_B(Y);
    const Mat W = dual(psi(X, g));
    const Mat dir = normalize(coeff_A(W, g).conjugate());
    return accept(X, dir, current, [&](const Mat& Xc) { return schatten(psi(Xc, g)); });
  }

  double step_B(const Mat& X, Mat& Y, double current) const {
    const Mat W = dual(psi(X, contract_B(Y)));
    const Mat dir = normalize(coeff_B(W, X).conjugate());
    return accept(Y, dir, current, [&](const Mat& Yc) { return schatten(psi(X, contract_B(Yc))); });
  }

  Eigen::Index dA() const { return dA_; }
  Eigen::Index dB() const { return dB_; }

 private:
  template <class Eval>
  double accept(Mat& Z, const Mat& dir, double current, Eval eval) const {
    if (dir.norm() == 0.0) return current;
    // Full linearized maximizer first; for p = 1 it cannot lose. For p < 1
    // fall back to damped steps along the direction.
    double eta = -1.0;  // sentinel: replace Z by dir
    for (int k = 0; k < 30; ++k) {
      const Mat cand = eta < 0 ? dir : normalize(Z + eta * dir);
      const double v = eval(cand);
      if (v >= current) {
        Z = cand;
        return v;
      }
      eta = eta < 0 ? 1.0 : eta / 2;
    }
    return current;
  }

  const Mat& F_;
  Eigen::Index dA_, dB_, nA_, nB_;
  double p_;
  std::vector<Mat> cols_;
};

Mat random_factor(Rng& rng, Eigen::Index d, Eigen::Index n) {
  Mat m(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) = rng.cnormal();
  return m / m.norm();
}

// Seed 0: maximally entangled with the ancilla where possible (uniform
// superposition when the ancilla is trivial). Further seeds are Gaussian.
Mat seed_factor(Rng& rng, int seed, Eigen::Index d, Eigen::Index n) {
  if (seed == 0) {
    Mat m = Mat::Zero(d, n);
    if (n == 1) {
      m.setOnes();
    } else {
      for (Eigen::Index i = 0; i < std::min(d, n); ++i) m(i, i) = 1.0;
    }
    return m / m.norm();
  }
  return random_factor(rng, d, n);
}

struct RunResult {
  double value;
  Mat X, Y;
  std::vector<double> trace;
};

RunResult ascend(const ProductSearch& ps, Mat X, Mat Y, int iterations, double tol) {
  RunResult r{ps.value(X, Y), {}, {}, {}};
  r.trace.push_back(r.value);
  for (int it = 0; it < iterations; ++it) {
    const double before = r.value;
    r.value = ps.step_A(X, Y, r.value);
    r.value = ps.step_B(X, Y, r.value);
    r.trace.push_back(r.value);
    if (r.value - before < tol * std::max(1.0, std::abs(r.value))) break;
  }
  r.X = std::move(X);
  r.Y = std::move(Y);
  return r;
}

Vec flatten(const Mat& m) {
  // Row-major (system index major, ancilla minor).
  Vec v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

Mat unflatten(const Vec& v, Eigen::Index d, Eigen::Index n) {
  if (v.size() != d * n) fail(Code::Mismatch, "witness length");
  Mat m(d, n);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  return m;
}

SeEstimate search(const BipartiteOperator& op, double p, const SearchOptions& o, const std::string& tag) {
  op.validate();
  const int def = static_cast<int>(std::min(op.dimA(), op.dimB()));
  const int nA = o.ancilla_A > 0 ? o.ancilla_A : def;
  const int nB = o.ancilla_B > 0 ? o.ancilla_B : def;
  if (o.seeds < 1 || o.iterations < 0) fail(Code::BadArgument, "search needs >= 1 seed");

  SeEstimate est;
  est.method = tag;
  est.ancilla_A = nA;
  est.ancilla_B = nB;
  est.upper = se_upper_bound(op);

  const ProductSearch ps(op, nA, nB, p);
  RunResult best{-1.0, {}, {}, {}};
  const Rng root(o.rng_seed);

  auto consider = [&](RunResult r) {
    if (r.value > best.value) best = std::move(r);
  };

  if (o.warm_start && (nA > 1 || nB > 1)) {
    SearchOptions plain = o;
    plain.ancilla_A = plain.ancilla_B = 1;
    plain.warm_start = false;
    const SeEstimate base = search(op, p, plain, tag);
    Mat X = Mat::Zero(ps.dA(), nA), Y = Mat::Zero(ps.dB(), nB);
    X.col(0) = base.witness_A;
    Y.col(0) = base.witness_B;
    consider(ascend(ps, X, Y, o.iterations, o.tol));
  }
  for (int s = 0; s < o.seeds; ++s) {
    Rng rng = root.split(static_cast<std::uint64_t>(s));
    Mat X = seed_factor(rng, s, ps.dA(), nA);
    Mat Y = seed_factor(rng, s, ps.dB(), nB);
    consider(ascend(ps, std::move(X), std::move(Y), o.iterations, o.tol));
  }
  est.lower = std::max(0.0, best.value);
  est.witness_A = flatten(best.X);
  est.witness_B = flatten(best.Y);
  est.trace = std::move(best.trace);
  return est;
}

}  // namespace

double se_objective(const BipartiteOperator& op, const Vec& phi_A, int anc_A, const Vec& phi_B, int anc_B) {
  const ProductSearch ps(op, anc_A, anc_B, 1.0);
  return ps.value(unflatten(phi_A, op.dimA(), anc_A), unflatten(phi_B, op.dimB(), anc_B));
}

SeEstimate se_lower_search(const BipartiteOperator& op, const SearchOptions& opts) {
  return search(op, 1.0, opts, "alternating-polar");
}

SeEstimate alpha_se_lower_search(const BipartiteOperator& op, double alpha, const SearchOptions& opts) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(Code::AlphaOutOfRange, "alpha must lie in (0, 1]");
  if (std::abs(alpha - 0.5) < 1e-12) return se_lower_search(op, opts);
  SeEstimate e = search(op, 2.0 * alpha, opts, "alternating-schatten");
  // Only the alpha = 1/2 value has a proved upper bound here.
  e.upper = kInf;
  return e;
}

double se_subadditive_combine(const std::vector<std::pair<double, double>>& weighted_uppers) {
  double s = 0.0;
  for (const auto& [w, u] : weighted_uppers) {
    if (!(w >= 0.0)) fail(Code::BadWeight, "weights must be nonnegative");
    s += w * u;
  }
  return s;
}

AlphaBound alpha_se_bound_from_decay(double C0, double g_tilde, double kappa, double alpha) {
  const double lo = 1.0 / (2.0 * (1.0 + kappa));
  if (!(alpha > lo && alpha <= 0.5)) fail(Code::AlphaOutOfRange, "alpha outside (1/(2(1+kappa)), 1/2]");
  const double denom = 1.0 - std::pow(2.0, 1.0 - 2.0 * alpha * (1.0 + kappa));
  AlphaBound b;
  b.near_divergence = denom < 1e-6;
  const double inv = 1.0 / (2.0 * alpha);
  b.value = std::pow(2.0, inv - 1.0) * C0 * g_tilde / std::pow(std::max(denom, 1e-300), inv);
  if (!std::isfinite(b.value)) b.value = std::numeric_limits<double>::max();
  return b;
}

double long_range_se_bound(double J0, double eta) {
  if (!(eta > 2.0)) fail(Code::EtaTooSmall, "decay exponent must exceed 2");
  return eta * J0 / (eta - 2.0);
}

}  // namespace sie
