#include "sie/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sie/io.hpp"
#include "sie/linalg.hpp"
#include "sie/rng.hpp"

namespace sie {

WidthBounds kolmogorov_bounds(int N, int D) {
  if (D < 1 || N < D) fail(Code::BadArgument, "need 1 <= D <= N");
  WidthBounds b;
  const double c = 2.0 / (1.0 + 4.0 * std::log(9.0));
  b.lower = 0.5 * std::min(c * std::log(std::numbers::e * N / D) / D, 1.0);
  b.upper = 2.0 * std::sqrt(std::log(static_cast<double>(N)) / D);
  return b;
}

namespace {

template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
T draw(Rng& rng);
template <>
double draw<double>(Rng& rng) {
  return rng.normal();
}
template <>
cplx draw<cplx>(Rng& rng) {
  return rng.cnormal();
}

// Chebyshev fit: u minimizing max_j |b_j - (A u)_j| by Lawson reweighting,
// started from `u`. Returns the best max residual and leaves the best u.
template <class T>
double chebyshev_fit(const MatT<T>& A, const VecT<T>& b, VecT<T>& u, int passes) {
  const Eigen::Index n = A.rows();
  double best = (b - A * u).cwiseAbs().maxCoeff();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int it = 0; it < passes; ++it) {
    const MatT<T> Aw = w.cwiseSqrt().asDiagonal() * A;
    const VecT<T> bw = w.cwiseSqrt().asDiagonal() * b;
    MatT<T> G = Aw.adjoint() * Aw;
    G.diagonal().array() += 1e-14 * std::max(1.0, G.cwiseAbs().maxCoeff());
    const VecT<T> cand = G.ldlt().solve(Aw.adjoint() * bw);
    const Eigen::VectorXd r = (b - A * cand).cwiseAbs();
    const double m = r.maxCoeff();
    if (m < best) {
      best = m;
      u = cand;
    }
    const Eigen::VectorXd nw = w.cwiseProduct(r);
    const double s = nw.sum();
    if (!(s > 0.0)) break;
    w = nw / s;
  }
  return best;
}

template <class T>
struct FitState {
  MatT<T> U, V;  // W = U V^T
  double value = kInf;
};

template <class T>
FitState<T> alternate(const MatT<T>& target, FitState<T> st, const FitOptions& o) {
  const Eigen::Index N = target.rows(), C = target.cols();
  for (int sweep = 0; sweep < o.sweeps; ++sweep) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      VecT<T> u = st.U.row(i).transpose();
      worst = std::max(worst, chebyshev_fit<T>(st.V, target.row(i).transpose(), u, o.lawson));
      st.U.row(i) = u.transpose();
    }
    worst = 0.0;
    for (Eigen::Index j = 0; j < C; ++j) {
      VecT<T> v = st.V.row(j).transpose();
      worst = std::max(worst, chebyshev_fit<T>(st.U, target.col(j), v, o.lawson));
      st.V.row(j) = v.transpose();
    }
    const double prev = st.value;
    st.value = worst;
    if (prev - worst < 1e-12) break;
  }
  st.value = (target - st.U * st.V.transpose()).cwiseAbs().maxCoeff();
  return st;
}

template <class T>
FitState<T> factor_of(const MatT<T>& W, int D) {
  Eigen::JacobiSVD<MatT<T>> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int k = static_cast<int>(std::min<Eigen::Index>(D, svd.singularValues().size()));
  FitState<T> st;
  st.U = MatT<T>::Zero(W.rows(), D);
  st.V = MatT<T>::Zero(W.cols(), D);
  for (int c = 0; c < k; ++c) {
    const double s = std::sqrt(svd.singularValues()[c]);
    st.U.col(c) = svd.matrixU().col(c) * s;
    st.V.col(c) = svd.matrixV().col(c).conjugate() * s;
  }
  return st;
}

template <class T>
FitState<T> best_fit(const MatT<T>& target, int D, const std::vector<MatT<T>>& candidates, const FitOptions& o,
                     std::string* kind) {
  FitState<T> best;
  auto consider = [&](FitState<T> st, const char* tag) {
    st.value = (target - st.U * st.V.transpose()).cwiseAbs().maxCoeff();
    if (st.value < best.value) {
      best = st;
      if (kind) *kind = tag;
    }
    st = alternate<T>(target, st, o);
    if (st.value < best.value - 1e-15) {
      best = st;
      if (kind) *kind = "search";
    }
  };
  for (const auto& c : candidates) consider(factor_of<T>(c, D), "candidate");
  const Rng root(o.rng_seed);
  for (int s = 0; s < o.seeds; ++s) {
    Rng rng = root.split(static_cast<std::uint64_t>(s));
    FitState<T> st;
    st.U.resize(target.rows(), D);
    st.V.resize(target.cols(), D);
    for (Eigen::Index i = 0; i < st.U.size(); ++i) st.U.data()[i] = draw<T>(rng) / std::sqrt(double(D));
    for (Eigen::Index i = 0; i < st.V.size(); ++i) st.V.data()[i] = draw<T>(rng) / std::sqrt(double(D));
    consider(st, "search");
  }
  return best;
}

}  // namespace

WidthResult rank_constrained_identity_fit(int N, int D, const FitOptions& opts) {
  if (N < 1 || D < 1) fail(Code::BadArgument, "need N, D >= 1");
  if (N > 64) fail(Code::TooLarge, "identity fit is desk-scale (N <= 64)");
  WidthResult r;
  r.N = N;
  r.D = D;
  if (D <= N) {
    const WidthBounds b = kolmogorov_bounds(N, D);
    r.lower_bound = b.lower;
    r.upper_bound = b.upper;
  }
  if (D >= N) {
    r.numeric_estimate = 0.0;
    r.witness = RMat::Identity(N, N);
    r.witness_kind = "identity";
    return r;
  }
  const RMat I = RMat::Identity(N, N);
  std::string kind;
  const std::vector<RMat> cands = {RMat::Constant(N, N, 0.5)};
  auto st = best_fit<double>(I, D, cands, opts, &kind);
  r.numeric_estimate = st.value;
  r.witness = st.U * st.V.transpose();
  r.witness_kind = kind == "candidate" ? "all-half" : kind;
  return r;
}

ComplexFit rank_constrained_fit(const Mat& target, int D, const std::vector<Mat>& candidates, const FitOptions& opts) {
  if (D < 1) fail(Code::BadArgument, "rank must be >= 1");
  auto st = best_fit<cplx>(target, D, candidates, opts, nullptr);
  return {st.value, st.U * st.V.transpose()};
}

double no_go_lower_bound(double t) { return 1.0 + 1.5 * t - std::exp(t); }

NoGoReport no_go_experiment(int N, int D, double t, const FitOptions& opts) {
  if (N < 1 || N > 32) fail(Code::BadArgument, "no-go experiment needs 1 <= N <= 32");
  if (D < 1) fail(Code::BadArgument, "rank must be >= 1");
  NoGoReport r;
  r.N = N;
  r.D = D;
  r.t = t;
  r.lower = no_go_lower_bound(t);

  // The propagator of the projector sum is diagonal in |s s'>; its diagonal
  // reshaped as N x N is the fit target.
  const BipartiteOperator V = build_ising_projector_interaction(N);
  const Mat U = expm_herm(V.matrix, -kI * t);
  Mat target(N, N);
  for (int s = 0; s < N; ++s)
    for (int sp = 0; sp < N; ++sp) target(s, sp) = U(s * N + sp, s * N + sp);
  const Mat offdiag = U - Mat(U.diagonal().asDiagonal());
  r.offdiag_leak = offdiag.cwiseAbs().maxCoeff();

  const cplx mean = 0.5 * (1.0 + std::exp(-kI * t));
  r.upper = D >= N ? 0.0 : std::sin(0.5 * t);
  std::vector<Mat> cands = {Mat::Constant(N, N, mean)};
  if (D >= N) cands.push_back(target);
  const ComplexFit fit = rank_constrained_fit(target, D, cands, opts);
  r.estimate = fit.value;

  if (N <= 16) {
    // Witness as a diagonal operator: sum_k diag(a_k) (x) diag(b_k).
    Mat Ud = Mat::Zero(N * N, N * N);
    for (int s = 0; s < N; ++s)
      for (int sp = 0; sp < N; ++sp) Ud(s * N + sp, s * N + sp) = fit.witness(s, sp);
    const RVec sv = singular_values(realign(Ud, N, N));
    r.witness_rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv[k] > 1e-10 * std::max(1.0, sv[0])) ++r.witness_rank;
  }
  FitOptions small = opts;
  small.seeds = std::min(opts.seeds, 8);
  r.identity_fit = rank_constrained_identity_fit(N, D, small).numeric_estimate;
  r.chain_value = t * r.identity_fit - (std::exp(t) - 1.0 - t);
  return r;
}

void write_width_csv(std::ostream& out, const std::vector<WidthResult>& widths, const std::vector<NoGoReport>& nogo) {
  io::CsvWriter w(out);
  w.row({"N", "D", "t", "lower", "estimate", "upper"});
  for (const auto& r : widths)
    w.row({std::to_string(r.N), std::to_string(r.D), "", io::fmt_double(r.lower_bound),
           io::fmt_double(r.numeric_estimate), io::fmt_double(r.upper_bound)});
  for (const auto& r : nogo)
    w.row({std::to_string(r.N), std::to_string(r.D), io::fmt_double(r.t), io::fmt_double(r.lower),
           io::fmt_double(r.estimate), io::fmt_double(r.upper)});
}

// ---- simplex moments -------------------------------------------------------

Rational simplex_moment(const std::vector<int>& q) {
  // Innermost integrals first: after integrating x_s..x_j the remaining
  // factor is x_{j-1}^{L_j} / prod, with L_j = sum_{i >= j} (q_i + 1).
  Rational r = 1;
  long long L = 0;
  for (auto it = q.rbegin(); it != q.rend(); ++it) {
    if (*it < 0) fail(Code::BadArgument, "moment orders must be nonnegative");
    L += *it + 1;
    r /= Rational(L);
  }
  return r;
}

double simplex_moment_double(const std::vector<int>& q) { return static_cast<double>(simplex_moment(q)); }

// ---- merge series ----------------------------------------------------------

int merge_bin(int j, double kappa) {
  if (j < 1) fail(Code::BadArgument, "decomposition index starts at 1");
  // r_m = 4^{m/kappa} <= j  <=>  m <= kappa log4 j
  int m = static_cast<int>(std::floor(kappa * std::log(static_cast<double>(j)) / std::log(4.0) + 1e-12));
  while (m > 0 && std::pow(4.0, m / kappa) > j * (1.0 + 1e-12)) --m;
  while (std::pow(4.0, (m + 1) / kappa) <= j) ++m;
  return m;
}

MergeSeries build_merge_series(const Mat& H0, std::vector<MergeTerm> terms, cplx z, int s0, int M, int Q,
                               double kappa, double D0, double C0, const MergeOptions& opts) {
  if (s0 < 0 || M < 0 || Q < 0) fail(Code::BadArgument, "series orders must be nonnegative");
  if (!(kappa > 0.0) || D0 < 1.0 || C0 < 1.0) fail(Code::BadArgument, "need kappa > 0, D0 >= 1, C0 >= 1");
  const Eigen::Index n = H0.rows();
  if (static_cast<std::size_t>(n) > opts.dim_cap) fail(Code::TooLarge, "merge series is dense desk-scale only");
  MergeSeries ms;
  ms.z = z;
  ms.s0 = s0;
  ms.M = M;
  ms.Q = Q;
  ms.kappa = kappa;
  ms.D0 = D0;
  ms.C0 = C0;
  ms.Q_param = opts.Q_param.value_or(2.0 * herm_norm(H0));

  Mat Vsum = Mat::Zero(n, n);
  std::vector<double> norms(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].V.rows() != n) fail(Code::Mismatch, "term dimension differs from H0");
    norms[i] = op_norm(terms[i].V);
    ms.g_tilde += norms[i];
    Vsum += terms[i].V;
  }
  const double a = ms.Q_param > 0.0 ? 1.0 / (4.0 * ms.Q_param) : kInf;
  const double b = ms.g_tilde > 0.0 ? 1.0 / (4.0 * std::numbers::e * C0 * ms.g_tilde) : kInf;
  ms.Q0_inv = std::min(a, b);
  if (std::abs(z) > ms.Q0_inv * (1.0 + 1e-12)) fail(Code::ZOutOfRange, "|z| exceeds 1/Q0");

  // Bins, members sorted by descending norm then support.
  std::vector<std::size_t> order(terms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const int bx = merge_bin(terms[x].j, kappa), by = merge_bin(terms[y].j, kappa);
    if (bx != by) return bx < by;
    if (norms[x] != norms[y]) return norms[x] > norms[y];
    return terms[x].support < terms[y].support;
  });
  for (std::size_t i : order) {
    const int m = merge_bin(terms[i].j, kappa);
    while (static_cast<int>(ms.bins.size()) <= m) {
      ms.bins.push_back(Mat::Zero(n, n));
      ms.bin_members.emplace_back();
    }
    ms.bins[m] += terms[i].V;
    ms.bin_members[m].push_back(terms[i].j);
  }
  const int nbins = static_cast<int>(ms.bins.size());

  // A[m][q] = ((-z)^q / q!) ad_{H0}^q (V_{r_m}).
  std::vector<std::vector<Mat>> A(nbins, std::vector<Mat>(Q + 1));
  for (int m = 0; m < nbins; ++m) {
    Mat ad = ms.bins[m];
    cplx c = 1.0;
    for (int q = 0; q <= Q; ++q) {
      A[m][q] = c * ad;
      ad = H0 * ad - ad * H0;
      c *= -z / static_cast<double>(q + 1);
    }
  }

  // T_k(mm, qq): sum over length-k suffixes with the given order sums of the
  // products weighted by their partial simplex moments. The denominator for a
  // new leftmost factor is (sum of q in the suffix) + k.
  auto idx = [&](int mm, int qq) { return static_cast<std::size_t>(mm * (Q + 1) + qq); };
  std::vector<Mat> T((M + 1) * (Q + 1), Mat::Zero(n, n));
  T[idx(0, 0)] = Mat::Identity(n, n);
  ms.series = Mat::Identity(n, n);
  cplx zk = 1.0;
  for (int k = 1; k <= s0; ++k) {
    zk *= z;
    std::vector<Mat> next((M + 1) * (Q + 1), Mat::Zero(n, n));
    for (int mm = 0; mm <= M; ++mm)
      for (int qq = 0; qq <= Q; ++qq) {
        Mat acc = Mat::Zero(n, n);
        for (int m = 0; m <= std::min(mm, nbins - 1); ++m)
          for (int q = 0; q <= qq; ++q) {
            const Mat& prev = T[idx(mm - m, qq - q)];
            if (prev.isZero(0.0)) continue;
            acc += A[m][q] * prev;
          }
        next[idx(mm, qq)] = acc / static_cast<double>(qq + k);
      }
    T = std::move(next);
    for (const Mat& t : T) ms.series += zk * t;
  }

  ms.exact = expm_herm(H0, -z) * expm_herm(H0 + Vsum, z);
  ms.error = op_norm(ms.exact - ms.series);
  ms.error_bound = std::pow(2.0, -s0 - 1) * std::exp(1.0 / (2.0 * std::numbers::e)) +
                   (std::pow(2.0, -M - 1) + std::pow(2.0, -Q - 1)) * std::exp(3.0 / (4.0 * std::numbers::e));
  ms.log2_sr_bound = (1.0 + 2.0 / kappa) * M + 3.0 * Q + (2.0 + 2.0 / kappa + std::log2(D0)) * s0;
  return ms;
}

TruncationParams truncation_theorem_params(double t_or_beta, double Q_param, double C0, double g_tilde, double kappa,
                                           double D0, double eps0) {
  if (!(t_or_beta >= 0.0) || !(Q_param > 0.0) || !(C0 >= 1.0) || !(g_tilde > 0.0) || !(kappa > 0.0) || D0 < 1.0 ||
      !(eps0 > 0.0))
    fail(Code::BadArgument, "truncation parameters must be positive");
  TruncationParams p;
  p.Q0 = 1.0 / std::min(1.0 / (4.0 * Q_param), 1.0 / (4.0 * std::numbers::e * C0 * g_tilde));
  const double expo = 6.0 + 4.0 / kappa + std::log2(D0);
  // Guard against ceil(x) overshooting by rounding when x is an integer.
  auto ceil_tight = [](double x) { return static_cast<long long>(std::ceil(x * (1.0 - 1e-14))); };
  p.m_real = ceil_tight(t_or_beta * p.Q0);
  p.m_imag = ceil_tight(t_or_beta * p.Q0);
  p.log_sr_real = p.m_real == 0 ? 0.0 : expo * p.m_real * std::log(8.0 * p.m_real / eps0);
  p.log_sr_imag = p.m_imag == 0 ? 0.0 : 2.0 * expo * p.m_imag * std::log(48.0 * p.m_imag / eps0);
  return p;
}

// ---- long-range decomposition ----------------------------------------------

namespace {

struct Boundary {
  int diam;
  double norm;
  const LocalTerm* term;
};

std::vector<Boundary> ordered_boundary(const ChainHamiltonian& H, int s) {
  if (s < 1 || s >= H.n) fail(Code::BadCut, "cut position must lie in [1, n-1]");
  std::vector<Boundary> out;
  for (const auto& t : H.terms) {
    if (t.support.front() < s && t.support.back() >= s)
      out.push_back({t.support.back() - t.support.front(), t.norm, &t});
  }
  std::stable_sort(out.begin(), out.end(), [](const Boundary& a, const Boundary& b) {
    if (a.diam != b.diam) return a.diam < b.diam;
    if (a.norm != b.norm) return a.norm > b.norm;
    return a.term->support < b.term->support;
  });
  return out;
}

}  // namespace

DecompositionCheck long_range_decomposition_check(const ChainHamiltonian& H, int s) {
  if (!(H.eta > 2.0)) fail(Code::EtaTooSmall, "decomposition constants need eta > 2");
  DecompositionCheck c;
  c.cut = s;
  c.kappa = (H.eta - 2.0) / (H.k + 1);
  c.C0 = (H.eta - 1.0) * std::pow(2.0, H.eta - 2.0);
  c.D0 = std::pow(static_cast<double>(H.d), 2 * H.k);
  c.g_tilde_cap = 4.0 * H.J0 * (1.0 + 1.0 / (H.eta - 2.0));
  const auto b = ordered_boundary(H, s);
  for (const auto& x : b) c.g_tilde += x.norm;
  c.pass = c.g_tilde <= c.g_tilde_cap + 1e-12;
  double tail = c.g_tilde;
  for (std::size_t D = 0; D <= b.size(); ++D) {
    if (D > 0) tail -= b[D - 1].norm;
    const double t = std::max(0.0, tail);
    const double bound = c.C0 * c.g_tilde * std::pow(static_cast<double>(D + 1), -c.kappa);
    c.tails.push_back(t);
    c.bounds.push_back(bound);
    if (t > bound + 1e-12) c.pass = false;
  }
  return c;
}

std::vector<MergeTerm> boundary_terms(const ChainHamiltonian& H, int s) {
  const auto b = ordered_boundary(H, s);
  const std::vector<int> dims = H.dims();
  std::vector<MergeTerm> out;
  int j = 1;
  for (const auto& x : b) out.push_back({j++, embed(x.term->matrix, x.term->support, dims), x.term->support});
  return out;
}

}  // namespace sie
