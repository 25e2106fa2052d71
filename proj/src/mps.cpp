#include "sie/mps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "sie/io.hpp"
#include "sie/linalg.hpp"

namespace sie {

namespace {

// [A^0; A^1; ...], row index s * Dl + l.
Mat group_left(const std::vector<Mat>& site) {
  const Eigen::Index dl = site[0].rows(), dr = site[0].cols();
  Mat g(dl * static_cast<Eigen::Index>(site.size()), dr);
  for (std::size_t s = 0; s < site.size(); ++s) g.middleRows(static_cast<Eigen::Index>(s) * dl, dl) = site[s];
  return g;
}

std::vector<Mat> ungroup_left(const Mat& g, int d) {
  const Eigen::Index dl = g.rows() / d;
  std::vector<Mat> out(d);
  for (int s = 0; s < d; ++s) out[s] = g.middleRows(s * dl, dl);
  return out;
}

// [A^0, A^1, ...], column index s * Dr + r.
Mat group_right(const std::vector<Mat>& site) {
  const Eigen::Index dl = site[0].rows(), dr = site[0].cols();
  Mat g(dl, dr * static_cast<Eigen::Index>(site.size()));
  for (std::size_t s = 0; s < site.size(); ++s) g.middleCols(static_cast<Eigen::Index>(s) * dr, dr) = site[s];
  return g;
}

std::vector<Mat> ungroup_right(const Mat& g, int d) {
  const Eigen::Index dr = g.cols() / d;
  std::vector<Mat> out(d);
  for (int s = 0; s < d; ++s) out[s] = g.middleCols(s * dr, dr);
  return out;
}

void left_orthonormalize(Mps& m) {
  for (int i = 0; i + 1 < m.n(); ++i) {
    const Mat g = group_left(m.sites[i]);
    const Eigen::Index k = std::min(g.rows(), g.cols());
    Eigen::HouseholderQR<Mat> qr(g);
    const Mat Q = qr.householderQ() * Mat::Identity(g.rows(), k);
    const Mat R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    m.sites[i] = ungroup_left(Q, m.d(i));
    for (auto& a : m.sites[i + 1]) a = R * a;
  }
}

double sum_sq_from(const std::vector<double>& v, std::size_t k) {
  double s = 0.0;
  for (std::size_t j = k; j < v.size(); ++j) s += v[j] * v[j];
  return s;
}

// Right sweep on a left-orthonormal MPS; leaves it right-orthonormal with the
// center at site 0 and returns the exact spectrum of every bond. Singular
// values below 1e-15 of the largest are dropped; their weight is returned.
std::vector<std::vector<double>> right_sweep(Mps& m, std::vector<double>& dropped) {
  const int n = m.n();
  std::vector<std::vector<double>> spectra(std::max(0, n - 1));
  dropped.assign(std::max(0, n - 1), 0.0);
  for (int i = n - 1; i >= 1; --i) {
    const Mat g = group_right(m.sites[i]);
    Eigen::BDCSVD<Mat> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& S = svd.singularValues();
    spectra[i - 1].assign(S.data(), S.data() + S.size());
    Eigen::Index k = 0;
    while (k < S.size() && S[k] > 1e-15 * S[0]) ++k;
    k = std::max<Eigen::Index>(k, 1);
    dropped[i - 1] = sum_sq_from(spectra[i - 1], static_cast<std::size_t>(k));
    m.sites[i] = ungroup_right(svd.matrixV().leftCols(k).adjoint(), m.d(i));
    const Mat us = svd.matrixU().leftCols(k) * S.head(k).cast<cplx>().asDiagonal();
    for (auto& a : m.sites[i - 1]) a = a * us;
  }
  m.center = 0;
  return spectra;
}

}  // namespace

std::vector<int> Mps::dims() const {
  std::vector<int> d(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) d[i] = static_cast<int>(sites[i].size());
  return d;
}

std::vector<int> Mps::bond_dims() const {
  std::vector<int> b;
  for (int i = 0; i + 1 < n(); ++i) b.push_back(static_cast<int>(sites[i][0].cols()));
  return b;
}

int Mps::max_bond() const {
  int m = 1;
  for (int b : bond_dims()) m = std::max(m, b);
  return m;
}

void Mps::validate() const {
  if (sites.empty()) fail(Code::Mismatch, "MPS has no sites");
  for (int i = 0; i < n(); ++i) {
    if (sites[i].size() < 2) fail(Code::Mismatch, "physical dimension must be >= 2");
    for (const auto& a : sites[i])
      if (a.rows() != sites[i][0].rows() || a.cols() != sites[i][0].cols())
        fail(Code::Mismatch, "site matrices of unequal shape");
    if (i + 1 < n() && sites[i][0].cols() != sites[i + 1][0].rows()) fail(Code::Mismatch, "bond mismatch");
  }
  if (sites.front()[0].rows() != 1 || sites.back()[0].cols() != 1) fail(Code::Mismatch, "open boundary bonds");
}

Mps Mps::product(const std::vector<Vec>& site_states) {
  Mps m;
  for (const Vec& v : site_states) {
    std::vector<Mat> site(v.size(), Mat(1, 1));
    for (Eigen::Index s = 0; s < v.size(); ++s) site[s](0, 0) = v[s];
    m.sites.push_back(std::move(site));
  }
  m.validate();
  return m;
}

double CompressionRecord::total_discard() const {
  return std::accumulate(sweep_discard.begin(), sweep_discard.end(), 0.0);
}

double CompressionRecord::total_delta_sq() const { return std::accumulate(delta_sq.begin(), delta_sq.end(), 0.0); }

double CompressionRecord::max_delta() const {
  double m = 0.0;
  for (double x : delta_sq) m = std::max(m, std::sqrt(x));
  return m;
}

FromDense from_dense(const PureState& state, int D_max, double tol) {
  if (D_max < 1) fail(Code::BadArgument, "bond cap must be >= 1");
  if (state.norm_sq() == 0.0) fail(Code::ZeroState, "cannot factor the zero state");
  const std::vector<int>& dims = state.dims();
  const int n = static_cast<int>(dims.size());
  FromDense out;
  out.record.norm_before = state.norm();
  Eigen::Index rest = static_cast<Eigen::Index>(state.dim());
  Mat C = Eigen::Map<const Mat>(state.amps().data(), 1, rest);
  for (int b = 0; b + 1 < n; ++b) {
    const Eigen::Index dl = C.rows(), d = dims[b];
    rest /= d;
    Mat M(dl * d, rest);
    for (Eigen::Index l = 0; l < dl; ++l)
      for (Eigen::Index s = 0; s < d; ++s) M.row(s * dl + l) = C.row(l).segment(s * rest, rest);
    Eigen::BDCSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& S = svd.singularValues();
    std::vector<double> spec(S.data(), S.data() + S.size());
    Eigen::Index k = 0;
    while (k < S.size() && k < D_max && S[k] > tol * S[0]) ++k;
    k = std::max<Eigen::Index>(k, 1);
    const double disc = sum_sq_from(spec, static_cast<std::size_t>(k));
    out.record.spectra.push_back(spec);
    out.record.kept.push_back(static_cast<int>(k));
    out.record.delta_sq.push_back(disc);
    out.record.sweep_discard.push_back(disc);
    out.record.zeta_full.push_back(std::accumulate(spec.begin(), spec.end(), 0.0));
    out.record.zeta_top.push_back(std::accumulate(spec.begin(), spec.begin() + std::min<Eigen::Index>(D_max, S.size()), 0.0));
    out.record.zeta_post.push_back(S.head(k).sum());
    out.mps.sites.push_back(ungroup_left(svd.matrixU().leftCols(k), static_cast<int>(d)));
    C = S.head(k).cast<cplx>().asDiagonal() * svd.matrixV().leftCols(k).adjoint();
  }
  std::vector<Mat> last(dims[n - 1], Mat(C.rows(), 1));
  for (int s = 0; s < dims[n - 1]; ++s) last[s] = C.col(s);
  out.mps.sites.push_back(std::move(last));
  out.mps.center = n - 1;
  out.record.norm_after = norm(out.mps);
  return out;
}

PureState to_dense(const Mps& mps, std::size_t cap) {
  mps.validate();
  const std::vector<int> dims = mps.dims();
  total_dim(dims, cap);
  Mat v = Mat::Ones(1, 1);
  for (int i = 0; i < mps.n(); ++i) {
    const int d = mps.d(i);
    Mat next(v.rows() * d, mps.sites[i][0].cols());
    for (Eigen::Index p = 0; p < v.rows(); ++p)
      for (int s = 0; s < d; ++s) next.row(p * d + s) = v.row(p) * mps.sites[i][s];
    v = std::move(next);
  }
  return PureState(dims, v.col(0));
}

Mps add(const Mps& a, const Mps& b, cplx ca, cplx cb) {
  if (a.n() != b.n() || a.dims() != b.dims()) fail(Code::Mismatch, "MPS shapes differ");
  const int n = a.n();
  Mps out;
  out.sites.resize(n);
  for (int i = 0; i < n; ++i) {
    const int d = a.d(i);
    out.sites[i].resize(d);
    for (int s = 0; s < d; ++s) {
      const Mat& x = a.sites[i][s];
      const Mat& y = b.sites[i][s];
      if (n == 1) {
        out.sites[i][s] = ca * x + cb * y;
      } else if (i == 0) {
        Mat m(1, x.cols() + y.cols());
        m << ca * x, cb * y;
        out.sites[i][s] = m;
      } else if (i == n - 1) {
        Mat m(x.rows() + y.rows(), 1);
        m << x, y;
        out.sites[i][s] = m;
      } else {
        Mat m = Mat::Zero(x.rows() + y.rows(), x.cols() + y.cols());
        m.topLeftCorner(x.rows(), x.cols()) = x;
        m.bottomRightCorner(y.rows(), y.cols()) = y;
        out.sites[i][s] = m;
      }
    }
  }
  return out;
}

Mps scaled(const Mps& a, cplx c) {
  Mps out = a;
  for (auto& m : out.sites[0]) m *= c;
  return out;
}

Mps apply_local_term(const Mps& mps, const LocalTerm& term) {
  const auto& sup = term.support;
  if (sup.empty() || sup.size() > 2) fail(Code::UnsupportedLocality, "only one- and two-site terms are supported");
  for (int q : sup)
    if (q < 0 || q >= mps.n()) fail(Code::Mismatch, "term support outside the chain");
  Mps out = mps;
  out.center.reset();
  auto act = [](const Mat& op, const std::vector<Mat>& site) {
    std::vector<Mat> r(site.size(), Mat::Zero(site[0].rows(), site[0].cols()));
    for (std::size_t s = 0; s < site.size(); ++s)
      for (std::size_t sp = 0; sp < site.size(); ++sp)
        if (op(s, sp) != cplx(0.0)) r[s] += op(s, sp) * site[sp];
    return r;
  };
  if (sup.size() == 1) {
    out.sites[sup[0]] = act(term.matrix, mps.sites[sup[0]]);
    return out;
  }
  const int i = sup[0], j = sup[1];
  const int di = mps.d(i), dj = mps.d(j);
  if (term.matrix.rows() != di * dj) fail(Code::Mismatch, "term size differs from site dimensions");
  Eigen::JacobiSVD<Mat> svd(realign(term.matrix, di, dj), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& sv = svd.singularValues();
  std::vector<Mat> P, Q;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] <= 1e-14 * std::max(1.0, sv[0])) break;
    const Vec u = svd.matrixU().col(k) * sv[k];
    const Vec v = svd.matrixV().col(k).conjugate();
    Mat p(di, di), q(dj, dj);
    for (int a = 0; a < di; ++a)
      for (int ap = 0; ap < di; ++ap) p(a, ap) = u[a * di + ap];
    for (int b = 0; b < dj; ++b)
      for (int bp = 0; bp < dj; ++bp) q(b, bp) = v[b * dj + bp];
    P.push_back(p);
    Q.push_back(q);
  }
  const int na = static_cast<int>(P.size());
  if (na == 0) {
    for (auto& m : out.sites[0]) m.setZero();
    return out;
  }
  // Operator bond index rides along as the fast part of the bond index.
  for (int s = 0; s < di; ++s) {
    const Mat& a0 = mps.sites[i][s];
    out.sites[i][s] = Mat::Zero(a0.rows(), a0.cols() * na);
  }
  for (int a = 0; a < na; ++a) {
    const auto b = act(P[a], mps.sites[i]);
    for (int s = 0; s < di; ++s)
      for (Eigen::Index r = 0; r < b[s].cols(); ++r) out.sites[i][s].col(r * na + a) = b[s].col(r);
  }
  for (int k = i + 1; k < j; ++k)
    for (auto& m : out.sites[k]) m = kron(m, identity(na));
  for (int s = 0; s < dj; ++s) {
    const Mat& a0 = mps.sites[j][s];
    out.sites[j][s] = Mat::Zero(a0.rows() * na, a0.cols());
  }
  for (int a = 0; a < na; ++a) {
    const auto c = act(Q[a], mps.sites[j]);
    for (int s = 0; s < dj; ++s)
      for (Eigen::Index l = 0; l < c[s].rows(); ++l) out.sites[j][s].row(l * na + a) = c[s].row(l);
  }
  return out;
}

Compressed compress(const Mps& input, int D, double tol) {
  if (D < 1) fail(Code::BadArgument, "bond cap must be >= 1");
  input.validate();
  Compressed out;
  Mps m = input;
  const int n = m.n();
  CompressionRecord& rec = out.record;
  left_orthonormalize(m);
  {
    const Mat last = group_left(m.sites[n - 1]);
    rec.norm_before = last.norm();
  }
  if (rec.norm_before == 0.0) fail(Code::ZeroState, "cannot compress the zero state");
  std::vector<double> dropped;
  rec.spectra = right_sweep(m, dropped);
  rec.kept.assign(n - 1, 0);
  rec.delta_sq.assign(n - 1, 0.0);
  rec.sweep_discard = dropped;
  rec.zeta_full.assign(n - 1, 0.0);
  rec.zeta_top.assign(n - 1, 0.0);
  rec.zeta_post.assign(n - 1, 0.0);
  for (int b = 0; b + 1 < n; ++b) {
    const auto& spec = rec.spectra[b];
    std::size_t k = 0;
    while (k < spec.size() && k < static_cast<std::size_t>(D) && spec[k] > tol * spec[0]) ++k;
    k = std::max<std::size_t>(k, 1);
    rec.kept[b] = static_cast<int>(k);
    rec.delta_sq[b] = sum_sq_from(spec, k);
    rec.zeta_full[b] = std::accumulate(spec.begin(), spec.end(), 0.0);
    rec.zeta_top[b] = std::accumulate(spec.begin(), spec.begin() + std::min<std::size_t>(D, spec.size()), 0.0);

    const Mat g = group_left(m.sites[b]);
    Eigen::BDCSVD<Mat> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& S = svd.singularValues();
    const Eigen::Index kk = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), S.size());
    double disc = 0.0;
    for (Eigen::Index j = kk; j < S.size(); ++j) disc += S[j] * S[j];
    rec.sweep_discard[b] += disc;
    rec.zeta_post[b] = S.head(kk).sum();
    m.sites[b] = ungroup_left(svd.matrixU().leftCols(kk), m.d(b));
    const Mat sv = S.head(kk).cast<cplx>().asDiagonal() * svd.matrixV().leftCols(kk).adjoint();
    for (auto& a : m.sites[b + 1]) a = sv * a;
  }
  m.center = n - 1;
  rec.norm_after = group_left(m.sites[n - 1]).norm();
  out.mps = std::move(m);
  return out;
}

std::vector<std::vector<double>> bond_spectra(const Mps& mps) {
  Mps m = mps;
  left_orthonormalize(m);
  std::vector<double> dropped;
  return right_sweep(m, dropped);
}

cplx overlap(const Mps& a, const Mps& b) {
  if (a.n() != b.n() || a.dims() != b.dims()) fail(Code::Mismatch, "MPS shapes differ");
  Mat E = Mat::Ones(1, 1);
  for (int i = 0; i < a.n(); ++i) {
    Mat next = Mat::Zero(a.sites[i][0].cols(), b.sites[i][0].cols());
    for (int s = 0; s < a.d(i); ++s) next.noalias() += a.sites[i][s].adjoint() * (E * b.sites[i][s]);
    E = std::move(next);
  }
  return E(0, 0);
}

double norm(const Mps& a) { return std::sqrt(std::max(0.0, overlap(a, a).real())); }

cplx local_expectation(const Mps& mps, const LocalTerm& observable) {
  const cplx nn = overlap(mps, mps);
  if (std::abs(nn) == 0.0) fail(Code::ZeroState, "expectation in the zero state");
  return overlap(mps, apply_local_term(mps, observable)) / nn;
}

Mps random_mps(Rng& rng, int n, int d, int D) {
  if (n < 1 || d < 2 || D < 1) fail(Code::BadArgument, "random MPS needs n >= 1, d >= 2, D >= 1");
  Mps m;
  auto cap = [&](int b) {
    // bond between sites b and b+1: min(D, d^{b+1}, d^{n-b-1})
    double l = std::pow(static_cast<double>(d), b + 1), r = std::pow(static_cast<double>(d), n - b - 1);
    return static_cast<int>(std::min<double>({static_cast<double>(D), l, r}));
  };
  for (int i = 0; i < n; ++i) {
    const int dl = i == 0 ? 1 : cap(i - 1), dr = i == n - 1 ? 1 : cap(i);
    std::vector<Mat> site(d, Mat(dl, dr));
    for (auto& a : site)
      for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = rng.cnormal() / std::sqrt(static_cast<double>(dl));
    m.sites.push_back(std::move(site));
  }
  const double nrm = norm(m);
  for (auto& a : m.sites[0]) a /= nrm;
  return m;
}

nlohmann::json to_json(const Mps& mps) {
  nlohmann::json sites = nlohmann::json::array();
  for (int i = 0; i < mps.n(); ++i) {
    const Eigen::Index dl = mps.sites[i][0].rows(), dr = mps.sites[i][0].cols();
    const int d = mps.d(i);
    std::vector<std::string> entries;
    entries.reserve(static_cast<std::size_t>(dl * d * dr));
    for (Eigen::Index l = 0; l < dl; ++l)
      for (int s = 0; s < d; ++s)
        for (Eigen::Index r = 0; r < dr; ++r) entries.push_back(io::format_complex(mps.sites[i][s](l, r)));
    sites.push_back({{"left", dl}, {"d", d}, {"right", dr}, {"entries", entries}});
  }
  nlohmann::json j = {{"n", mps.n()}, {"dims", mps.dims()}, {"sites", sites}};
  if (mps.center) j["center"] = *mps.center;
  return j;
}

Mps mps_from_json(const nlohmann::json& j) {
  Mps m;
  for (const auto& site : j.at("sites")) {
    const Eigen::Index dl = site.at("left").get<Eigen::Index>(), dr = site.at("right").get<Eigen::Index>();
    const int d = site.at("d").get<int>();
    const auto& e = site.at("entries");
    if (static_cast<Eigen::Index>(e.size()) != dl * d * dr) fail(Code::Mismatch, "site entry count");
    std::vector<Mat> t(d, Mat(dl, dr));
    std::size_t idx = 0;
    for (Eigen::Index l = 0; l < dl; ++l)
      for (int s = 0; s < d; ++s)
        for (Eigen::Index r = 0; r < dr; ++r) t[s](l, r) = io::parse_complex(e[idx++].get<std::string>());
    m.sites.push_back(std::move(t));
  }
  if (j.contains("center")) m.center = j.at("center").get<int>();
  m.validate();
  return m;
}

void write_record_csv(std::ostream& out, const CompressionRecord& rec) {
  io::CsvWriter w(out);
  w.row({"bond", "kept", "delta_sq", "sweep_discard", "zeta_full", "zeta_top", "zeta_post"});
  for (std::size_t b = 0; b < rec.kept.size(); ++b)
    w.row({std::to_string(b), std::to_string(rec.kept[b]), io::fmt_double(rec.delta_sq[b]),
           io::fmt_double(rec.sweep_discard[b]), io::fmt_double(rec.zeta_full[b]), io::fmt_double(rec.zeta_top[b]),
           io::fmt_double(rec.zeta_post[b])});
}

}  // namespace sie
