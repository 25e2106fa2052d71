#include "sie/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "sie/kernels.hpp"
#include "sie/linalg.hpp"

namespace sie {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PureState::PureState(std::vector<int> dims, Vec amps) : dims_(std::move(dims)), amps_(std::move(amps)) {
  for (int d : dims_)
    if (d < 2) fail(Code::BadArgument, "site dimension must be >= 2");
  if (total_dim(dims_) != static_cast<std::size_t>(amps_.size()))
    fail(Code::Mismatch, "amplitude length differs from product of dims");
  norm_sq_ = kernels::norm_sq(amps_);
}

PureState PureState::basis(std::vector<int> dims, std::size_t index) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(total_dim(dims)));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return PureState(std::move(dims), std::move(v));
}

PureState PureState::product(const std::vector<Vec>& sites) {
  std::vector<int> dims;
  Vec v = Vec::Ones(1);
  for (const Vec& s : sites) {
    dims.push_back(static_cast<int>(s.size()));
    Vec next(v.size() * s.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * s.size(), s.size()) = v[i] * s;
    v = std::move(next);
  }
  return PureState(std::move(dims), std::move(v));
}

double PureState::norm() const { return std::sqrt(norm_sq_); }

PureState PureState::normalized() const {
  if (norm_sq_ <= 0.0) fail(Code::ZeroState, "cannot normalize zero state");
  return PureState(dims_, amps_ / norm());
}

Cut::Cut(std::vector<int> left_sites, int n_sites) : left(std::move(left_sites)) {
  std::sort(left.begin(), left.end());
  for (int i = 0; i < n_sites; ++i)
    if (!std::binary_search(left.begin(), left.end(), i)) right.push_back(i);
  validate(n_sites);
}

Cut Cut::at(int s, int n_sites) {
  std::vector<int> l(std::max(s, 0));
  std::iota(l.begin(), l.end(), 0);
  return Cut(l, n_sites);
}

void Cut::validate(int n_sites) const {
  if (left.empty() || right.empty()) fail(Code::BadCut, "both sides of a cut must be nonempty");
  std::vector<int> all(left);
  all.insert(all.end(), right.begin(), right.end());
  std::sort(all.begin(), all.end());
  if (static_cast<int>(all.size()) != n_sites) fail(Code::BadCut, "cut does not cover the chain");
  for (int i = 0; i < n_sites; ++i)
    if (all[i] != i) fail(Code::BadCut, "cut sites overlap or are out of range");
}

double SchmidtSpectrum::sum() const { return std::accumulate(coeffs.begin(), coeffs.end(), 0.0); }

double SchmidtSpectrum::sum_sq() const {
  double s = 0.0;
  for (double c : coeffs) s += c * c;
  return s;
}

SchmidtSpectrum schmidt_of_matrix(const Mat& m, bool keep_vectors) {
  SchmidtSpectrum out;
  out.source_norm = m.norm();
  if (keep_vectors) {
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& s = svd.singularValues();
    out.coeffs.assign(s.data(), s.data() + s.size());
    out.left = svd.matrixU();
    out.right = svd.matrixV().conjugate();
  } else {
    const RVec s = singular_values(m);
    out.coeffs.assign(s.data(), s.data() + s.size());
  }
  return out;
}

SchmidtSpectrum schmidt_decompose(const PureState& state, const Cut& cut, bool keep_vectors) {
  cut.validate(state.sites());
  if (state.norm_sq() == 0.0) fail(Code::ZeroState, "Schmidt decomposition of the zero vector");
  std::vector<int> perm(cut.left);
  perm.insert(perm.end(), cut.right.begin(), cut.right.end());
  bool identity_perm = true;
  for (std::size_t i = 0; i < perm.size(); ++i) identity_perm &= perm[i] == static_cast<int>(i);
  const Vec amps = identity_perm ? state.amps() : permute_sites(state.amps(), state.dims(), perm);
  Eigen::Index dl = 1;
  for (int q : cut.left) dl *= state.dims()[q];
  const Eigen::Index dr = amps.size() / dl;
  const Mat m = Eigen::Map<const RowMat>(amps.data(), dl, dr);
  return schmidt_of_matrix(m, keep_vectors);
}

double renyi_entropy(const std::vector<double>& coeffs, double alpha) {
  if (!(alpha > 0.0)) fail(Code::BadAlpha, "Renyi order must be positive");
  if (coeffs.empty()) fail(Code::Unnormalized, "empty spectrum");
  double ssq = 0.0, lead = 0.0;
  for (double c : coeffs) {
    ssq += c * c;
    lead = std::max(lead, c);
  }
  if (std::abs(ssq - 1.0) > 1e-8) fail(Code::Unnormalized, "spectrum is not normalized");
  const double floor = 1e-14 * lead;
  if (std::isinf(alpha)) return -std::log(lead * lead);
  if (std::abs(1.0 - alpha) < 1e-9) {
    double s = 0.0;
    for (double c : coeffs)
      if (c > floor) s -= c * c * std::log(c * c);
    return s;
  }
  double s = 0.0;
  for (double c : coeffs)
    if (c > floor) s += std::pow(c, 2.0 * alpha);
  return std::log(s) / (1.0 - alpha);
}

double renyi_entropy(const SchmidtSpectrum& spec, double alpha) { return renyi_entropy(spec.coeffs, alpha); }

Truncation truncate_rank(const SchmidtSpectrum& spec, int D) {
  if (D < 1) fail(Code::BadArgument, "truncation rank must be >= 1");
  Truncation t;
  t.kept.source_norm = spec.source_norm;
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(D), spec.coeffs.size());
  t.kept.coeffs.assign(spec.coeffs.begin(), spec.coeffs.begin() + static_cast<long>(keep));
  if (spec.left) t.kept.left = spec.left->leftCols(static_cast<Eigen::Index>(keep));
  if (spec.right) t.kept.right = spec.right->leftCols(static_cast<Eigen::Index>(keep));
  // Sum the tail from the smallest coefficient up.
  double tail = 0.0;
  for (std::size_t j = spec.coeffs.size(); j > keep; --j) tail += spec.coeffs[j - 1] * spec.coeffs[j - 1];
  t.tail = std::sqrt(tail);
  return t;
}

OverlapSum overlap_sum(const std::vector<ExpansionTerm>& terms, const Mat& basis_a, const Mat& basis_b) {
  OverlapSum out;
  if (terms.empty()) return out;
  const Eigen::Index da = terms.front().a.size(), db = terms.front().b.size();
  if (basis_a.rows() != da || basis_b.rows() != db) fail(Code::Mismatch, "basis dimension");
  Mat psi = Mat::Zero(da, db);
  for (const auto& t : terms) {
    if (t.a.size() != da || t.b.size() != db) fail(Code::Mismatch, "expansion term dimension");
    if (std::abs(t.a.norm() - 1.0) > 1e-10 || std::abs(t.b.norm() - 1.0) > 1e-10)
      fail(Code::BadExpansion, "expansion factors must be unit vectors");
    psi += t.g * t.a * t.b.transpose();
    out.rhs += std::abs(t.g);
  }
  const Eigen::Index k = std::min(basis_a.cols(), basis_b.cols());
  for (Eigen::Index s = 0; s < k; ++s) {
    const cplx v = basis_a.col(s).adjoint() * psi * basis_b.col(s).conjugate();
    out.lhs += std::abs(v);
  }
  return out;
}

bool overlap_sum_bound_check(const std::vector<ExpansionTerm>& terms, const Mat& basis_a, const Mat& basis_b) {
  const OverlapSum o = overlap_sum(terms, basis_a, basis_b);
  return o.lhs <= o.rhs + 1e-10;
}

bool schmidt_coeff_bound_check(const SchmidtSpectrum& spec, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(Code::BadAlpha, "order must lie in (0, 1)");
  const double e = renyi_entropy(spec, alpha);
  const double mass = std::exp((1.0 - alpha) * e);
  for (std::size_t s0 = 1; s0 <= spec.coeffs.size(); ++s0) {
    const double bound = std::pow(mass / static_cast<double>(s0), 1.0 / (2.0 * alpha));
    if (spec.coeffs[s0 - 1] > bound * (1.0 + 1e-12) + 1e-15) return false;
  }
  return true;
}

}  // namespace sie
