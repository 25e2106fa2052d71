#include "sie/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "sie/io.hpp"
#include "sie/linalg.hpp"

namespace sie {

LocalTerm::LocalTerm(std::vector<int> supp, Mat m) : support(std::move(supp)), matrix(std::move(m)) {
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end())
    fail(Code::BadArgument, "term support must be sorted and distinct");
  if (!is_hermitian(matrix)) fail(Code::BadArgument, "local term must be Hermitian");
  norm = herm_norm(matrix);
}

// ---- chain -----------------------------------------------------------------

double ChainHamiltonian::computed_g() const {
  std::vector<double> load(n, 0.0);
  for (const auto& t : terms)
    for (int q : t.support) load[q] += t.norm;
  return n ? *std::max_element(load.begin(), load.end()) : 0.0;
}

double ChainHamiltonian::pair_strength(int r) const {
  double worst = 0.0;
  for (int i = 0; i + r < n; ++i) {
    double s = 0.0;
    for (const auto& t : terms) {
      const bool a = std::binary_search(t.support.begin(), t.support.end(), i);
      const bool b = std::binary_search(t.support.begin(), t.support.end(), i + r);
      if (a && b) s += t.norm;
    }
    worst = std::max(worst, s);
  }
  return worst;
}

void ChainHamiltonian::check_invariants() const {
  for (const auto& t : terms) {
    if (static_cast<int>(t.support.size()) > k) fail(Code::UnsupportedLocality, "term exceeds locality k");
    if (t.support.front() < 0 || t.support.back() >= n) fail(Code::BadArgument, "term support out of range");
  }
  if (computed_g() > g * (1.0 + 1e-12) + 1e-15) fail(Code::BadArgument, "one-site energy bound g violated");
  for (int r = 1; r < n; ++r) {
    const double s = pair_strength(r);
    double cap = kInf;
    if (range > 0) cap = r > range ? 0.0 : kInf;
    if (eta > 0.0) cap = std::min(cap, J0 * std::pow(static_cast<double>(r), -eta));
    if (s > cap * (1.0 + 1e-12) + 1e-15) fail(Code::BadArgument, "pair decay bound J(r) violated");
  }
}

Mat ChainHamiltonian::dense(std::size_t cap) const {
  const auto N = static_cast<Eigen::Index>(total_dim(dims(), cap));
  Mat h = Mat::Zero(N, N);
  const auto dm = dims();
  for (const auto& t : terms) h += embed(t.matrix, t.support, dm);
  return h;
}

Vec ChainHamiltonian::apply(const Vec& in) const {
  Vec out = Vec::Zero(in.size());
  const auto dm = dims();
  for (const auto& t : terms) apply_local_add(t.matrix, t.support, dm, in, out);
  return out;
}

Mat site_z(int d) {
  if (d == 2) return pauli::Z();
  Mat m = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) m(j, j) = std::cos(2.0 * std::numbers::pi * j / d);
  return m;
}

Mat site_x(int d) {
  if (d == 2) return pauli::X();
  Mat m = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    m((j + 1) % d, j) += 0.5;
    m(j, (j + 1) % d) += 0.5;
  }
  return m;
}

ChainHamiltonian build_long_range_ising(int n, double J0, double eta, IsingFields f, int d, int max_range) {
  if (n < 2) fail(Code::BadArgument, "chain needs at least two sites");
  if (!(eta > 2.0)) fail(Code::EtaTooSmall, "decay exponent must exceed 2");
  if (d < 2) fail(Code::BadArgument, "local dimension must be >= 2");
  ChainHamiltonian H;
  H.n = n;
  H.d = d;
  H.k = 2;
  H.J0 = std::abs(J0);
  H.eta = eta;
  H.range = max_range;
  const Mat z = site_z(d), x = site_x(d);
  const Mat zz = kron(z, z);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int r = j - i;
      if (max_range > 0 && r > max_range) continue;
      const double c = J0 * std::pow(static_cast<double>(r), -eta);
      if (c == 0.0) continue;
      H.terms.emplace_back(std::vector<int>{i, j}, Mat(c * zz));
    }
  if (f.hx != 0.0 || f.hz != 0.0)
    for (int i = 0; i < n; ++i) H.terms.emplace_back(std::vector<int>{i}, Mat(f.hx * x + f.hz * z));
  H.g = H.computed_g();
  H.check_invariants();
  return H;
}

// ---- cut -------------------------------------------------------------------

CutHamiltonian split_at_cut(const ChainHamiltonian& H, int s) {
  if (s < 1 || s > H.n - 1) fail(Code::BadCut, "cut position must lie in [1, n-1]");
  CutHamiltonian c;
  c.s = s;
  c.n = H.n;
  c.d = H.d;
  for (const auto& t : H.terms) {
    if (t.support.back() < s) {
      c.H_A.push_back(t);
    } else if (t.support.front() >= s) {
      c.H_B.push_back(t);
    } else {
      c.V.push_back(t);
      c.boundary_norm_sum += t.norm;
    }
  }
  return c;
}

BipartiteOperator CutHamiltonian::V_AB(std::size_t cap) const {
  const std::vector<int> dA(s, d), dB(n - s, d);
  const auto NA = static_cast<Eigen::Index>(total_dim(dA, cap));
  const auto NB = static_cast<Eigen::Index>(total_dim(dB, cap));
  std::vector<OperatorTerm> out;
  for (const auto& t : V) {
    std::vector<int> left, right;
    for (int q : t.support) (q < s ? left : right).push_back(q);
    Eigen::Index la = 1, lb = 1;
    for (std::size_t i = 0; i < left.size(); ++i) la *= d;
    for (std::size_t i = 0; i < right.size(); ++i) lb *= d;
    for (int& q : right) q -= s;
    const Mat r = realign(t.matrix, la, lb);
    Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& sv = svd.singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv[k] <= 1e-14 * std::max(1.0, sv[0])) break;
      Mat P(la, la), Q(lb, lb);
      for (Eigen::Index i = 0; i < la; ++i)
        for (Eigen::Index j = 0; j < la; ++j) P(i, j) = svd.matrixU()(i * la + j, k);
      for (Eigen::Index i = 0; i < lb; ++i)
        for (Eigen::Index j = 0; j < lb; ++j) Q(i, j) = std::conj(svd.matrixV()(i * lb + j, k));
      const double np = op_norm(P), nq = op_norm(Q);
      out.push_back({sv[k] * np * nq, embed(P / np, left, dA), embed(Q / nq, right, dB)});
    }
  }
  if (out.empty()) {
    BipartiteOperator z(dA, dB, Mat::Zero(NA * NB, NA * NB));
    z.terms = std::vector<OperatorTerm>{};
    return z;
  }
  return BipartiteOperator::from_terms(dA, dB, std::move(out));
}

// ---- saturation ------------------------------------------------------------

SaturationDynamics build_saturation_dynamics(int M, double J, int n_pairs) {
  if (M < 1 || n_pairs < 1) fail(Code::BadArgument, "saturation dynamics needs M >= 1 and n >= 1");
  SaturationDynamics s;
  s.M = M;
  s.J = J;
  s.n_pairs = n_pairs;
  return s;
}

std::vector<SaturationDynamics::Stage> SaturationDynamics::stages(double t) const {
  std::vector<Stage> out;
  for (int k = 1; k <= n_pairs; ++k) {
    out.push_back({"pulse", t / n_pairs, 0});
    out.push_back({"swap", 0.0, k});
  }
  return out;
}

std::vector<double> SaturationDynamics::pair_coeffs(double x) const {
  const double z = std::sqrt(static_cast<double>(M)) * J * x;
  std::vector<double> c(M + 1, std::abs(std::sin(z)) / std::sqrt(static_cast<double>(M)));
  c[0] = std::abs(std::cos(z));
  std::sort(c.begin(), c.end(), std::greater<>());
  return c;
}

Vec SaturationDynamics::pair_state(double x) const {
  const int q = M + 1;
  const double z = std::sqrt(static_cast<double>(M)) * J * x;
  Vec v = Vec::Zero(q * q);
  v[0] = std::cos(z);
  for (int j = 1; j <= M; ++j) v[j * q + j] = -kI * std::sin(z) / std::sqrt(static_cast<double>(M));
  return v;
}

double SaturationDynamics::renyi(double alpha, double t) const {
  return n_pairs * renyi_entropy(pair_coeffs(t / n_pairs), alpha);
}

double SaturationDynamics::half_entropy_closed(double t) const {
  const double z = std::sqrt(static_cast<double>(M)) * J * t / n_pairs;
  return 2.0 * n_pairs * std::log(std::cos(z) + std::sqrt(static_cast<double>(M)) * std::sin(z));
}

double SaturationDynamics::rate_lower_bound(double t) const {
  const double mj = M * J;
  return 2.0 * mj - 2.0 * t * mj * mj / n_pairs;
}

double SaturationDynamics::validity_time() const {
  return n_pairs * std::sqrt(static_cast<double>(M)) / (2.0 * M * J);
}

BipartiteOperator SaturationDynamics::V() const {
  const int q = M + 1;
  Mat m = Mat::Zero(q * q, q * q);
  for (int j = 1; j <= M; ++j) {
    m(j * q + j, 0) += J;
    m(0, j * q + j) += J;
  }
  BipartiteOperator op({q}, {q}, m);
  op.analytic_se = M * std::abs(J);
  return op;
}

PureState SaturationDynamics::simulate_dense(double t) const {
  const int q = M + 1, n = n_pairs;
  // Sites: A0, A1..An, B0, B1..Bn.
  std::vector<int> dims(2 * (n + 1), q);
  total_dim(dims, std::size_t{1} << 20);
  const Mat U = expm_herm(V().matrix, -kI * (t / n));
  PureState psi = PureState::basis(dims);
  Vec v = psi.amps();
  const int b0 = n + 1;
  for (int k = 1; k <= n; ++k) {
    Vec w = Vec::Zero(v.size());
    apply_local_add(U, {0, b0}, dims, v, w);
    std::vector<int> perm(dims.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::swap(perm[0], perm[k]);
    std::swap(perm[b0], perm[b0 + k]);
    v = permute_sites(w, dims, perm);
  }
  return PureState(dims, v);
}

// ---- unbounded -------------------------------------------------------------

UnboundedDynamics build_unbounded_dynamics(int D0, double J, double t) {
  if (D0 < 1) fail(Code::BadArgument, "D0 must be >= 1");
  if (J * t > 1.0 + 1e-15) fail(Code::TimeTooLong, "requires J t <= 1");
  return UnboundedDynamics{D0, J, t};
}

std::vector<double> UnboundedDynamics::spectrum() const {
  const double x = J * t / D0;
  const double c = std::cos(x), s = std::sin(x);
  std::vector<double> out;
  out.reserve(D0 + 1);
  out.push_back(std::pow(c, D0));
  double cp = 1.0;
  for (int k = 1; k <= D0; ++k) {
    out.push_back(cp * s);
    cp *= c;
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double UnboundedDynamics::renyi(double alpha) const { return renyi_entropy(spectrum(), alpha); }

double UnboundedDynamics::lower_bound(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(Code::BadAlpha, "bound is stated for 0 < alpha < 1");
  return (1.0 - 2.0 * alpha) / (1.0 - alpha) * std::log(static_cast<double>(D0)) +
         std::log(alpha * std::pow(J * t / 2.0, 2.0 * alpha)) / (1.0 - alpha);
}

PureState UnboundedDynamics::simulate_dense() const {
  const int q = D0 + 1;
  const std::vector<int> dims{q, 3, 3, q};  // A1 A0 B0 B1
  total_dim(dims, std::size_t{1} << 22);
  Mat V = Mat::Zero(9, 9);  // on A0 B0: J(|11><00| + h.c.)
  V(1 * 3 + 1, 0) = J;
  V(0, 1 * 3 + 1) = J;
  const Mat Uv = expm_herm(V, -kI * (J == 0.0 ? 0.0 : t / D0));
  Vec v = PureState::basis(dims).amps();
  for (int s = 1; s <= D0; ++s) {
    Vec w = Vec::Zero(v.size());
    apply_local_add(Uv, {1, 2}, dims, v, w);
    // Fast pulse exp(i pi/2 K), K = |a><b| + h.c., equals 1 - P + iK.
    auto pulse = [](int dim, int a, int b) {
      Mat u = Mat::Identity(dim, dim);
      u(a, a) = 0.0;
      u(b, b) = 0.0;
      u(a, b) = kI;
      u(b, a) = kI;
      return u;
    };
    const Mat uA = pulse(q * 3, s * 3 + 2, 0 * 3 + 1);  // A1 A0: |s,2> <-> |0,1>
    const Mat uB = pulse(3 * q, 2 * q + s, 1 * q + 0);  // B0 B1: |2,s> <-> |1,0>
    Vec a = Vec::Zero(v.size());
    apply_local_add(uA, {0, 1}, dims, w, a);
    v.setZero();
    apply_local_add(uB, {2, 3}, dims, a, v);
  }
  return PureState(dims, v);
}

// ---- toy -------------------------------------------------------------------

ToyTwoQubit build_toy_two_qubit() {
  ToyTwoQubit m;
  m.H = Mat::Zero(4, 4);
  m.H(0, 3) = 1.0;
  m.H(3, 0) = 1.0;
  return m;
}

Vec ToyTwoQubit::state(double t) const {
  Vec v = Vec::Zero(4);
  v[0] = std::cos(t);
  v[3] = -kI * std::sin(t);
  return v;
}

double ToyTwoQubit::rate(double alpha, double t) const {
  const double c = std::cos(t), s = std::sin(t);
  if (std::isinf(alpha)) return c >= s ? 2.0 * s / c : -2.0 * c / s;
  if (std::abs(1.0 - alpha) < 1e-9) return 2.0 * c * s * std::log((c * c) / (s * s));
  const double num = c * std::pow(s, 2 * alpha - 1) - s * std::pow(c, 2 * alpha - 1);
  const double den = std::pow(c, 2 * alpha) + std::pow(s, 2 * alpha);
  return 2.0 * alpha / (1.0 - alpha) * num / den;
}

BipartiteOperator ToyTwoQubit::V() const {
  // |00><11| + |11><00| = |0><1| (x) |0><1| + h.c.; write as (XX - YY)/2.
  std::vector<OperatorTerm> terms{{0.5, pauli::X(), pauli::X()}, {-0.5, pauli::Y(), pauli::Y()}};
  BipartiteOperator op = BipartiteOperator::from_terms({2}, {2}, terms);
  op.analytic_se = 1.0;
  return op;
}

BipartiteOperator build_ising_projector_interaction(int N) {
  if (N < 1) fail(Code::BadArgument, "N must be >= 1");
  Mat m = Mat::Zero(N * N, N * N);
  for (int s = 0; s < N; ++s) m(s * N + s, s * N + s) = 1.0;
  BipartiteOperator op({N}, {N}, m);
  op.analytic_se = 1.0;
  return op;
}

// ---- json ------------------------------------------------------------------

nlohmann::json to_json(const ChainHamiltonian& H) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : H.terms) terms.push_back({{"support", t.support}, {"matrix", io::matrix_to_json(t.matrix)}});
  return {{"n", H.n}, {"d", H.d}, {"k", H.k}, {"g", H.g}, {"J0", H.J0}, {"eta", H.eta}, {"range", H.range},
          {"terms", terms}};
}

ChainHamiltonian chain_from_json(const nlohmann::json& j) {
  ChainHamiltonian H;
  H.n = j.at("n").get<int>();
  H.d = j.value("d", 2);
  H.k = j.value("k", 2);
  H.J0 = j.value("J0", 0.0);
  H.eta = j.value("eta", 0.0);
  H.range = j.value("range", 0);
  for (const auto& t : j.at("terms")) {
    H.terms.emplace_back(t.at("support").get<std::vector<int>>(), io::matrix_from_json(t.at("matrix")));
    long long dl = 1;
    for (std::size_t i = 0; i < H.terms.back().support.size(); ++i) dl *= H.d;
    if (H.terms.back().matrix.rows() != dl) fail(Code::Mismatch, "term matrix size differs from support");
  }
  H.g = j.contains("g") ? std::max(j.at("g").get<double>(), H.computed_g()) : H.computed_g();
  H.check_invariants();
  return H;
}

}  // namespace sie
