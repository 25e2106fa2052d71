#include "sie/tdmrg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sie/dynamics.hpp"
#include "sie/io.hpp"
#include "sie/linalg.hpp"
#include "sie/se_strength.hpp"

namespace sie {

void TdmrgConfig::validate() const {
  if (H.n < 1) fail(Code::BadArgument, "empty chain");
  if (initial.n() != H.n || initial.dims() != H.dims()) fail(Code::Mismatch, "initial state does not match the chain");
  if (D < 1) fail(Code::BadArgument, "bond cap must be >= 1");
  if (stage_factor < 1 || max_intermediate < D) fail(Code::BadArgument, "staging caps");
  if (t < 0.0 || N_steps < 0) fail(Code::BadArgument, "time and step count must be nonnegative");
  if (t > 0.0 && N_steps == 0) fail(Code::StepTooCoarse, "positive time needs at least one step");
  if (H.g * H.n * dt() > 1.0 + 1e-12)
    fail(Code::StepTooCoarse, "g n dt = " + io::fmt_double(H.g * H.n * dt()) + " exceeds 1");
}

int default_steps(const ChainHamiltonian& H, double t, double eps_target) {
  if (!(eps_target > 0.0)) fail(Code::BadArgument, "error target must be positive");
  const double gnt = H.g * H.n * t;
  return static_cast<int>(std::ceil(gnt * std::max(1.0, gnt / eps_target)));
}

double certificate_J_tilde(const ChainHamiltonian& H) {
  if (H.eta > 2.0 && H.J0 > 0.0) return long_range_se_bound(H.J0, H.eta);
  double j = 0.0;
  for (int s = 1; s < H.n; ++s) j = std::max(j, split_at_cut(H, s).boundary_norm_sum);
  return j;
}

namespace {

std::vector<double> bond_sums(const std::vector<std::vector<double>>& spectra) {
  std::vector<double> out;
  for (const auto& s : spectra) {
    double z = 0.0;
    for (double x : s) z += x;
    out.push_back(z);
  }
  return out;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

TdmrgResult tdmrg_run(const TdmrgConfig& config) {
  config.validate();
  const ChainHamiltonian& H = config.H;
  const int n = H.n;
  const double dt = config.dt();
  const double gndt = H.g * n * dt;
  const double sq2n = std::sqrt(2.0 * n);
  const int stage_cap = config.stage_factor * config.D;

  TdmrgCertificate cert;
  cert.n = n;
  cert.D = config.D;
  cert.N = config.N_steps;
  cert.t = config.t;
  cert.dt = dt;
  cert.g = H.g;
  cert.J_tilde = certificate_J_tilde(H);
  const double gnt = H.g * n * config.t;
  const double gnt2_over_N = config.N_steps > 0 ? gnt * gnt / config.N_steps : 0.0;

  const double nrm0 = norm(config.initial);
  if (nrm0 == 0.0) fail(Code::ZeroState, "initial state is zero");
  Mps M = scaled(config.initial, 1.0 / nrm0);
  std::vector<double> post_prev = bond_sums(bond_spectra(M));
  const double zeta0 = std::max(1.0, max_of(post_prev));
  cert.zeta_cap = zeta0 * std::exp(cert.J_tilde * config.t + gnt2_over_N);
  cert.delta_theory_cap = cert.zeta_cap / std::sqrt(static_cast<double>(config.D));
  const double growth = 1.0 + cert.J_tilde * dt + gndt * gndt;

  double cumulative = 0.0;
  for (int m = 1; m <= config.N_steps; ++m) {
    TdmrgStep st;
    st.m = m;
    const double normM = norm(M);
    std::vector<Mps> parts;
    parts.reserve(H.terms.size() + 1);
    parts.push_back(M);
    for (const LocalTerm& h : H.terms) parts.push_back(scaled(apply_local_term(M, h), cplx(0.0, -dt)));

    // Pairwise tree summation; every discarded weight is charged.
    double staging = 0.0;
    while (parts.size() > 1) {
      std::vector<Mps> next;
      next.reserve((parts.size() + 1) / 2);
      for (std::size_t i = 0; i < parts.size(); i += 2) {
        if (i + 1 == parts.size()) {
          next.push_back(std::move(parts[i]));
          continue;
        }
        Mps s = add(parts[i], parts[i + 1]);
        if (s.max_bond() > config.max_intermediate)
          fail(Code::IntermediateTooLarge, "bond " + std::to_string(s.max_bond()) + " at step " + std::to_string(m));
        if (s.max_bond() > stage_cap) {
          Compressed c = compress(s, stage_cap, 0.0);
          staging += std::sqrt(c.record.total_discard());
          s = std::move(c.mps);
        }
        next.push_back(std::move(s));
      }
      parts = std::move(next);
    }
    st.max_bond = parts[0].max_bond();
    Compressed c = compress(parts[0], config.D, config.tol);
    const CompressionRecord& rec = c.record;

    st.zeta_cut = rec.zeta_full;
    st.zeta_top_cut = rec.zeta_top;
    st.zeta_post_cut = rec.zeta_post;
    st.zeta = max_of(rec.zeta_full);
    st.delta_bar = rec.max_delta();
    st.delta_cap = st.zeta / std::sqrt(static_cast<double>(config.D));
    st.truncation_charge = std::max(sq2n * st.delta_bar, std::sqrt(rec.total_discard()));
    st.staging = staging;
    st.linear_charge = gndt * gndt * std::max(1.0, normM / 2.0);
    cumulative += st.linear_charge + st.truncation_charge + st.staging;
    st.cumulative = cumulative;
    st.norm = rec.norm_after;

    const double stage_slack = std::sqrt(2.0 * config.max_intermediate) * staging;
    for (std::size_t b = 0; b < st.zeta_cut.size(); ++b) {
      const double allowed = growth * post_prev[b] + 1e-9 * std::max(1.0, post_prev[b]) + stage_slack;
      if (st.zeta_cut[b] > allowed) st.recursion_ok = false;
    }
    st.cap_ok = st.zeta <= cert.zeta_cap * (1.0 + 1e-9) + stage_slack;
    st.delta_ok = st.delta_bar <= st.delta_cap + 1e-12;
    cert.recursion_ok = cert.recursion_ok && st.recursion_ok;
    cert.cap_ok = cert.cap_ok && st.cap_ok;
    cert.delta_ok = cert.delta_ok && st.delta_ok;

    cert.linear_total += st.linear_charge;
    cert.sum_delta_bar += st.delta_bar;
    cert.staging_total += staging;
    post_prev = rec.zeta_post;
    M = std::move(c.mps);
    cert.steps.push_back(std::move(st));
  }
  cert.final_bound = cumulative;
  if (cumulative < 1.0) cert.normalized_bound = normalized_final_error_bound(cumulative);
  cert.theory_bound = certificate_theory_bound(H.g, n, config.t, config.N_steps, config.D, cert.J_tilde);
  cert.naive_bound = naive_bound(H.g, n, config.t, config.N_steps, config.D, cert.J_tilde);
  return {std::move(M), std::move(cert)};
}

double certificate_theory_bound(double g, int n, double t, int N, int D, double J_tilde) {
  if (N == 0) {
    if (t == 0.0) return 0.0;
    fail(Code::StepTooCoarse, "positive time needs at least one step");
  }
  if (N < 0 || D < 1 || n < 1) fail(Code::BadArgument, "N >= 0, D >= 1, n >= 1 required");
  const double gnt = g * n * t;
  if (gnt / N > 1.0 + 1e-12) fail(Code::StepTooCoarse, "g n dt exceeds 1");
  const double lin = gnt * gnt / N;
  return lin + N * std::sqrt(2.0 * n / D) * std::exp(J_tilde * t + lin);
}

double normalized_final_error_bound(double eps) {
  if (eps < 0.0) fail(Code::BadArgument, "error must be nonnegative");
  if (eps >= 1.0) fail(Code::BoundVacuous, "raw error bound " + io::fmt_double(eps) + " >= 1");
  return eps * (2.0 - eps) / (1.0 - eps);
}

double naive_bound(double g, int n, double t, int N, int D, double J_tilde) {
  if (N == 0) return 0.0;
  const double r = std::sqrt(2.0 * n);
  const double gnt = g * n * t;
  const double per_step = r * std::exp(J_tilde * t) / std::sqrt(static_cast<double>(D)) +
                          (1.0 + r) * gnt * gnt / (static_cast<double>(N) * N);
  const double log_growth = N * std::log1p(r);
  const double amp = log_growth > 700.0 ? kInf : std::expm1(log_growth) / r;
  return amp * per_step;
}

ExistenceReport state_mps_existence_check(const ChainHamiltonian& H, const PureState& initial, double t,
                                          const std::vector<int>& D_grid) {
  ExistenceReport rep;
  rep.t = t;
  rep.J_tilde = certificate_J_tilde(H);
  const PureState psi = evolve_dense(H, initial.normalized(), t);
  const int n = H.n;
  const double cap = std::exp(rep.J_tilde * t);
  rep.lambda_ok = true;
  for (int s = 1; s < n; ++s) {
    const SchmidtSpectrum sp = schmidt_decompose(psi, Cut::at(s, n));
    for (std::size_t j = 0; j < sp.coeffs.size(); ++j) {
      const double ratio = (j + 1) * sp.coeffs[j] / cap;
      rep.worst_lambda_ratio = std::max(rep.worst_lambda_ratio, ratio);
      if (ratio > 1.0 + 1e-10) rep.lambda_ok = false;
    }
    rep.spectra.push_back(sp.coeffs);
  }
  rep.pass = rep.lambda_ok;
  for (int D : D_grid) {
    ExistenceRow row;
    row.D = D;
    const FromDense fd = from_dense(psi, D, 0.0);
    row.error_sq = (psi.amps() - to_dense(fd.mps).amps()).squaredNorm();
    row.bound = 2.0 * std::exp(2.0 * rep.J_tilde * t) * n / D;
    row.pass = row.error_sq <= row.bound;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

double gibbs_Q0(const ChainHamiltonian& H) {
  if (H.g <= 0.0) fail(Code::BadArgument, "Hamiltonian has no terms");
  double inv = 1.0 / (8.0 * H.g * H.k);
  if (H.J0 > 0.0) {
    if (!(H.eta > 2.0)) fail(Code::EtaTooSmall, "decay exponent must exceed 2");
    const double e = std::numbers::e;
    inv = std::min(inv, (H.eta - 2.0) /
                            (16.0 * e * H.J0 * (H.eta - 1.0) * (H.eta - 1.0) * std::pow(2.0, H.eta - 2.0)));
  }
  return 1.0 / inv;
}

double gibbs_kappa_beta(const ChainHamiltonian& H, double beta) {
  if (!(H.eta > 2.0)) fail(Code::EtaTooSmall, "decay exponent must exceed 2");
  const double steps = std::ceil(beta * gibbs_Q0(H) / 4.0);
  return 4.0 * (6.0 + 4.0 * (H.k + 1) / (H.eta - 2.0) + 2.0 * H.k * std::log2(static_cast<double>(H.d))) * steps;
}

PureState gibbs_purification(const ChainHamiltonian& H, double beta) {
  if (beta < 0.0) fail(Code::BadArgument, "inverse temperature must be nonnegative");
  if (H.n > 7) fail(Code::TooLarge, "purification is limited to n <= 7");
  const Mat half = expm_herm(H.dense(), cplx(-beta / 2.0, 0.0));
  const Eigen::Index dim = half.rows();
  Vec amps(dim * dim);
  for (Eigen::Index x = 0; x < dim; ++x)
    for (Eigen::Index y = 0; y < dim; ++y) amps[x * dim + y] = half(x, y);
  std::vector<int> dims(2 * H.n, H.d), perm(2 * H.n);
  for (int i = 0; i < H.n; ++i) {
    perm[2 * i] = i;
    perm[2 * i + 1] = H.n + i;
  }
  return PureState(dims, permute_sites(amps, dims, perm)).normalized();
}

GibbsReport gibbs_tail_experiment(const ChainHamiltonian& H, double beta, const std::vector<int>& D_grid) {
  GibbsReport rep;
  rep.beta = beta;
  rep.Q0 = gibbs_Q0(H);
  rep.steps = static_cast<long long>(std::ceil(beta * rep.Q0 / 4.0));
  rep.kappa_beta = gibbs_kappa_beta(H, beta);
  rep.overall_factor = 960.0 * H.n * rep.steps;
  const PureState phi = gibbs_purification(H, beta);
  std::vector<int> grid = D_grid;
  std::sort(grid.begin(), grid.end());
  rep.monotone = true;
  bool below = true;
  for (int s = 1; s < H.n; ++s) {
    const SchmidtSpectrum sp = schmidt_decompose(phi, Cut::at(2 * s, 2 * H.n));
    rep.spectra.push_back(sp.coeffs);
    double prev = kInf;
    for (int D : grid) {
      GibbsRow row;
      row.cut = s;
      row.D = D;
      for (std::size_t j = static_cast<std::size_t>(D); j < sp.coeffs.size(); ++j) row.tail_sq += sp.coeffs[j] * sp.coeffs[j];
      row.bound = rep.steps == 0 ? 0.0 : 480.0 * rep.steps * std::pow(static_cast<double>(D), -1.0 / rep.kappa_beta);
      if (row.tail_sq > prev + 1e-15) rep.monotone = false;
      if (row.tail_sq > row.bound + 1e-12) below = false;
      prev = row.tail_sq;
      rep.rows.push_back(row);
    }
  }
  rep.pass = rep.monotone && below;
  return rep;
}

nlohmann::json to_json(const TdmrgCertificate& c) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : c.steps)
    steps.push_back({{"m", s.m},
                     {"zeta", s.zeta},
                     {"zeta_cut", s.zeta_cut},
                     {"zeta_top_cut", s.zeta_top_cut},
                     {"zeta_post_cut", s.zeta_post_cut},
                     {"delta_bar", s.delta_bar},
                     {"delta_cap", s.delta_cap},
                     {"truncation_charge", s.truncation_charge},
                     {"staging", s.staging},
                     {"linear_charge", s.linear_charge},
                     {"cumulative", s.cumulative},
                     {"norm", s.norm},
                     {"max_bond", s.max_bond},
                     {"recursion_ok", s.recursion_ok},
                     {"cap_ok", s.cap_ok},
                     {"delta_ok", s.delta_ok}});
  nlohmann::json j = {{"n", c.n},
                      {"D", c.D},
                      {"N", c.N},
                      {"t", c.t},
                      {"dt", c.dt},
                      {"g", c.g},
                      {"J_tilde", c.J_tilde},
                      {"zeta_cap", c.zeta_cap},
                      {"delta_theory_cap", c.delta_theory_cap},
                      {"linear_total", c.linear_total},
                      {"sum_delta_bar", c.sum_delta_bar},
                      {"staging_total", c.staging_total},
                      {"final_bound", c.final_bound},
                      {"theory_bound", io::fmt_double(c.theory_bound)},
                      {"naive_bound", io::fmt_double(c.naive_bound)},
                      {"recursion_ok", c.recursion_ok},
                      {"cap_ok", c.cap_ok},
                      {"delta_ok", c.delta_ok},
                      {"steps", steps}};
  j["normalized_bound"] = c.normalized_bound ? nlohmann::json(*c.normalized_bound) : nlohmann::json("vacuous");
  return j;
}

void write_certificate_csv(std::ostream& out, const TdmrgCertificate& c) {
  io::CsvWriter w(out);
  w.row({"m", "zeta", "delta_bar", "delta_cap", "truncation_charge", "staging", "linear_charge", "cumulative", "norm",
         "max_bond"});
  for (const auto& s : c.steps)
    w.row({std::to_string(s.m), io::fmt_double(s.zeta), io::fmt_double(s.delta_bar), io::fmt_double(s.delta_cap),
           io::fmt_double(s.truncation_charge), io::fmt_double(s.staging), io::fmt_double(s.linear_charge),
           io::fmt_double(s.cumulative), io::fmt_double(s.norm), std::to_string(s.max_bond)});
}

nlohmann::json to_json(const ExistenceReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"D", x.D}, {"error_sq", x.error_sq}, {"bound", x.bound}, {"pass", x.pass}});
  return {{"t", r.t},           {"J_tilde", r.J_tilde},   {"rows", rows},
          {"worst_lambda_ratio", r.worst_lambda_ratio}, {"lambda_ok", r.lambda_ok}, {"pass", r.pass}};
}

nlohmann::json to_json(const GibbsReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"cut", x.cut}, {"D", x.D}, {"tail_sq", x.tail_sq}, {"bound", x.bound}});
  return {{"beta", r.beta},         {"Q0", r.Q0},         {"steps", r.steps},
          {"kappa_beta", r.kappa_beta}, {"overall_factor", r.overall_factor}, {"rows", rows},
          {"monotone", r.monotone}, {"pass", r.pass}};
}

}  // namespace sie
