#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "sie/core.hpp"
#include "sie/models.hpp"
#include "sie/mps.hpp"

namespace sie {

struct TdmrgConfig {
  ChainHamiltonian H;
  double t = 0.0;
  int N_steps = 0;
  int D = 1;
  Mps initial;
  int stage_factor = 4;        // staging cap = stage_factor * D
  int max_intermediate = 4096; // bond cap before any compression
  double tol = 1e-14;          // relative singular-value floor of the final compression

  double dt() const { return N_steps > 0 ? t / N_steps : 0.0; }
  /// g n dt <= 1, D >= 1, sizes consistent; throws StepTooCoarse / BadArgument.
  void validate() const;
};

/// ceil(g n t max(1, g n t / eps_target)).
int default_steps(const ChainHamiltonian& H, double t, double eps_target);

/// Uniform Schmidt-sum growth constant used by the certificate: the long-range
/// cap eta J0 / (eta - 2) for power-law chains, otherwise the largest
/// boundary norm sum over cuts.
double certificate_J_tilde(const ChainHamiltonian& H);

struct TdmrgStep {
  int m = 0;                        // 1-based
  std::vector<double> zeta_cut;     // full pre-truncation sum per cut
  std::vector<double> zeta_top_cut; // first-D sum per cut
  std::vector<double> zeta_post_cut;
  double zeta = 0.0;                // max over cuts of zeta_cut
  double delta_bar = 0.0;           // max over cuts of the exact tail at D
  double delta_cap = 0.0;           // zeta / sqrt(D)
  double truncation_charge = 0.0;   // max(sqrt(2n) delta_bar, actual discarded norm)
  double staging = 0.0;             // norm discarded while assembling the sum
  double linear_charge = 0.0;       // (g n dt)^2 max(1, ||M_m|| / 2)
  double cumulative = 0.0;          // running error bound after this step
  double norm = 0.0;                // ||M_m||
  int max_bond = 0;                 // before the final compression
  bool recursion_ok = true;
  bool cap_ok = true;
  bool delta_ok = true;
};

struct TdmrgCertificate {
  int n = 0, D = 0, N = 0;
  double t = 0.0, dt = 0.0, g = 0.0, J_tilde = 0.0;
  double zeta_cap = 0.0;       // exp(J t + (g n t)^2 / N)
  double delta_theory_cap = 0.0;  // zeta_cap / sqrt(D)
  std::vector<TdmrgStep> steps;
  double linear_total = 0.0;   // (g n t)^2 / N when no norm growth
  double sum_delta_bar = 0.0;
  double staging_total = 0.0;
  double final_bound = 0.0;    // bound on ||exp(-iHt) phi - M_N||
  std::optional<double> normalized_bound;  // empty when vacuous
  double theory_bound = 0.0;
  double naive_bound = 0.0;
  bool recursion_ok = true, cap_ok = true, delta_ok = true;

  bool invariants_ok() const { return recursion_ok && cap_ok && delta_ok; }
};

struct TdmrgResult {
  Mps state;  // unnormalized M_N
  TdmrgCertificate certificate;
};

TdmrgResult tdmrg_run(const TdmrgConfig& config);

/// (g n t)^2 / N + N sqrt(2n / D) exp(J t + (g n t)^2 / N).
double certificate_theory_bound(double g, int n, double t, int N, int D, double J_tilde);
/// eps (2 - eps) / (1 - eps); BoundVacuous for eps >= 1.
double normalized_final_error_bound(double eps);
/// Error recursion without Schmidt-sum monitoring,
/// ((1 + sqrt(2n))^N - 1) / sqrt(2n) (sqrt(2n) e^{J t} / sqrt(D) + (1 + sqrt(2n)) (g n t)^2 / N^2).
double naive_bound(double g, int n, double t, int N, int D, double J_tilde);

struct ExistenceRow {
  int D = 0;
  double error_sq = 0.0;
  double bound = 0.0;  // 2 e^{2 J t} n / D
  bool pass = false;
};
struct ExistenceReport {
  double t = 0.0, J_tilde = 0.0;
  std::vector<ExistenceRow> rows;
  std::vector<std::vector<double>> spectra;  // per cut s = 1..n-1
  double worst_lambda_ratio = 0.0;           // max_{cut, s} s lambda_s / e^{J t}
  bool lambda_ok = false;
  bool pass = false;
};
ExistenceReport state_mps_existence_check(const ChainHamiltonian& H, const PureState& initial, double t,
                                          const std::vector<int>& D_grid);

struct GibbsRow {
  int cut = 0;  // physical cut s, interleaved cut 2s
  int D = 0;
  double tail_sq = 0.0;
  double bound = 0.0;  // 480 ceil(beta Q0 / 4) D^{-1/kappa_beta}
};
struct GibbsReport {
  double beta = 0.0, Q0 = 0.0;
  long long steps = 0;      // ceil(beta Q0 / 4)
  double kappa_beta = 0.0;
  double overall_factor = 0.0;  // 960 n ceil(beta Q0 / 4)
  std::vector<GibbsRow> rows;
  std::vector<std::vector<double>> spectra;
  bool monotone = false;
  bool pass = false;
};
/// Q0 of the Gibbs theorem: 1 / min(1/(8 g k), (eta-2) / (16 e J0 (eta-1)^2 2^{eta-2})).
double gibbs_Q0(const ChainHamiltonian& H);
double gibbs_kappa_beta(const ChainHamiltonian& H, double beta);
/// Normalized interleaved purification of exp(-beta H).
PureState gibbs_purification(const ChainHamiltonian& H, double beta);
GibbsReport gibbs_tail_experiment(const ChainHamiltonian& H, double beta, const std::vector<int>& D_grid);

nlohmann::json to_json(const TdmrgCertificate& c);
void write_certificate_csv(std::ostream& out, const TdmrgCertificate& c);
nlohmann::json to_json(const ExistenceReport& r);
nlohmann::json to_json(const GibbsReport& r);

}  // namespace sie
