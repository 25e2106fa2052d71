#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sie/core.hpp"
#include "sie/models.hpp"
#include "sie/se_strength.hpp"

namespace sie {

/// Gaussian-filter approximate ground-state projector
/// K = (4 pi beta)^{-1/2} int_{-tc}^{tc} exp(-t^2/(4 beta)) exp(-iHt) dt,
/// tc = 2 beta Delta, with H shifted so its ground energy is zero.
struct AgspOperator {
  double beta = 0.0;
  double gap = 0.0;     // Delta
  double t_c = 0.0;
  double shift = 0.0;   // E0 subtracted from H
  int nodes = 0;        // quadrature nodes used
  double quad_change = 0.0;  // last doubling change in operator norm
  RVec energies;        // shifted spectrum, ascending
  RVec filter;          // k(E_i), real by symmetry of the node set
  Mat evecs;
  Mat K;                // dense realization in the original basis

  Vec ground() const { return evecs.col(0); }
};

struct AgspOptions {
  double quad_tol = 1e-10;
  int max_panels = 1 << 14;
};

AgspOperator build_agsp(const Mat& H, double beta, const AgspOptions& opts = {});

struct AgspChecks {
  double ground_defect = 0.0;       // ||(K - 1)|Omega>||
  double ground_bound = 0.0;        // exp(-beta Delta^2)
  double excited_norm = 0.0;        // ||K P_perp||
  double excited_bound = 0.0;       // 2 exp(-beta Delta^2)
  double gaussian_distance = 0.0;   // ||K - exp(-beta H^2)||
  double gaussian_bound = 0.0;      // exp(-tc^2/(4 beta))
  bool pass(double tol) const;
};
/// Evaluated on the dense matrix K, independently of the filter values.
AgspChecks check_agsp(const AgspOperator& K);

double agsp_se_cap(double beta, double Delta, double J_tilde);

// ---- ground-state tails -----------------------------------------------------

struct GroundTailRow {
  int cut = 0;
  int D = 0;
  double tail_sq = 0.0;
  double bound = 0.0;  // 32 D^{-Delta/(2 J + Delta)} (the D0 = 1 proxy)
};

struct GroundTailReport {
  double E0 = 0.0, E1 = 0.0, gap = 0.0;
  double J_tilde = 0.0;
  double exponent = 0.0;  // -Delta/(2 J_tilde + Delta)
  bool small_gap = false;
  std::vector<GroundTailRow> rows;
  std::vector<std::pair<int, double>> slopes;  // per cut, log-log slope of tail^2 vs D
  std::vector<std::vector<double>> spectra;    // per cut
};

GroundTailReport ground_tail_experiment(const ChainHamiltonian& H, const std::vector<int>& cuts,
                                        const std::vector<int>& D_grid, double gap_floor = 1e-6);

// ---- area law ----------------------------------------------------------------

struct AreaLawConstants {
  double kappa_Delta = 0.0;
  double log_C = 0.0;  // C itself overflows quickly; log C is carried
  double C = 0.0;      // exp(log_C), may be inf
  double c_kappa_1 = 0.0;
  double c_kappa_2 = 0.0;
  double entropy_bound = 0.0;
};

AreaLawConstants area_law_constants(double g_tilde, double Delta, double S0, double c_tilde0);
/// The two entropy-bound coefficients as functions of kappa.
double c_kappa_1(double kappa);
double c_kappa_2(double kappa);

/// H(nu) = H_A + H_B + V(nu) on A (x) B.
struct BoundaryFamily {
  std::vector<int> dims_A, dims_B;
  Mat H_A, H_B;                       // on A and B alone
  std::function<Mat(double)> V;       // on A (x) B
  std::function<BipartiteOperator(double)> V_op;  // with decomposition, for SE bounds
  Mat H(double nu) const;
};

/// Two coupled qutrits: H_A = H_B = diag(0, 1, 2) shifted, V(nu) = nu * g * X(x)X
/// with X the symmetric shift.
BoundaryFamily two_qudit_family(int d = 3, double g_tilde = 1.0, double level_spacing = 2.0);

struct AdiabaticRow {
  int D = 0;
  double error = 0.0;
  double bound = 0.0;  // C D^{-kappa_Delta}
  bool pass = false;
};

struct BoundaryAdiabaticReport {
  double epsilon = 0.0, beta = 0.0;
  double Delta = 0.0, g_tilde = 0.0, c_tilde0 = 0.0, S0 = 0.0;
  AreaLawConstants constants;
  double E1_target = 0.0;  // von Neumann entropy of the final ground state
  double adiabatic_infidelity = 0.0;
  double adiabatic_bound = 0.0;
  int adiabatic_steps = 0;
  std::vector<AdiabaticRow> rows;
  bool entropy_pass = false;
  bool pass = false;
};

BoundaryAdiabaticReport boundary_adiabatic_experiment(const BoundaryFamily& family, double epsilon, double beta,
                                                      const std::vector<int>& D_grid, int nu_grid = 101);

nlohmann::json to_json(const BoundaryAdiabaticReport& r);
nlohmann::json to_json(const AgspOperator& K, const AgspChecks& c);

}  // namespace sie
