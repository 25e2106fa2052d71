#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "sie/core.hpp"
#include "sie/models.hpp"
#include "sie/rng.hpp"
#include "sie/spectra.hpp"

namespace sie {

/// Open-boundary MPS. sites[i][s] is the (left bond x right bond) matrix for
/// physical index s; the first left bond and the last right bond are 1.
struct Mps {
  std::vector<std::vector<Mat>> sites;
  std::optional<int> center;  // orthogonality center, when known

  int n() const { return static_cast<int>(sites.size()); }
  int d(int i) const { return static_cast<int>(sites[i].size()); }
  std::vector<int> dims() const;
  /// Bond b sits between sites b and b+1; n-1 entries.
  std::vector<int> bond_dims() const;
  int max_bond() const;
  void validate() const;

  static Mps product(const std::vector<Vec>& site_states);
};

/// Per-bond record of one compression. Spectra are the exact Schmidt
/// coefficients of the input state; discards are what the sweep removed.
struct CompressionRecord {
  std::vector<std::vector<double>> spectra;  // per bond, descending
  std::vector<int> kept;
  std::vector<double> delta_sq;       // sum_{j > kept} lambda_j^2 of the exact spectrum
  std::vector<double> sweep_discard;  // weight actually removed at the bond
  std::vector<double> zeta_full;      // sum of all coefficients
  std::vector<double> zeta_top;       // sum of the first D coefficients
  std::vector<double> zeta_post;      // kept sum right after truncating the bond
  double norm_before = 0.0;
  double norm_after = 0.0;

  double total_discard() const;  // equals ||psi - compressed||^2
  double total_delta_sq() const;
  double max_delta() const;      // max_b sqrt(delta_sq)
};

struct FromDense {
  Mps mps;
  CompressionRecord record;
};
/// Left-to-right SVD factorization, bonds capped at D_max.
FromDense from_dense(const PureState& state, int D_max, double tol = 1e-14);
PureState to_dense(const Mps& mps, std::size_t cap = std::size_t{1} << 22);

Mps add(const Mps& a, const Mps& b, cplx coeff_a = 1.0, cplx coeff_b = 1.0);
Mps scaled(const Mps& a, cplx c);
/// h_Z |M> for a one- or two-site term, any distance.
Mps apply_local_term(const Mps& mps, const LocalTerm& term);

struct Compressed {
  Mps mps;
  CompressionRecord record;
};
/// QR left sweep, exact SVD right sweep (records spectra), truncating left
/// sweep keeping min(D, #{lambda > tol lambda_1}) per bond.
Compressed compress(const Mps& mps, int D, double tol = 1e-14);

/// Exact Schmidt spectra of every bond (no truncation).
std::vector<std::vector<double>> bond_spectra(const Mps& mps);

cplx overlap(const Mps& a, const Mps& b);  // <a|b>
double norm(const Mps& a);
/// <psi|h|psi> / <psi|psi>.
cplx local_expectation(const Mps& mps, const LocalTerm& observable);

Mps random_mps(Rng& rng, int n, int d, int D);

nlohmann::json to_json(const Mps& mps);
Mps mps_from_json(const nlohmann::json& j);
void write_record_csv(std::ostream& out, const CompressionRecord& rec);

}  // namespace sie
