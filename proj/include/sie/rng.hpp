#pragma once

#include <cstdint>

#include "sie/core.hpp"

namespace sie {

/// Counter-based generator: output i of stream (seed, stream) is
/// splitmix64(key + i * golden), so any draw can be reproduced without
/// replaying the sequence and substreams never share state.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  /// Independent child stream, e.g. one per seed or per grid point.
  Rng split(std::uint64_t stream) const;

  double uniform();  // [0, 1)
  double normal();   // Box-Muller, no cached spare
  cplx cnormal();    // standard complex Gaussian, E|z|^2 = 1
  int below(int n);  // uniform in [0, n)

  std::uint64_t seed() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

Vec random_vector(Rng& rng, Eigen::Index n);           // unit norm
Mat random_hermitian(Rng& rng, Eigen::Index n);        // GUE-like, unit operator norm
Mat random_unitary(Rng& rng, Eigen::Index n);          // Haar via QR

}  // namespace sie
