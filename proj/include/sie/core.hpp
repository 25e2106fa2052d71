#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sie {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr cplx kI{0.0, 1.0};

/// Error codes surfaced to callers. The string form is what tests and the CLI
/// match against.
enum class Code {
  ZeroState,
  BadCut,
  Unnormalized,
  BadAlpha,
  BadExpansion,
  NoDecomposition,
  BadWeight,
  AlphaOutOfRange,
  EtaTooSmall,
  TimeTooLong,
  BelowThreshold,
  TooLarge,
  GapClosed,
  Degenerate,
  ZOutOfRange,
  Mismatch,
  UnsupportedLocality,
  IntermediateTooLarge,
  StepTooCoarse,
  BoundVacuous,
  BadArgument,
};

const char* code_name(Code c);

class Error : public std::runtime_error {
 public:
  Error(Code c, const std::string& what)
      : std::runtime_error(std::string(code_name(c)) + ": " + what), code_(c) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

[[noreturn]] inline void fail(Code c, const std::string& what) { throw Error(c, what); }

/// Product of per-site dimensions, throwing TooLarge past `cap`.
std::size_t total_dim(const std::vector<int>& dims, std::size_t cap = std::size_t{1} << 30);

}  // namespace sie
