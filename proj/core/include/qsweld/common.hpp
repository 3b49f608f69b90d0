#ifndef QSWELD_COMMON_HPP
#define QSWELD_COMMON_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qsweld {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Failure categories raised by the library. Each operation documents which
/// codes it can produce; the CLI maps them onto exit statuses.
enum class ErrorCode {
  NonMonotone,
  WrongDegree,
  DegenerateRatio,
  ExtensionDegenerate,
  RadiiOrder,
  InvalidGrid,
  NoConvergence,
  BudgetExceeded,
  DegenerateJacobian,
  ResidualTooLarge,
  SelfIntersecting,
  OrientationMismatch,
  ChartMismatch,
  NonNested,
  CollarTooWide,
  DegenerateAffine,
  MonotonicityLost,
  CutoutEscapes,
  IllConditioned,
  MissingSample,
  DimensionMismatch,
  RealValuedSelector,
  OutOfWindow,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Wraps an angle into [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

/// Signed circular difference a - b reduced to (-pi, pi].
inline double angle_difference(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

}  // namespace qsweld

#endif  // QSWELD_COMMON_HPP
