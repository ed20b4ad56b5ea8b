#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tractdyn {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Failure modes surfaced by the numerical kernels. The CLI maps these onto
/// exit codes and machine-readable error records.
enum class ErrorKind {
  InvalidArgument,
  InvalidGrid,
  NonConvergence,
  BudgetExceeded,
  DegenerateDerivative,
  BranchLoss,
  NotRepelling,
  Overflow,
  ScaleFloor,
  ZeroDenominator,
  NoTractFound,
  ContinuationStall,
  NoSignChange,
  DivergenceDetected,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Reduces the imaginary part into (-pi, pi]; used to compare logarithms
/// modulo 2*pi*i.
Complex wrap_log(Complex z) noexcept;

}  // namespace tractdyn
