#include "tractdyn/core.hpp"

#include <cmath>

namespace tractdyn {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorKind::BranchLoss: return "BranchLoss";
    case ErrorKind::NotRepelling: return "NotRepelling";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::ScaleFloor: return "ScaleFloor";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::NoTractFound: return "NoTractFound";
    case ErrorKind::ContinuationStall: return "ContinuationStall";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::DivergenceDetected: return "DivergenceDetected";
  }
  return "Unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

Complex wrap_log(Complex z) noexcept {
  double im = std::remainder(z.imag(), kTwoPi);
  if (im <= -kPi) im += kTwoPi;
  return {z.real(), im};
}

}  // namespace tractdyn
