#pragma once

#include <span>
#include <vector>

#include "tractdyn/core.hpp"

namespace tractdyn {

struct RootOptions {
  /// Residual target |q(r)| <= abs_tolerance for every root.
  double abs_tolerance = 1e-12;
  int max_iterations = 800;
};

/// All roots of the polynomial with the given coefficients (constant term
/// first), with multiplicity, by Aberth-Ehrlich simultaneous iteration started
/// from a deterministic perturbed ring. Throws NonConvergence when the
/// residual target is missed after the iteration cap.
std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, const RootOptions& opts = {});

}  // namespace tractdyn
