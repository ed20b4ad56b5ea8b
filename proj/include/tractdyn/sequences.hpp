#pragma once

#include <cstdint>
#include <utility>

namespace tractdyn {

/// Van der Corput radical inverse of i in the given base.
double radical_inverse(std::uint64_t i, unsigned base) noexcept;

/// Two-dimensional Halton points (bases 2 and 3) on the unit square. The seed
/// only shifts the starting index, so every run with the same seed sees the
/// same points.
class Halton2 {
 public:
  explicit Halton2(std::uint64_t seed = 0) noexcept;
  std::pair<double, double> next() noexcept;
  std::pair<double, double> at(std::uint64_t k) const noexcept;

 private:
  std::uint64_t start_;
  std::uint64_t index_ = 0;
};

}  // namespace tractdyn
