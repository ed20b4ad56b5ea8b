#include "tractdyn/sequences.hpp"

namespace tractdyn {

double radical_inverse(std::uint64_t i, unsigned base) noexcept {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

Halton2::Halton2(std::uint64_t seed) noexcept : start_(1 + seed % 1000003) {}

std::pair<double, double> Halton2::at(std::uint64_t k) const noexcept {
  return {radical_inverse(start_ + k, 2), radical_inverse(start_ + k, 3)};
}

std::pair<double, double> Halton2::next() noexcept { return at(index_++); }

}  // namespace tractdyn
