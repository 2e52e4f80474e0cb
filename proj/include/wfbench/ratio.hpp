#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "wfbench/errors.hpp"

namespace wfbench {

/// Competitiveness ratio as an exact rational. Integer c is the common
/// case (den == 1); "7/2" style ratios stay exact by scaling all edge
/// arithmetic by den.
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 1;

  constexpr Ratio() = default;
  constexpr Ratio(std::int64_t n) : num(n), den(1) {}
  Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den <= 0) throw ValidationError("ratio denominator must be positive");
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }
  std::string to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

  bool operator==(const Ratio&) const = default;
};

}  // namespace wfbench
