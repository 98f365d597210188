#pragma once

#include <cmath>
#include <numbers>

namespace qsagnac {

inline constexpr double pi = std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / pi; }

// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) noexcept {
  double w = std::remainder(phi, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

}  // namespace qsagnac
