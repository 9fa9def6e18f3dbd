#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace aircine {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Normalize an angle to [0, 2*pi).
inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;  // fmod rounding can land exactly on 2*pi
  return a;
}

// Shortest signed difference a - b, in [-pi, pi).
inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d < -kPi) d += kTwoPi;
  if (d >= kPi) d -= kTwoPi;
  return d;
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace aircine
