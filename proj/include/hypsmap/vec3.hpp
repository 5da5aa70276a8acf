// Small fixed-size vector used for sphere-valued profiles and frames.
#pragma once

#include <array>
#include <cmath>

#include "hypsmap/common.hpp"

namespace hypsmap {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double sup_dist(const Vec3& a, const Vec3& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (n < 1e-300) throw InvalidInput("normalized: zero vector");
  return v * (1.0 / n);
}

/// Remove the component of `v` along the unit vector `u`.
inline Vec3 reject(const Vec3& v, const Vec3& u) { return v - dot(v, u) * u; }

inline constexpr Vec3 kXAxis{1.0, 0.0, 0.0};
inline constexpr Vec3 kYAxis{0.0, 1.0, 0.0};
inline constexpr Vec3 kNorthPole{0.0, 0.0, 1.0};

}  // namespace hypsmap
