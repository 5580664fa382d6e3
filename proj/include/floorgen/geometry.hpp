#pragma once

#include <algorithm>
#include <cmath>

namespace floorgen {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::sqrt(norm2(a)); }
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

inline Vec2 normalized(const Vec2& a) {
  double n = norm(a);
  return n > 0.0 ? Vec2{a.x / n, a.y / n} : Vec2{0.0, 0.0};
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

  Vec2 xy() const { return {x, y}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return n > 0.0 ? Vec3{a.x / n, a.y / n, a.z / n} : Vec3{0.0, 0.0, 0.0};
}

// Squared distance from p to the segment [a, b].
inline double point_segment_dist2(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = norm2(ab);
  if (len2 <= 0.0) return norm2(p - a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  Vec2 q = a + ab * t;
  return norm2(p - q);
}

inline double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
  return std::sqrt(point_segment_dist2(p, a, b));
}

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Acute angle between two directions with n and -n identified, in radians.
inline double folded_angle(const Vec3& a, const Vec3& b) {
  double c = std::abs(dot(a, b)) / std::max(1e-300, norm(a) * norm(b));
  return std::acos(std::min(1.0, c));
}

inline double folded_angle(const Vec2& a, const Vec2& b) {
  double c = std::abs(dot(a, b)) / std::max(1e-300, norm(a) * norm(b));
  return std::acos(std::min(1.0, c));
}

}  // namespace floorgen
