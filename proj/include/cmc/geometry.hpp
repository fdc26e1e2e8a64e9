#pragma once

#include <array>
#include <cmath>

namespace cmc {

/// Point or vector in the plane.
struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return dot(a, a); }
/// Counter-clockwise rotation by 90 degrees.
constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
constexpr double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross(b - a, c - a);
}

/// Symmetric 2x2 matrix, used for Hessians.
struct SymMat2 {
  double xx{0.0};
  double xy{0.0};
  double yy{0.0};

  constexpr double det() const { return xx * yy - xy * xy; }
  constexpr double trace() const { return xx + yy; }
  /// Eigenvalues in ascending order.
  std::array<double, 2> eigenvalues() const {
    const double m = 0.5 * (xx + yy);
    const double r = std::hypot(0.5 * (xx - yy), xy);
    return {m - r, m + r};
  }
  constexpr Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace cmc
