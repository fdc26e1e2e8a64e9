#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "cmc/geometry.hpp"

// Closed-form reference solutions.
//
// The radial family solves div(Dv / sqrt(1 - t^2 |Dv|^2)) = 2H on the disc of
// radius R with v = 0 on the boundary. Its flux is exactly H r e_r, which gives
//   v_t(r)  = (sqrt(1 + t^2 H^2 r^2) - sqrt(1 + t^2 H^2 R^2)) / (t^2 H)
//   v_t'(r) = H r / sqrt(1 + t^2 H^2 r^2).
// At t = 1 this is the hyperbolic cap sqrt(r^2 + 1/H^2) - sqrt(R^2 + 1/H^2);
// at t = 0 it degenerates to the Poisson paraboloid H (r^2 - R^2) / 2.
namespace cmc::oracle {

class OracleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RadialSample {
  double value{0.0};
  double slope{0.0};  // d/dr
};

/// Member v_t of the homotopy family on the disc; t = 0 delegates to poisson_disc.
RadialSample radial_cap(double R, double H, double t, double r);

/// Solution of Laplace(v) = 2H on the disc, v(R) = 0.
RadialSample poisson_disc(double R, double H, double r);

/// Second radial derivative of v_t.
double radial_cap_curvature(double R, double H, double t, double r);

/// Residual of the radial form of the family equation,
///   v'' / (1 - t^2 v'^2)^{3/2} + v' / (r sqrt(1 - t^2 v'^2)) - 2H,
/// evaluated from the closed-form derivatives (r = 0 uses the limit v'/r -> v'').
double radial_cap_residual(double R, double H, double t, double r);

/// The t-member as a function of Cartesian coordinates, for any scalar type
/// with +, *, / and an ADL-visible sqrt (double or Jet). No range checks.
template <class T>
T radial_cap_xy(double R, double H, double t, const T& x, const T& y) {
  using std::sqrt;
  const T r2 = x * x + y * y;
  if (t == 0.0) return 0.5 * H * (r2 - R * R);
  const double a = t * t * H * H;
  const T sr = sqrt(1.0 + a * r2);
  return H * (r2 - R * R) / (sr + std::sqrt(1.0 + a * R * R));
}

/// Value of the t-member at a planar point (radially symmetric about the origin).
double radial_cap_value(double R, double H, double t, const Vec2& p);
Vec2 radial_cap_gradient(double R, double H, double t, const Vec2& p);

/// Upper sheet of a hyperbolic cylinder of radius r whose generators are
/// parallel to the unit vector `axis` through the origin:
///   v(p) = sqrt(r^2 + d^2) + offset,  d = cross(axis, p).
/// As a spacelike graph it has mean curvature 1 / (2r) and zero Gaussian curvature.
struct HyperbolicCylinder {
  double radius{0.5};
  Vec2 axis{0.0, 1.0};
  double offset{0.0};

  double mean_curvature() const { return 1.0 / (2.0 * radius); }
};

double hyperbolic_cylinder(const HyperbolicCylinder& cyl, const Vec2& p);
double hyperbolic_cylinder(double r, const Vec2& axis, double offset, const Vec2& p);

/// Re(lambda * (x + i y)^n).
double harmonic_leading(int n, std::complex<double> lambda, const Vec2& p);

}  // namespace cmc::oracle
