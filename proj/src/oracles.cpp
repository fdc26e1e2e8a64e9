#include "cmc/oracles.hpp"

#include <cmath>
#include <string>

namespace cmc::oracle {

namespace {

void check_radius(double R, double r) {
  if (!(R > 0.0)) throw OracleError("disc radius must be positive");
  if (!(r >= 0.0 && r <= R * (1.0 + 1e-14)))
    throw OracleError("radius " + std::to_string(r) + " outside [0, " + std::to_string(R) + "]");
}

}  // namespace

RadialSample poisson_disc(double R, double H, double r) {
  check_radius(R, r);
  return {0.5 * H * (r * r - R * R), H * r};
}

RadialSample radial_cap(double R, double H, double t, double r) {
  if (!(H > 0.0)) throw OracleError("radial cap needs H > 0");
  if (!(t >= 0.0 && t <= 1.0)) throw OracleError("homotopy parameter must lie in [0, 1]");
  if (t == 0.0) return poisson_disc(R, H, r);
  check_radius(R, r);
  const double a = t * t * H * H;
  const double sr = std::sqrt(1.0 + a * r * r);
  const double sR = std::sqrt(1.0 + a * R * R);
  // (sr - sR) / (t^2 H) rewritten without cancellation.
  const double value = H * (r * r - R * R) / (sr + sR);
  return {value, H * r / sr};
}

double radial_cap_curvature(double R, double H, double t, double r) {
  check_radius(R, r);
  const double a = t * t * H * H;
  return H / std::pow(1.0 + a * r * r, 1.5);
}

double radial_cap_residual(double R, double H, double t, double r) {
  const RadialSample s = radial_cap(R, H, t, r);
  const double vrr = radial_cap_curvature(R, H, t, r);
  const double w = 1.0 - t * t * s.slope * s.slope;
  const double hoop = r > 0.0 ? s.slope / r : vrr;
  return vrr / std::pow(w, 1.5) + hoop / std::sqrt(w) - 2.0 * H;
}

double radial_cap_value(double R, double H, double t, const Vec2& p) {
  return radial_cap(R, H, t, std::min(norm(p), R)).value;
}

Vec2 radial_cap_gradient(double R, double H, double t, const Vec2& p) {
  const double r = norm(p);
  if (r == 0.0) return {};
  const double slope = radial_cap(R, H, t, std::min(r, R)).slope;
  return (slope / r) * p;
}

double hyperbolic_cylinder(const HyperbolicCylinder& cyl, const Vec2& p) {
  const double d = cross(cyl.axis, p);
  return std::sqrt(cyl.radius * cyl.radius + d * d) + cyl.offset;
}

double hyperbolic_cylinder(double r, const Vec2& axis, double offset, const Vec2& p) {
  return hyperbolic_cylinder(HyperbolicCylinder{r, axis, offset}, p);
}

double harmonic_leading(int n, std::complex<double> lambda, const Vec2& p) {
  return std::real(lambda * std::pow(std::complex<double>(p.x, p.y), n));
}

}  // namespace cmc::oracle
