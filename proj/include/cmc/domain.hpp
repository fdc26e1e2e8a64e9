#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cmc/geometry.hpp"

namespace cmc {

enum class DomainKind { disc, ellipse, superellipse, support_function };

std::string_view to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view name);

/// Domain kind plus its parameter vector:
///   disc              {R}
///   ellipse           {a, b}        a >= b > 0, a along x
///   superellipse      {a, b, p}     |x/a|^p + |y/b|^p = 1
///   support_function  {rho0, eps, k} support function rho0 (1 + eps cos(k theta))
struct DomainSpec {
  DomainKind kind{DomainKind::disc};
  std::vector<double> params{1.0};
};

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Strictly convex planar domain bounded by a closed curve gamma(s),
/// s in [0, 2 pi), traversed counter-clockwise. Immutable once built.
class ConvexDomain {
 public:
  DomainKind kind() const { return spec_.kind; }
  const DomainSpec& spec() const { return spec_; }
  const std::vector<double>& params() const { return spec_.params; }

  static constexpr double period() { return 2.0 * kPi; }

  Vec2 point(double s) const { return point_(s); }
  /// d gamma / ds. Analytic for every kind.
  Vec2 tangent(double s) const { return tangent_(s); }
  Vec2 outward_normal(double s) const;
  /// Curvature with respect to the inner normal; positive on a convex curve.
  double curvature(double s) const;

  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  double k_min_param() const { return k_min_param_; }
  double k_max_param() const { return k_max_param_; }
  double perimeter() const { return perimeter_; }
  double diameter() const { return diameter_; }
  double area() const { return area_; }
  /// K_min and K_max agree to 1e-12 relative.
  bool is_circle() const;
  /// Short human-readable label, e.g. "ellipse(a=1.5,b=1)".
  std::string label() const;

  /// Arclength from s = 0 to s, by composite Gauss-Legendre quadrature.
  double arclength(double s) const;
  /// Inverse of arclength() on [0, perimeter()).
  double param_at_arclength(double length) const;

  /// Signed distance of p to the boundary: negative inside. Uses a dense
  /// polygonal sample of the curve, so it is accurate to O(sample spacing^2).
  double signed_distance(const Vec2& p) const;

 private:
  friend ConvexDomain build_domain(const DomainSpec& spec);
  ConvexDomain() = default;

  DomainSpec spec_;
  std::function<Vec2(double)> point_;
  std::function<Vec2(double)> tangent_;
  std::function<double(double)> closed_form_curvature_;  // empty for generic kinds
  double k_min_{0.0};
  double k_max_{0.0};
  double k_min_param_{0.0};
  double k_max_param_{0.0};
  double perimeter_{0.0};
  double diameter_{0.0};
  double area_{0.0};
  std::vector<double> arclength_table_;  // cumulative arclength at uniform s
  std::vector<Vec2> polygon_;            // dense boundary sample
};

/// Validates the parameters and builds the domain. Throws DomainError for
/// parameter choices that violate the kind constraints or strict convexity.
ConvexDomain build_domain(const DomainSpec& spec);

/// Exact curvature for disc/ellipse/superellipse; Richardson-extrapolated
/// finite differences of the parameterization for generic kinds.
double curvature_at(const ConvexDomain& domain, double s);

/// Curvature of a parameterized curve by extrapolated central differences.
double finite_difference_curvature(const std::function<Vec2(double)>& curve, double s,
                                   double step = 1e-3);

}  // namespace cmc
