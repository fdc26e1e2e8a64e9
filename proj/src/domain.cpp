#include "cmc/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace cmc {

namespace {

constexpr int kArclengthIntervals = 4096;
constexpr int kPolygonSamples = 2048;
constexpr int kCurvatureSamples = 4096;
constexpr double kGoldenTol = 1e-8;

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

template <class F>
double gauss_legendre(const F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) sum += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
  return sum * half;
}

double wrap_param(double s) {
  const double p = ConvexDomain::period();
  s = std::fmod(s, p);
  return s < 0.0 ? s + p : s;
}

double sgn_pow(double v, double q) { return std::copysign(std::pow(std::abs(v), q), v); }

// Golden-section search for the minimum of f on [lo, hi].
template <class F>
double golden_section_min(const F& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::disc:
      return "disc";
    case DomainKind::ellipse:
      return "ellipse";
    case DomainKind::superellipse:
      return "superellipse";
    case DomainKind::support_function:
      return "support_function";
  }
  return "unknown";
}

DomainKind parse_domain_kind(std::string_view name) {
  if (name == "disc") return DomainKind::disc;
  if (name == "ellipse") return DomainKind::ellipse;
  if (name == "superellipse") return DomainKind::superellipse;
  if (name == "support_function" || name == "support-function" || name == "generic-support-function")
    return DomainKind::support_function;
  throw DomainError("unknown domain kind '" + std::string(name) + "'");
}

double finite_difference_curvature(const std::function<Vec2(double)>& curve, double s, double step) {
  auto first = [&](double d) { return (1.0 / (2.0 * d)) * (curve(s + d) - curve(s - d)); };
  auto second = [&](double d) {
    return (1.0 / (d * d)) * (curve(s + d) - 2.0 * curve(s) + curve(s - d));
  };
  const Vec2 d1 = (1.0 / 3.0) * (4.0 * first(0.5 * step) - first(step));
  const Vec2 d2 = (1.0 / 3.0) * (4.0 * second(0.5 * step) - second(step));
  return cross(d1, d2) / std::pow(norm(d1), 3);
}

Vec2 ConvexDomain::outward_normal(double s) const {
  const Vec2 t = tangent(s);
  const double n = norm(t);
  // Counter-clockwise traversal: the outward normal is the tangent rotated clockwise.
  return {t.y / n, -t.x / n};
}

double ConvexDomain::curvature(double s) const {
  if (closed_form_curvature_) return closed_form_curvature_(s);
  return finite_difference_curvature(point_, s, 5e-3);
}

bool ConvexDomain::is_circle() const { return k_max_ - k_min_ <= 1e-12 * k_max_; }

std::string ConvexDomain::label() const {
  const auto& p = spec_.params;
  switch (spec_.kind) {
    case DomainKind::disc:
      return "disc(R=" + format_number(p[0]) + ")";
    case DomainKind::ellipse:
      return "ellipse(a=" + format_number(p[0]) + ",b=" + format_number(p[1]) + ")";
    case DomainKind::superellipse:
      return "superellipse(a=" + format_number(p[0]) + ",b=" + format_number(p[1]) +
             ",p=" + format_number(p[2]) + ")";
    case DomainKind::support_function:
      return "support_function(rho0=" + format_number(p[0]) + ",eps=" + format_number(p[1]) +
             ",k=" + format_number(p[2]) + ")";
  }
  return "domain";
}

double ConvexDomain::arclength(double s) const {
  const double p = period();
  const double turns = std::floor(s / p);
  const double local = s - turns * p;
  const double ds = p / kArclengthIntervals;
  const int i = std::min(static_cast<int>(local / ds), kArclengthIntervals - 1);
  const double base = arclength_table_[i];
  const double partial =
      gauss_legendre([&](double x) { return norm(tangent(x)); }, i * ds, local);
  return turns * perimeter_ + base + partial;
}

double ConvexDomain::param_at_arclength(double length) const {
  length = std::clamp(length, 0.0, perimeter_);
  const auto it = std::upper_bound(arclength_table_.begin(), arclength_table_.end(), length);
  const int i = std::clamp(static_cast<int>(it - arclength_table_.begin()) - 1, 0,
                           kArclengthIntervals - 1);
  const double ds = period() / kArclengthIntervals;
  const double lo = arclength_table_[i];
  const double hi = arclength_table_[i + 1];
  double s = (i + (hi > lo ? (length - lo) / (hi - lo) : 0.0)) * ds;
  for (int iter = 0; iter < 3; ++iter) {
    const double speed = norm(tangent(s));
    if (speed <= 0.0) break;
    s -= (arclength(s) - length) / speed;
  }
  return s;
}

double ConvexDomain::signed_distance(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  bool inside = true;
  const std::size_t n = polygon_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon_[i];
    const Vec2& b = polygon_[(i + 1) % n];
    const Vec2 ab = b - a;
    const double t = std::clamp(dot(p - a, ab) / norm2(ab), 0.0, 1.0);
    best = std::min(best, norm2(p - (a + t * ab)));
    if (orient2d(a, b, p) < 0.0) inside = false;
  }
  const double d = std::sqrt(best);
  return inside ? -d : d;
}

ConvexDomain build_domain(const DomainSpec& spec) {
  ConvexDomain dom;
  dom.spec_ = spec;
  const auto& p = spec.params;
  auto require_params = [&](std::size_t n) {
    if (p.size() != n)
      throw DomainError(std::string(to_string(spec.kind)) + " expects " + std::to_string(n) +
                        " parameters, got " + std::to_string(p.size()));
    for (double v : p)
      if (!std::isfinite(v)) throw DomainError("domain parameters must be finite");
  };

  switch (spec.kind) {
    case DomainKind::disc: {
      require_params(1);
      const double r = p[0];
      if (!(r > 0.0)) throw DomainError("disc radius must be positive (R=" + format_number(r) + ")");
      dom.point_ = [r](double s) { return Vec2{r * std::cos(s), r * std::sin(s)}; };
      dom.tangent_ = [r](double s) { return Vec2{-r * std::sin(s), r * std::cos(s)}; };
      dom.closed_form_curvature_ = [r](double) { return 1.0 / r; };
      dom.k_min_ = dom.k_max_ = 1.0 / r;
      dom.k_min_param_ = dom.k_max_param_ = 0.0;
      break;
    }
    case DomainKind::ellipse: {
      require_params(2);
      const double a = p[0];
      const double b = p[1];
      if (!(b > 0.0)) throw DomainError("ellipse semi-axis b must be positive");
      if (a < b)
        throw DomainError("ellipse requires a >= b (got a=" + format_number(a) + ", b=" +
                          format_number(b) + "); put the major axis along x");
      dom.point_ = [a, b](double s) { return Vec2{a * std::cos(s), b * std::sin(s)}; };
      dom.tangent_ = [a, b](double s) { return Vec2{-a * std::sin(s), b * std::cos(s)}; };
      dom.closed_form_curvature_ = [a, b](double s) {
        const double sn = std::sin(s);
        const double cs = std::cos(s);
        return a * b / std::pow(a * a * sn * sn + b * b * cs * cs, 1.5);
      };
      dom.k_min_ = b / (a * a);
      dom.k_max_ = a / (b * b);
      dom.k_min_param_ = 0.5 * kPi;
      dom.k_max_param_ = 0.0;
      break;
    }
    case DomainKind::superellipse: {
      require_params(3);
      const double a = p[0];
      const double b = p[1];
      const double e = p[2];
      if (!(a > 0.0 && b > 0.0)) throw DomainError("superellipse semi-axes must be positive");
      if (!(e > 2.0)) throw DomainError("superellipse exponent must satisfy p > 2");
      const double q = 2.0 / e;
      dom.point_ = [a, b, q](double s) {
        return Vec2{a * sgn_pow(std::cos(s), q), b * sgn_pow(std::sin(s), q)};
      };
      dom.tangent_ = [a, b, q](double s) {
        const double c = std::cos(s);
        const double sn = std::sin(s);
        return Vec2{-a * q * std::pow(std::abs(c), q - 1.0) * sn,
                    b * q * std::pow(std::abs(sn), q - 1.0) * c};
      };
      // Implicit-curve curvature of F = |x/a|^p + |y/b|^p.
      dom.closed_form_curvature_ = [a, b, e, q](double s) {
        const double x = a * sgn_pow(std::cos(s), q);
        const double y = b * sgn_pow(std::sin(s), q);
        const double fx = e / a * sgn_pow(x / a, e - 1.0);
        const double fy = e / b * sgn_pow(y / b, e - 1.0);
        const double fxx = e * (e - 1.0) / (a * a) * std::pow(std::abs(x / a), e - 2.0);
        const double fyy = e * (e - 1.0) / (b * b) * std::pow(std::abs(y / b), e - 2.0);
        return (fxx * fy * fy + fyy * fx * fx) / std::pow(fx * fx + fy * fy, 1.5);
      };
      break;
    }
    case DomainKind::support_function: {
      require_params(3);
      const double rho0 = p[0];
      const double eps = p[1];
      const double k = p[2];
      if (!(rho0 > 0.0)) throw DomainError("support function scale rho0 must be positive");
      if (k < 2.0 || std::floor(k) != k)
        throw DomainError("support function frequency k must be an integer >= 2");
      if (!(std::abs(eps) * (k * k - 1.0) < 1.0))
        throw DomainError("support function is not strictly convex: need |eps|(k^2-1) < 1 (got " +
                          format_number(std::abs(eps) * (k * k - 1.0)) + ")");
      dom.point_ = [rho0, eps, k](double s) {
        const double h = rho0 * (1.0 + eps * std::cos(k * s));
        const double dh = -rho0 * eps * k * std::sin(k * s);
        const Vec2 n{std::cos(s), std::sin(s)};
        return h * n + dh * perp(n);
      };
      dom.tangent_ = [rho0, eps, k](double s) {
        const double radius = rho0 * (1.0 + eps * (1.0 - k * k) * std::cos(k * s));
        return radius * perp(Vec2{std::cos(s), std::sin(s)});
      };
      break;
    }
  }

  // Strict convexity and extrema on a dense sample.
  const double ds = ConvexDomain::period() / kCurvatureSamples;
  int best_min = 0;
  int best_max = 0;
  std::vector<double> samples(kCurvatureSamples);
  for (int i = 0; i < kCurvatureSamples; ++i) {
    samples[i] = dom.curvature(i * ds);
    if (!(samples[i] > 0.0))
      throw DomainError(dom.label() + " is not strictly convex: curvature " +
                        format_number(samples[i]) + " at s=" + format_number(i * ds));
    if (samples[i] < samples[best_min]) best_min = i;
    if (samples[i] > samples[best_max]) best_max = i;
  }
  if (spec.kind == DomainKind::support_function) {
    auto curv = [&dom](double s) { return dom.curvature(s); };
    const double smin =
        golden_section_min(curv, (best_min - 1) * ds, (best_min + 1) * ds, kGoldenTol);
    const double smax = golden_section_min([&](double s) { return -curv(s); },
                                           (best_max - 1) * ds, (best_max + 1) * ds, kGoldenTol);
    dom.k_min_param_ = wrap_param(smin);
    dom.k_max_param_ = wrap_param(smax);
    dom.k_min_ = std::min(curv(smin), samples[best_min]);
    dom.k_max_ = std::max(curv(smax), samples[best_max]);
  }

  // Arclength table, area, polygon, diameter.
  const double dt = ConvexDomain::period() / kArclengthIntervals;
  dom.arclength_table_.assign(kArclengthIntervals + 1, 0.0);
  double area2 = 0.0;
  for (int i = 0; i < kArclengthIntervals; ++i) {
    dom.arclength_table_[i + 1] =
        dom.arclength_table_[i] +
        gauss_legendre([&](double s) { return norm(dom.tangent(s)); }, i * dt, (i + 1) * dt);
    area2 += gauss_legendre([&](double s) { return cross(dom.point(s), dom.tangent(s)); }, i * dt,
                            (i + 1) * dt);
  }
  dom.perimeter_ = dom.arclength_table_.back();
  dom.area_ = 0.5 * area2;

  dom.polygon_.resize(kPolygonSamples);
  for (int i = 0; i < kPolygonSamples; ++i)
    dom.polygon_[i] = dom.point(i * ConvexDomain::period() / kPolygonSamples);

  double winding = 0.0;
  for (int i = 0; i < kPolygonSamples; ++i) {
    const Vec2& a = dom.polygon_[i];
    const Vec2& b = dom.polygon_[(i + 1) % kPolygonSamples];
    winding += std::atan2(cross(a, b), dot(a, b));
  }
  if (std::abs(winding / (2.0 * kPi) - 1.0) > 1e-6)
    throw DomainError(dom.label() + " boundary does not wind once around the origin");

  double diam2 = 0.0;
  for (int i = 0; i < kPolygonSamples; ++i)
    for (int j = i + 1; j < kPolygonSamples; ++j)
      diam2 = std::max(diam2, norm2(dom.polygon_[i] - dom.polygon_[j]));
  dom.diameter_ = std::sqrt(diam2);
  return dom;
}

double curvature_at(const ConvexDomain& domain, double s) { return domain.curvature(s); }

}  // namespace cmc
