#include "cmc/pfunction.hpp"

#include <algorithm>
#include <cmath>

namespace cmc {

namespace {

// Stationary point of a fitted quadratic, if it lies within `radius`.
std::optional<std::pair<Vec2, double>> refine_stationary(const QuadraticFit& fit, double radius) {
  const double det = fit.hessian.det();
  if (fit.flagged || det == 0.0) return std::nullopt;
  const SymMat2& A = fit.hessian;
  const Vec2 g = fit.gradient;
  const Vec2 d{-(A.yy * g.x - A.xy * g.y) / det, -(-A.xy * g.x + A.xx * g.y) / det};
  if (norm(d) > radius) return std::nullopt;
  const double value = fit.value + dot(g, d) + 0.5 * dot(d, A.apply(d));
  return std::make_pair(d, value);
}

}  // namespace

double phi_pointwise(const Vec2& du, double u, double H, double alpha) {
  return 2.0 * (1.0 / std::sqrt(1.0 - norm2(du)) - 1.0 - alpha * H * u);
}

double PhiField::nodal_range() const {
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  return *hi - *lo;
}

namespace kernels {

std::vector<double> phi_values_serial(std::span<const double> u, std::span<const Vec2> du, double H, double alpha) {
  std::vector<double> out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) out[n] = phi_pointwise(du[n], u[n], H, alpha);
  return out;
}

std::vector<double> phi_values_parallel(std::span<const double> u, std::span<const Vec2> du, double H,
                                        double alpha) {
  const long nn = static_cast<long>(u.size());
  std::vector<double> out(nn);
#pragma omp parallel for schedule(static)
  for (long n = 0; n < nn; ++n) out[n] = phi_pointwise(du[n], u[n], H, alpha);
  return out;
}

}  // namespace kernels

PhiField phi_field(const GraphSolution& solution, double alpha, Exec exec) {
  const TriMesh& mesh = *solution.mesh;
  const int nn = static_cast<int>(mesh.num_nodes());
  const double s = solution.graph_scale();
  GradientField g = gradient(solution, exec);
  std::vector<double> u(nn);
  for (int n = 0; n < nn; ++n) {
    u[n] = s * solution.values[n];
    g.node[n] = s * g.node[n];
  }
  const double H = s * solution.H;

  PhiField phi;
  phi.alpha = alpha;
  phi.H = H;
  phi.field = {solution.mesh, FieldKind::node,
               exec == Exec::serial ? kernels::phi_values_serial(u, g.node, H, alpha)
                                    : kernels::phi_values_parallel(u, g.node, H, alpha),
               "phi", {}};
  const std::vector<double>& v = phi.field.values;

  int imax = 0, imin = 0;
  phi.boundary_max = phi.interior_max = -INFINITY;
  phi.boundary_min = phi.interior_min = INFINITY;
  for (int n = 0; n < nn; ++n) {
    if (v[n] > v[imax]) imax = n;
    if (v[n] < v[imin]) imin = n;
    double& hi = mesh.is_boundary(n) ? phi.boundary_max : phi.interior_max;
    double& lo = mesh.is_boundary(n) ? phi.boundary_min : phi.interior_min;
    hi = std::max(hi, v[n]);
    lo = std::min(lo, v[n]);
  }

  auto extremum = [&](int n, bool want_max) {
    PhiExtremum e{n, mesh.node(n), v[n], mesh.is_boundary(n)};
    if (e.on_boundary) return e;
    const QuadraticFit fit = fit_quadratic(mesh, v, n);
    const double sign = want_max ? -1.0 : 1.0;
    // Only refine toward a genuine local extremum of the fitted model.
    if (sign * fit.hessian.xx > 0.0 && fit.hessian.det() > 0.0) {
      if (auto r = refine_stationary(fit, mesh.h())) {
        e.location = e.location + r->first;
        e.value = want_max ? std::max(v[n], r->second) : std::min(v[n], r->second);
      }
    }
    return e;
  };
  phi.max_info = extremum(imax, true);
  phi.min_info = extremum(imin, false);
  if (!phi.max_info.on_boundary) phi.interior_max = std::max(phi.interior_max, phi.max_info.value);
  if (!phi.min_info.on_boundary) phi.interior_min = std::min(phi.interior_min, phi.min_info.value);
  return phi;
}

PhiMaxReport phi_max_location(const PhiField& phi, double tol) {
  PhiMaxReport r;
  r.argmax = phi.max_info;
  r.boundary_max = phi.boundary_max;
  r.interior_max = phi.interior_max;
  r.excess = phi.interior_max - phi.boundary_max;
  r.tol = tol;
  r.pass = r.excess <= tol;
  return r;
}

std::string_view to_string(PhiMinClass c) {
  switch (c) {
    case PhiMinClass::boundary:
      return "boundary";
    case PhiMinClass::critical_point:
      return "critical_point";
    case PhiMinClass::interior:
      return "interior";
  }
  return "?";
}

PhiMinReport phi_min_location(const PhiField& phi, std::optional<Vec2> critical_point, double tol) {
  PhiMinReport r;
  r.argmin = phi.min_info;
  r.range = phi.range();
  r.tol = tol;
  r.constant = r.range <= tol;
  const double h = phi.field.mesh->h();
  if (r.argmin.on_boundary) {
    r.classification = PhiMinClass::boundary;
    r.pass = true;
  } else if (critical_point && norm(r.argmin.location - *critical_point) <= 2.0 * h) {
    r.classification = PhiMinClass::critical_point;
    r.pass = std::abs(phi.alpha - 1.0) > 1e-12 || r.constant;
  } else if (phi.boundary_min - r.argmin.value <= tol) {
    r.classification = PhiMinClass::boundary;
    r.pass = true;
  } else {
    r.classification = PhiMinClass::interior;
    r.pass = false;
  }
  return r;
}

std::vector<BoundaryDerivativeSample> phi_boundary_normal_derivative(const GraphSolution& solution,
                                                                     const ConvexDomain& domain, double alpha,
                                                                     Exec exec) {
  const TriMesh& mesh = *solution.mesh;
  const double s = solution.graph_scale();
  const double H = s * solution.H;
  const GradientField g = gradient(solution, exec);
  std::vector<BoundaryDerivativeSample> out;
  out.reserve(mesh.boundary_nodes().size());
  for (int n : mesh.boundary_nodes()) {
    BoundaryDerivativeSample b;
    b.node = n;
    b.s = mesh.boundary_param(n);
    b.location = mesh.node(n);
    b.u_n = s * dot(g.node[n], domain.outward_normal(b.s));
    b.curvature = domain.curvature(b.s);
    const double gq = 1.0 / std::sqrt(1.0 - b.u_n * b.u_n);
    const double f = -2.0 * H;
    b.value = -(2.0 * b.curvature * gq * b.u_n * b.u_n + (2.0 - alpha) * f * b.u_n);
    out.push_back(b);
  }
  return out;
}

SignChainReport sign_chain_at_max(const GraphSolution& solution, const ConvexDomain& domain, const PhiField& phi,
                                  double tol, Exec exec) {
  const TriMesh& mesh = *solution.mesh;
  const double s = solution.graph_scale();
  const GradientField g = gradient(solution, exec);
  SignChainReport r;
  r.tol = tol;
  const std::vector<double>& v = phi.field.values;
  for (int n : mesh.boundary_nodes()) {
    if (r.node < 0 || v[n] > v[r.node]) r.node = n;
    r.q2_max = std::max(r.q2_max, s * s * norm2(g.node[n]));
  }
  r.q2_at_max = s * s * norm2(g.node[r.node]);
  const double q = std::sqrt(r.q2_at_max);
  r.lhs = q / std::sqrt(1.0 - r.q2_at_max);
  r.rhs = phi.H / domain.curvature(mesh.boundary_param(r.node));
  r.pass = r.q2_max - r.q2_at_max <= tol && r.lhs <= r.rhs + tol;
  return r;
}

}  // namespace cmc
