#include "cmc/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "cmc/oracles.hpp"
#include "cmc/pfunction.hpp"

namespace cmc {

double gradient_bound(double H, double k_min) { return H * H / (H * H + k_min * k_min); }

double q_min_bound(double H, double k_max) { return H * H / (H * H + k_max * k_max); }

double height_lower_bound(double H, double k_min) {
  return -(std::sqrt(H * H + k_min * k_min) / k_min - 1.0) / H;
}

double height_upper_bound(double H, double k_max) {
  return -(std::sqrt(H * H + k_max * k_max) / k_max - 1.0) / H;
}

BoundaryGradient measure_boundary_gradient(const GraphSolution& solution, Exec exec) {
  const TriMesh& mesh = *solution.mesh;
  const double s2 = solution.graph_scale() * solution.graph_scale();
  const GradientField g = gradient(solution, exec);
  BoundaryGradient b;
  b.q2_min = INFINITY;
  for (int n : mesh.boundary_nodes()) {
    const double q2 = s2 * norm2(g.node[n]);
    if (q2 > b.q2_max_fit) {
      b.q2_max_fit = q2;
      b.q2_max_node = n;
    }
    if (q2 < b.q2_min) {
      b.q2_min = q2;
      b.q2_min_node = n;
    }
  }
  for (int e = 0; e < static_cast<int>(mesh.num_triangles()); ++e) {
    const Triangle& t = mesh.triangle(e);
    if (mesh.is_boundary(t[0]) || mesh.is_boundary(t[1]) || mesh.is_boundary(t[2]))
      b.q2_max_elements = std::max(b.q2_max_elements, s2 * norm2(g.element[e]));
  }
  for (const Vec2& d : g.node) b.q2_max_all_nodes = std::max(b.q2_max_all_nodes, s2 * norm2(d));
  return b;
}

Calibration calibrate(double R, double H, double h, const SolverOptions& options) {
  const ConvexDomain disc = build_domain({DomainKind::disc, {R}});
  auto mesh = std::make_shared<const TriMesh>(triangulate(disc, h));
  ContinuationOptions co;
  co.solver = options;
  const ContinuationResult run = continuation(mesh, H, uniform_schedule(11), co);
  const GraphSolution& sol = run.steps.back();
  Calibration c;
  c.h = h;
  c.R = R;
  c.H = H;
  const GradientField g = gradient(sol, options.exec);
  for (int n = 0; n < static_cast<int>(mesh->num_nodes()); ++n) {
    const Vec2 p = mesh->node(n);
    c.u_error = std::max(c.u_error, std::abs(sol.values[n] - oracle::radial_cap_value(R, H, 1.0, p)));
    c.grad_error = std::max(c.grad_error, norm(g.node[n] - oracle::radial_cap_gradient(R, H, 1.0, p)));
  }
  const double exact = H * H * R * R / (1.0 + H * H * R * R);
  const BoundaryGradient b = measure_boundary_gradient(sol, options.exec);
  c.q2_error = std::max(std::abs(b.q2_max() - exact), std::abs(b.q2_min - exact));
  const double phi_exact = 2.0 * (std::sqrt(1.0 + H * H * R * R) - 1.0);
  for (double v : phi_field(sol, 1.0, options.exec).field.values)
    c.phi_error = std::max(c.phi_error, std::abs(v - phi_exact));
  return c;
}

Calibration calibrate_for(const ConvexDomain& domain, double H, double h, const SolverOptions& options) {
  return calibrate(0.5 * domain.diameter(), H, h, options);
}

EstimateTolerances EstimateTolerances::from(const Calibration& c) {
  return {c.gradient_tol(), c.height_tol(), c.phi_tol()};
}

void gradient_bound_check(const GraphSolution& solution, const ConvexDomain& domain, EstimateReport& r) {
  const double H = solution.graph_scale() * solution.H;
  r.gradient = measure_boundary_gradient(solution);
  r.q_max2 = r.gradient.q2_max();
  r.gradient_bound = gradient_bound(H, domain.k_min());
  r.gradient_slack = r.gradient_bound - r.q_max2;
  r.gradient_slack_fit = r.gradient_bound - r.gradient.q2_max_fit;
  r.max_on_boundary = r.gradient.q2_max_all_nodes <= r.q_max2 + r.tol.gradient;
  r.gradient_pass = r.max_on_boundary && r.gradient_slack >= -r.tol.gradient;
}

void height_bound_check(const GraphSolution& solution, const ConvexDomain& domain, EstimateReport& r) {
  const TriMesh& mesh = *solution.mesh;
  const double s = solution.graph_scale();
  const double H = s * solution.H;
  const auto it = std::min_element(solution.values.begin(), solution.values.end());
  const int n = static_cast<int>(it - solution.values.begin());
  r.u_min = s * *it;
  r.u_min_location = mesh.node(n);
  if (!mesh.is_boundary(n)) {
    const QuadraticFit fit = fit_quadratic(mesh, solution.values, n);
    const SymMat2& A = fit.hessian;
    const double det = A.det();
    if (!fit.flagged && det > 0.0 && A.xx > 0.0) {
      const Vec2 g = fit.gradient;
      const Vec2 d{-(A.yy * g.x - A.xy * g.y) / det, -(-A.xy * g.x + A.xx * g.y) / det};
      if (norm(d) <= mesh.h()) {
        r.u_min = s * (fit.value + dot(g, d) + 0.5 * dot(d, A.apply(d)));
        r.u_min_location = mesh.node(n) + d;
      }
    }
  }
  r.height_lower = height_lower_bound(H, domain.k_min());
  r.height_upper = height_upper_bound(H, domain.k_max());
  r.lower_slack = r.u_min - r.height_lower;
  r.upper_slack = r.height_upper - r.u_min;
  r.height_pass = r.lower_slack >= -r.tol.height && r.upper_slack >= -r.tol.height;
}

void q_min_check(const GraphSolution& solution, const ConvexDomain& domain, EstimateReport& r) {
  const double H = solution.graph_scale() * solution.H;
  if (r.gradient.q2_min_node < 0) r.gradient = measure_boundary_gradient(solution);
  r.q_min2 = r.gradient.q2_min;
  r.q_min_bound = q_min_bound(H, domain.k_max());
  r.q_min_slack = r.q_min2 - r.q_min_bound;
  r.q_min_pass = r.q_min_slack >= -r.tol.gradient;
}

void equality_chain_check(const GraphSolution& solution, const ConvexDomain& domain, EstimateReport& r) {
  const auto bd = phi_boundary_normal_derivative(solution, domain, 1.0);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& b : bd) {
    lo = std::min(lo, b.u_n);
    hi = std::max(hi, b.u_n);
  }
  r.un_oscillation = hi - lo;
  const PhiField phi = phi_field(solution, 1.0);
  lo = INFINITY;
  hi = -INFINITY;
  for (int n : solution.mesh->boundary_nodes()) {
    lo = std::min(lo, phi.field.values[n]);
    hi = std::max(hi, phi.field.values[n]);
  }
  r.phi_oscillation = hi - lo;
  const bool small = r.un_oscillation <= r.tol.oscillation && r.phi_oscillation <= r.tol.oscillation;
  const bool large = r.un_oscillation > r.tol.oscillation && r.phi_oscillation > r.tol.oscillation;
  r.chain_pass = domain.is_circle() ? small : large;
}

double max_abs_slack(const EstimateReport& r) {
  return std::max({std::abs(r.gradient_slack_fit), std::abs(r.q_min_slack), std::abs(r.lower_slack),
                   std::abs(r.upper_slack)});
}

EstimateReport estimate_report(const GraphSolution& solution, const ConvexDomain& domain,
                               const EstimateTolerances& tol, Exec exec) {
  EstimateReport r;
  r.domain = domain.label();
  r.H = solution.graph_scale() * solution.H;
  r.h = solution.mesh->h();
  r.k_min = domain.k_min();
  r.k_max = domain.k_max();
  r.circle = domain.is_circle();
  r.tol = tol;
  r.gradient = measure_boundary_gradient(solution, exec);
  gradient_bound_check(solution, domain, r);
  height_bound_check(solution, domain, r);
  q_min_check(solution, domain, r);
  equality_chain_check(solution, domain, r);
  r.equality_candidate = r.circle && std::abs(r.gradient_slack) <= tol.gradient &&
                         std::abs(r.q_min_slack) <= tol.gradient && std::abs(r.lower_slack) <= tol.height &&
                         std::abs(r.upper_slack) <= tol.height;
  return r;
}

bool confirm_equality(const EstimateReport& coarse, const EstimateReport& fine) {
  return coarse.equality_candidate && fine.equality_candidate && max_abs_slack(fine) <= max_abs_slack(coarse);
}

}  // namespace cmc
