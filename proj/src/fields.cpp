#include "cmc/fields.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace cmc {

namespace {

std::vector<int> k_ring(const TriMesh& mesh, int node, int rings) {
  std::vector<int> ring{node};
  std::size_t begin = 0;
  for (int r = 0; r < rings; ++r) {
    const std::size_t end = ring.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int b : mesh.node_neighbors(ring[i])) ring.push_back(b);
    begin = end;
    std::sort(ring.begin() + begin, ring.end());
    ring.erase(std::unique(ring.begin() + begin, ring.end()), ring.end());
    // drop entries already present in earlier rings
    std::vector<int> seen(ring.begin(), ring.begin() + begin);
    std::sort(seen.begin(), seen.end());
    ring.erase(std::remove_if(ring.begin() + begin, ring.end(),
                              [&](int v) { return std::binary_search(seen.begin(), seen.end(), v); }),
               ring.end());
  }
  std::sort(ring.begin(), ring.end());
  return ring;
}

}  // namespace

QuadraticFit fit_quadratic(const TriMesh& mesh, std::span<const double> values, int node) {
  // One-sided patches at the boundary see half as many points; widen them.
  const std::vector<int> ring = k_ring(mesh, node, mesh.is_boundary(node) ? 3 : 2);
  const Vec2 c = mesh.node(node);
  const double scale = mesh.h();
  const int m = static_cast<int>(ring.size());
  QuadraticFit fit;
  fit.flagged = mesh.is_boundary(node);
  if (m < 6) {
    fit.flagged = true;
    fit.value = values[node];
    return fit;
  }
  Eigen::MatrixXd A(m, 6);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const Vec2 d = (1.0 / scale) * (mesh.node(ring[i]) - c);
    A.row(i) << 1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y;
    b[i] = values[ring[i]];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[5] <= 1e-8 * sv[0]) fit.flagged = true;
  const Eigen::VectorXd coef = svd.solve(b);
  fit.value = coef[0];
  fit.gradient = {coef[1] / scale, coef[2] / scale};
  fit.hessian = {2.0 * coef[3] / (scale * scale), coef[4] / (scale * scale), 2.0 * coef[5] / (scale * scale)};
  return fit;
}

namespace kernels {

std::vector<QuadraticFit> quadratic_fits_serial(const TriMesh& mesh, std::span<const double> values) {
  std::vector<QuadraticFit> out(mesh.num_nodes());
  for (int n = 0; n < static_cast<int>(out.size()); ++n) out[n] = fit_quadratic(mesh, values, n);
  return out;
}

std::vector<QuadraticFit> quadratic_fits_parallel(const TriMesh& mesh, std::span<const double> values) {
  const int nn = static_cast<int>(mesh.num_nodes());
  std::vector<QuadraticFit> out(nn);
#pragma omp parallel for schedule(dynamic, 64)
  for (int n = 0; n < nn; ++n) out[n] = fit_quadratic(mesh, values, n);
  return out;
}

}  // namespace kernels

GradientField recover_gradient(const TriMesh& mesh, std::span<const double> values, Exec exec) {
  GradientField g;
  g.element = element_gradients(mesh, values, exec);
  const std::vector<QuadraticFit> fits = recover_hessian(mesh, values, exec);
  g.node.resize(fits.size());
  for (std::size_t n = 0; n < fits.size(); ++n) g.node[n] = fits[n].gradient;
  return g;
}

std::vector<QuadraticFit> recover_hessian(const TriMesh& mesh, std::span<const double> values, Exec exec) {
  return exec == Exec::serial ? kernels::quadratic_fits_serial(mesh, values)
                              : kernels::quadratic_fits_parallel(mesh, values);
}

GradientField gradient(const GraphSolution& solution, Exec exec) {
  return recover_gradient(*solution.mesh, solution.values, exec);
}

HessianField hessian_recovery(const GraphSolution& solution, Exec exec) {
  return {solution.mesh, recover_hessian(*solution.mesh, solution.values, exec)};
}

double gaussian_curvature_pointwise(const Vec2& du, const SymMat2& d2u) {
  const double w = 1.0 - norm2(du);
  return -d2u.det() / (w * w);
}

double mean_curvature_pointwise(const Vec2& du, const SymMat2& d2u) {
  const double w = 1.0 - norm2(du);
  const double num = (1.0 - du.y * du.y) * d2u.xx + (1.0 - du.x * du.x) * d2u.yy + 2.0 * du.x * du.y * d2u.xy;
  return 0.5 * num / std::pow(w, 1.5);
}

ScalarField gaussian_curvature(const GraphSolution& solution, Exec exec) {
  const TriMesh& mesh = *solution.mesh;
  const GradientField g = gradient(solution, exec);
  const HessianField hess = hessian_recovery(solution, exec);
  const double s = solution.graph_scale();
  ScalarField out{solution.mesh, FieldKind::node, std::vector<double>(mesh.num_nodes()), "gaussian_curvature",
                  std::vector<char>(mesh.num_nodes(), 0)};
  for (int n = 0; n < static_cast<int>(mesh.num_nodes()); ++n) {
    // Lorentz factor uses t|Dv|; at t = 0 it is 1 (Euclidean surrogate).
    const double w = 1.0 - solution.t * solution.t * norm2(g.node[n]);
    out.values[n] = -s * s * hess.at(n).det() / (w * w);
    out.flagged[n] = hess.flagged(n);
  }
  return out;
}

ScalarField mean_curvature_residual(const GraphSolution& solution, Exec exec) {
  const TriMesh& mesh = *solution.mesh;
  const std::vector<double> r = nodal_residual(mesh, solution.values, solution.t, solution.H, exec);
  const double s = solution.graph_scale();
  ScalarField out{solution.mesh, FieldKind::node, std::vector<double>(mesh.num_nodes(), 0.0),
                  "mean_curvature_residual", std::vector<char>(mesh.num_nodes(), 0)};
  for (int n = 0; n < static_cast<int>(mesh.num_nodes()); ++n) {
    if (mesh.is_boundary(n)) {
      out.flagged[n] = 1;
      continue;
    }
    out.values[n] = s * r[n] / mesh.lumped_mass(n);
  }
  return out;
}

NormalAndForms normal_and_forms(const Vec2& du) {
  const double w = std::sqrt(1.0 - norm2(du));
  NormalAndForms f;
  f.normal = {du.x / w, du.y / w, 1.0 / w};
  f.E = 1.0 - du.x * du.x;
  f.F = -du.x * du.y;
  f.G = 1.0 - du.y * du.y;
  return f;
}

std::vector<NormalAndForms> normal_and_forms(const GraphSolution& solution, Exec exec) {
  const GradientField g = gradient(solution, exec);
  std::vector<NormalAndForms> out(g.node.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = normal_and_forms(solution.t * g.node[n]);
  return out;
}

}  // namespace cmc
