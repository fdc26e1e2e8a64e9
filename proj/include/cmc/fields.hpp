#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cmc/geometry.hpp"
#include "cmc/mesh.hpp"
#include "cmc/solver.hpp"

// Differential geometry of the solution graph.
//
// Conventions: the graph is future oriented, N = (Du, 1) / sqrt(1 - |Du|^2),
// the first fundamental form is E = 1 - u_x^2, F = -u_x u_y, G = 1 - u_y^2,
// the mean curvature H satisfies div(Du / sqrt(1 - |Du|^2)) = 2H, and the
// Gaussian curvature is K = -(u_xx u_yy - u_xy^2) / (1 - |Du|^2)^2, so a
// nondegenerate minimum of u has K < 0.
namespace cmc {

enum class FieldKind { node, element };

struct ScalarField {
  std::shared_ptr<const TriMesh> mesh;
  FieldKind kind{FieldKind::node};
  std::vector<double> values;
  std::string name;
  /// Optional per-entry flag (e.g. one-sided Hessian fit); empty when unused.
  std::vector<char> flagged;

  bool is_flagged(int i) const { return !flagged.empty() && flagged[i]; }
};

/// Exact P1 element gradients plus a recovered continuous nodal gradient.
struct GradientField {
  std::vector<Vec2> element;
  /// Gradient of the local least-squares quadratic at each node (one-sided
  /// at boundary nodes). Exact for quadratics, so second order on smooth data.
  std::vector<Vec2> node;
};

/// Local quadratic model u(x) ~ value + gradient . d + d^T hessian d / 2 at a node.
struct QuadraticFit {
  double value{0.0};
  Vec2 gradient{};
  SymMat2 hessian{};
  bool flagged{false};  // boundary (one-sided) or rank-deficient neighborhood
};

struct HessianField {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<QuadraticFit> fits;

  const SymMat2& at(int node) const { return fits[node].hessian; }
  bool flagged(int node) const { return fits[node].flagged; }
};

/// Least-squares quadratic through the 2-ring of an interior node (3-ring at
/// boundary nodes).
QuadraticFit fit_quadratic(const TriMesh& mesh, std::span<const double> values, int node);

namespace kernels {

std::vector<QuadraticFit> quadratic_fits_serial(const TriMesh& mesh, std::span<const double> values);
std::vector<QuadraticFit> quadratic_fits_parallel(const TriMesh& mesh, std::span<const double> values);

}  // namespace kernels

/// Gradient recovery for an arbitrary nodal field.
GradientField recover_gradient(const TriMesh& mesh, std::span<const double> values, Exec exec = Exec::parallel);
/// Hessian recovery for an arbitrary nodal field.
std::vector<QuadraticFit> recover_hessian(const TriMesh& mesh, std::span<const double> values,
                                          Exec exec = Exec::parallel);

/// Gradient of v (multiply by t for u_t).
GradientField gradient(const GraphSolution& solution, Exec exec = Exec::parallel);
/// Hessian of v.
HessianField hessian_recovery(const GraphSolution& solution, Exec exec = Exec::parallel);

/// K from first and second derivatives of the graph function.
double gaussian_curvature_pointwise(const Vec2& du, const SymMat2& d2u);
/// H from first and second derivatives of the graph function.
double mean_curvature_pointwise(const Vec2& du, const SymMat2& d2u);

/// Gaussian curvature of the graph of graph_scale() * v at every node.
/// Flagged Hessian nodes are flagged in the result.
ScalarField gaussian_curvature(const GraphSolution& solution, Exec exec = Exec::parallel);

/// Weak residual divided by the lumped mass at interior nodes, in the units
/// of the graph equation (multiplied by graph_scale()). Boundary nodes hold 0
/// and are flagged.
ScalarField mean_curvature_residual(const GraphSolution& solution, Exec exec = Exec::parallel);

struct NormalAndForms {
  std::array<double, 3> normal{0.0, 0.0, 1.0};
  double E{1.0};
  double F{0.0};
  double G{1.0};

  double det() const { return E * G - F * F; }
  /// <N, N> in the Lorentz metric dx^2 + dy^2 - dz^2.
  double lorentz_norm2() const {
    return normal[0] * normal[0] + normal[1] * normal[1] - normal[2] * normal[2];
  }
};

NormalAndForms normal_and_forms(const Vec2& du);
/// Per node, using the recovered gradient of u_t.
std::vector<NormalAndForms> normal_and_forms(const GraphSolution& solution, Exec exec = Exec::parallel);

}  // namespace cmc
