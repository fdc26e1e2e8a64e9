#pragma once

#include <Eigen/Sparse>
#include <array>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmc/mesh.hpp"

// Piecewise-linear finite elements for the homotopy family
//   div(Dv / sqrt(1 - t^2 |Dv|^2)) = 2H in Omega,  v = 0 on the boundary,
// whose scaled member u_t = t v_t is the spacelike CMC graph with mean
// curvature tH. The unknown is always v; t = 0 is the Poisson problem.
namespace cmc {

/// Execution policy for the data-parallel kernels. Both policies produce
/// bitwise identical results; `serial` is the reference implementation.
enum class Exec { serial, parallel };

struct SolverOptions {
  double newton_tol{1e-10};  // on the infinity norm of the weak residual
  int max_iters{60};
  double backtrack_factor{0.5};
  int max_backtracks{50};
  double spacelike_cap{1.0 - 1e-6};  // bound on element-wise t|Dv| accepted by a step
  int safeguard_warn_limit{8};
  Exec exec{Exec::parallel};
};

/// Converged discrete solution. `values` holds v_t; u_t = t v_t.
struct GraphSolution {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<double> values;
  double t{1.0};
  double H{1.0};
  double residual_norm{0.0};
  /// Spacelike margin 1 - max over elements of t|Dv|.
  double theta{1.0};
  int iters{0};
  int safeguard_hits{0};
  std::vector<std::string> warnings;

  /// u_t = t v_t at a node.
  double u(int node) const { return t * values[node]; }
  std::vector<double> u_values() const;
  /// Scale from v to the graph being analysed: t for t > 0, and 1 at t = 0
  /// where the Poisson solution itself is treated as a (formal) graph.
  double graph_scale() const { return t > 0.0 ? t : 1.0; }
};

class NonSpacelikeError : public std::runtime_error {
 public:
  NonSpacelikeError(int element, double slope);
  int element() const { return element_; }
  double slope() const { return slope_; }

 private:
  int element_;
  double slope_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double t, int iters, double last_residual);
  double t() const { return t_; }
  int iters() const { return iters_; }
  double last_residual() const { return last_residual_; }

 private:
  double t_;
  int iters_;
  double last_residual_;
};

/// Interior-node numbering for the Dirichlet problem.
class DofMap {
 public:
  explicit DofMap(const TriMesh& mesh);
  int size() const { return static_cast<int>(interior_.size()); }
  /// Unknown index of a node, -1 for boundary nodes.
  int dof(int node) const { return dof_of_node_[node]; }
  int node(int dof) const { return interior_[dof]; }

 private:
  std::vector<int> dof_of_node_;
  std::vector<int> interior_;
};

/// Per-element contributions: local residual and the symmetric 3x3 Jacobian
/// (row-major). bad_element is the first element with t|Dv| >= 1, or -1.
struct ElementContributions {
  std::vector<std::array<double, 3>> residual;
  std::vector<std::array<double, 9>> jacobian;
  int bad_element{-1};
  double bad_slope{0.0};
};

namespace kernels {

ElementContributions element_contributions_serial(const TriMesh& mesh, std::span<const double> values,
                                                  double t, double H);
ElementContributions element_contributions_parallel(const TriMesh& mesh, std::span<const double> values,
                                                    double t, double H);
/// Constant P1 gradient of every element.
std::vector<Vec2> element_gradients_serial(const TriMesh& mesh, std::span<const double> values);
std::vector<Vec2> element_gradients_parallel(const TriMesh& mesh, std::span<const double> values);

}  // namespace kernels

std::vector<Vec2> element_gradients(const TriMesh& mesh, std::span<const double> values,
                                    Exec exec = Exec::parallel);

struct AssembledSystem {
  Eigen::VectorXd residual;  // one entry per interior node (DofMap order)
  Eigen::SparseMatrix<double> jacobian;
};

/// Weak residual R_i = sum_e |e| (flux . grad phi_i + 2H/3) and its exact
/// Jacobian. Throws NonSpacelikeError if some element has t|Dv| >= 1.
AssembledSystem assemble(const TriMesh& mesh, std::span<const double> values, double t, double H,
                         Exec exec = Exec::parallel);

/// Weak residual at every node (boundary rows included), for diagnostics.
std::vector<double> nodal_residual(const TriMesh& mesh, std::span<const double> values, double t, double H,
                                   Exec exec = Exec::parallel);

/// max over elements of t |Dv|.
double max_spacelike_slope(const TriMesh& mesh, std::span<const double> values, double t,
                           Exec exec = Exec::parallel);

/// Damped Newton iteration from `init` (boundary values are forced to zero).
GraphSolution newton_solve(std::shared_ptr<const TriMesh> mesh, double t, double H, std::vector<double> init,
                           const SolverOptions& options = {});

/// All-zero nodal field; always an admissible initial guess.
std::vector<double> zero_field(const TriMesh& mesh);

class ContinuationError : public std::runtime_error {
 public:
  ContinuationError(double t, const std::string& detail);
  double t() const { return t_; }

 private:
  double t_;
};

struct ContinuationOptions {
  SolverOptions solver{};
  int max_bisections{6};
};

struct ContinuationResult {
  /// One solution per scheduled t (bisection substeps are not recorded).
  std::vector<GraphSolution> steps;
  /// min over steps of theta.
  double theta0{1.0};
};

/// n_steps uniform values from 0 to 1 inclusive.
std::vector<double> uniform_schedule(int n_steps);

/// Solves t = 0 (one linear solve), then warm-starts each following t from
/// the previous v. A failing step is retried with bisected sub-steps.
ContinuationResult continuation(std::shared_ptr<const TriMesh> mesh, double H, const std::vector<double>& schedule,
                                const ContinuationOptions& options = {});

}  // namespace cmc
