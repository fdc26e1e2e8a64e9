#include "cmc/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cmc {

namespace {

struct LocalResult {
  std::array<double, 3> residual;
  std::array<double, 9> jacobian;
  double slope;  // t|Dv|
  bool spacelike;
};

inline Vec2 element_gradient(const TriMesh& mesh, std::span<const double> v, int e) {
  const auto& tri = mesh.triangle(e);
  const auto& g = mesh.basis_gradients(e);
  return v[tri[0]] * g[0] + v[tri[1]] * g[1] + v[tri[2]] * g[2];
}

inline LocalResult element_kernel(const TriMesh& mesh, std::span<const double> v, double t, double H, int e) {
  LocalResult out{};
  const auto& g = mesh.basis_gradients(e);
  const double area = mesh.area(e);
  const Vec2 grad = element_gradient(mesh, v, e);
  const double q2 = t * t * norm2(grad);
  out.slope = std::sqrt(q2);
  out.spacelike = q2 < 1.0;
  if (!out.spacelike) return out;
  const double w = 1.0 / std::sqrt(1.0 - q2);
  const double w3t2 = t * t * w * w * w;
  const Vec2 flux = w * grad;
  const double source = 2.0 * H * area / 3.0;
  // d(flux)/d(grad) = w I + t^2 w^3 grad grad^T
  const SymMat2 m{w + w3t2 * grad.x * grad.x, w3t2 * grad.x * grad.y, w + w3t2 * grad.y * grad.y};
  for (int a = 0; a < 3; ++a) {
    out.residual[a] = area * dot(flux, g[a]) + source;
    const Vec2 mg = m.apply(g[a]);
    for (int b = a; b < 3; ++b) {
      const double jab = area * dot(mg, g[b]);
      out.jacobian[3 * a + b] = jab;
      out.jacobian[3 * b + a] = jab;
    }
  }
  return out;
}

void record_bad(ElementContributions& c, int e, double slope) {
  if (c.bad_element < 0 || e < c.bad_element) {
    c.bad_element = e;
    c.bad_slope = slope;
  }
}

ElementContributions contributions(const TriMesh& mesh, std::span<const double> v, double t, double H, Exec exec) {
  return exec == Exec::serial ? kernels::element_contributions_serial(mesh, v, t, H)
                              : kernels::element_contributions_parallel(mesh, v, t, H);
}

double inf_norm(const Eigen::VectorXd& r) { return r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0; }

}  // namespace

NonSpacelikeError::NonSpacelikeError(int element, double slope)
    : std::runtime_error("element " + std::to_string(element) + " is not spacelike (t|Dv| = " +
                         std::to_string(slope) + ")"),
      element_(element),
      slope_(slope) {}

ConvergenceError::ConvergenceError(double t, int iters, double last_residual)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "Newton did not converge at t=" << t << " after " << iters << " iterations (residual "
           << last_residual << ")";
        return os.str();
      }()),
      t_(t),
      iters_(iters),
      last_residual_(last_residual) {}

ContinuationError::ContinuationError(double t, const std::string& detail)
    : std::runtime_error("continuation failed at t=" + std::to_string(t) + ": " + detail), t_(t) {}

std::vector<double> GraphSolution::u_values() const {
  std::vector<double> u(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) u[i] = t * values[i];
  return u;
}

DofMap::DofMap(const TriMesh& mesh) : dof_of_node_(mesh.num_nodes(), -1) {
  for (int n = 0; n < static_cast<int>(mesh.num_nodes()); ++n)
    if (!mesh.is_boundary(n)) {
      dof_of_node_[n] = static_cast<int>(interior_.size());
      interior_.push_back(n);
    }
}

namespace kernels {

ElementContributions element_contributions_serial(const TriMesh& mesh, std::span<const double> values, double t,
                                                  double H) {
  const int ne = static_cast<int>(mesh.num_triangles());
  ElementContributions c;
  c.residual.resize(ne);
  c.jacobian.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const LocalResult r = element_kernel(mesh, values, t, H, e);
    if (!r.spacelike) {
      record_bad(c, e, r.slope);
      continue;
    }
    c.residual[e] = r.residual;
    c.jacobian[e] = r.jacobian;
  }
  return c;
}

ElementContributions element_contributions_parallel(const TriMesh& mesh, std::span<const double> values, double t,
                                                    double H) {
  const int ne = static_cast<int>(mesh.num_triangles());
  ElementContributions c;
  c.residual.resize(ne);
  c.jacobian.resize(ne);
  int first_bad = ne;
#pragma omp parallel for schedule(static) reduction(min : first_bad)
  for (int e = 0; e < ne; ++e) {
    const LocalResult r = element_kernel(mesh, values, t, H, e);
    if (!r.spacelike) {
      first_bad = std::min(first_bad, e);
      continue;
    }
    c.residual[e] = r.residual;
    c.jacobian[e] = r.jacobian;
  }
  if (first_bad < ne) record_bad(c, first_bad, t * norm(element_gradient(mesh, values, first_bad)));
  return c;
}

std::vector<Vec2> element_gradients_serial(const TriMesh& mesh, std::span<const double> values) {
  std::vector<Vec2> out(mesh.num_triangles());
  for (int e = 0; e < static_cast<int>(out.size()); ++e) out[e] = element_gradient(mesh, values, e);
  return out;
}

std::vector<Vec2> element_gradients_parallel(const TriMesh& mesh, std::span<const double> values) {
  const int ne = static_cast<int>(mesh.num_triangles());
  std::vector<Vec2> out(ne);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) out[e] = element_gradient(mesh, values, e);
  return out;
}

}  // namespace kernels

std::vector<Vec2> element_gradients(const TriMesh& mesh, std::span<const double> values, Exec exec) {
  return exec == Exec::serial ? kernels::element_gradients_serial(mesh, values)
                              : kernels::element_gradients_parallel(mesh, values);
}

double max_spacelike_slope(const TriMesh& mesh, std::span<const double> values, double t, Exec exec) {
  double best = 0.0;
  for (const Vec2& g : element_gradients(mesh, values, exec)) best = std::max(best, norm(g));
  return t * best;
}

AssembledSystem assemble(const TriMesh& mesh, std::span<const double> values, double t, double H, Exec exec) {
  const ElementContributions c = contributions(mesh, values, t, H, exec);
  if (c.bad_element >= 0) throw NonSpacelikeError(c.bad_element, c.bad_slope);
  const DofMap dofs(mesh);
  AssembledSystem sys;
  sys.residual = Eigen::VectorXd::Zero(dofs.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * mesh.num_triangles());
  for (int e = 0; e < static_cast<int>(mesh.num_triangles()); ++e) {
    const auto& tri = mesh.triangle(e);
    for (int a = 0; a < 3; ++a) {
      const int i = dofs.dof(tri[a]);
      if (i < 0) continue;
      sys.residual[i] += c.residual[e][a];
      for (int b = 0; b < 3; ++b) {
        const int j = dofs.dof(tri[b]);
        if (j >= 0) triplets.emplace_back(i, j, c.jacobian[e][3 * a + b]);
      }
    }
  }
  sys.jacobian.resize(dofs.size(), dofs.size());
  sys.jacobian.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

std::vector<double> nodal_residual(const TriMesh& mesh, std::span<const double> values, double t, double H,
                                   Exec exec) {
  const ElementContributions c = contributions(mesh, values, t, H, exec);
  if (c.bad_element >= 0) throw NonSpacelikeError(c.bad_element, c.bad_slope);
  std::vector<double> r(mesh.num_nodes(), 0.0);
  for (int e = 0; e < static_cast<int>(mesh.num_triangles()); ++e)
    for (int a = 0; a < 3; ++a) r[mesh.triangle(e)[a]] += c.residual[e][a];
  return r;
}

std::vector<double> zero_field(const TriMesh& mesh) { return std::vector<double>(mesh.num_nodes(), 0.0); }

GraphSolution newton_solve(std::shared_ptr<const TriMesh> mesh_ptr, double t, double H, std::vector<double> init,
                           const SolverOptions& opts) {
  const TriMesh& mesh = *mesh_ptr;
  if (init.size() != mesh.num_nodes()) throw std::invalid_argument("initial guess has the wrong length");
  if (!(opts.newton_tol > 0.0) || !(opts.spacelike_cap < 1.0) || opts.max_iters <= 0)
    throw std::invalid_argument("invalid solver options");
  for (int n : mesh.boundary_nodes()) init[n] = 0.0;
  {
    const double slope0 = max_spacelike_slope(mesh, init, t, opts.exec);
    if (slope0 > opts.spacelike_cap) throw NonSpacelikeError(-1, slope0);
  }

  const DofMap dofs(mesh);
  GraphSolution sol;
  sol.mesh = mesh_ptr;
  sol.t = t;
  sol.H = H;
  sol.values = std::move(init);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
  AssembledSystem sys = assemble(mesh, sol.values, t, H, opts.exec);
  double rnorm = inf_norm(sys.residual);
  int iter = 0;
  for (; rnorm > opts.newton_tol; ++iter) {
    if (iter >= opts.max_iters) throw ConvergenceError(t, iter, rnorm);
    if (!analyzed) {
      ldlt.analyzePattern(sys.jacobian);
      analyzed = true;
    }
    ldlt.factorize(sys.jacobian);
    if (ldlt.info() != Eigen::Success) throw ConvergenceError(t, iter, rnorm);
    const Eigen::VectorXd step = ldlt.solve(-sys.residual);

    const double merit = sys.residual.norm();
    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> trial(sol.values.size());
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, alpha *= opts.backtrack_factor) {
      trial = sol.values;
      for (int i = 0; i < dofs.size(); ++i) trial[dofs.node(i)] += alpha * step[i];
      if (max_spacelike_slope(mesh, trial, t, opts.exec) > opts.spacelike_cap) {
        ++sol.safeguard_hits;
        continue;
      }
      AssembledSystem next = assemble(mesh, trial, t, H, opts.exec);
      const double next_inf = inf_norm(next.residual);
      if (next.residual.norm() <= (1.0 - 1e-4 * alpha) * merit || next_inf <= opts.newton_tol) {
        sol.values.swap(trial);
        sys = std::move(next);
        rnorm = next_inf;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError(t, iter + 1, rnorm);
  }

  sol.iters = iter;
  sol.residual_norm = rnorm;
  sol.theta = 1.0 - max_spacelike_slope(mesh, sol.values, t, opts.exec);
  if (sol.safeguard_hits > opts.safeguard_warn_limit)
    sol.warnings.push_back("spacelike safeguard triggered " + std::to_string(sol.safeguard_hits) + " times");
  return sol;
}

std::vector<double> uniform_schedule(int n_steps) {
  if (n_steps < 2) throw std::invalid_argument("a schedule needs at least two steps");
  std::vector<double> s(n_steps);
  for (int i = 0; i < n_steps; ++i) s[i] = static_cast<double>(i) / (n_steps - 1);
  return s;
}

namespace {

GraphSolution solve_segment(const std::shared_ptr<const TriMesh>& mesh, double H, const GraphSolution& from,
                            double t_target, const ContinuationOptions& opts, int depth) {
  try {
    return newton_solve(mesh, t_target, H, from.values, opts.solver);
  } catch (const std::runtime_error& err) {
    if (depth >= opts.max_bisections) throw ContinuationError(t_target, err.what());
    const double mid = 0.5 * (from.t + t_target);
    const GraphSolution half = solve_segment(mesh, H, from, mid, opts, depth + 1);
    return solve_segment(mesh, H, half, t_target, opts, depth + 1);
  }
}

}  // namespace

ContinuationResult continuation(std::shared_ptr<const TriMesh> mesh, double H, const std::vector<double>& schedule,
                                const ContinuationOptions& options) {
  if (schedule.size() < 2 || schedule.front() != 0.0 || schedule.back() != 1.0)
    throw std::invalid_argument("continuation schedule must start at 0 and end at 1");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i - 1]))
      throw std::invalid_argument("continuation schedule must be strictly increasing");

  ContinuationResult result;
  try {
    result.steps.push_back(newton_solve(mesh, 0.0, H, zero_field(*mesh), options.solver));
  } catch (const std::runtime_error& err) {
    throw ContinuationError(0.0, err.what());
  }
  for (std::size_t i = 1; i < schedule.size(); ++i)
    result.steps.push_back(solve_segment(mesh, H, result.steps.back(), schedule[i], options, 0));
  result.theta0 = 1.0;
  for (const auto& s : result.steps) result.theta0 = std::min(result.theta0, s.theta);
  return result;
}

}  // namespace cmc
