#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "cmc/domain.hpp"
#include "cmc/fields.hpp"

// Sharp gradient and height estimates for the CMC Dirichlet problem with
// H > 0, in terms of the extreme boundary curvatures:
//   max |Du|^2 <= H^2 / (H^2 + K_min^2),   min_bdry |Du|^2 >= H^2 / (H^2 + K_max^2),
//   -(sqrt(H^2 + K_min^2) / K_min - 1) / H <= min u <= -(sqrt(H^2 + K_max^2) / K_max - 1) / H,
// all with equality exactly on circles.
namespace cmc {

double gradient_bound(double H, double k_min);
double q_min_bound(double H, double k_max);
double height_lower_bound(double H, double k_min);
double height_upper_bound(double H, double k_max);

/// Discretization errors of a disc run measured against the exact cap, and
/// the tolerances derived from them.
struct Calibration {
  double h{0.0};
  double R{1.0};
  double H{1.0};
  double u_error{0.0};     // max nodal |u - cap|
  double grad_error{0.0};  // max nodal |recovered Du - exact Du|
  double q2_error{0.0};    // max boundary |measured |Du|^2 - exact|
  /// max nodal |Phi(.;1) - exact|; the exact Phi is the constant 2 (sqrt(1 + H^2 R^2) - 1).
  /// This is the gradient-recovery error expressed in units of Phi.
  double phi_error{0.0};

  double height_tol() const { return 3.0 * u_error; }
  double gradient_tol() const { return 3.0 * q2_error; }
  /// P-function principles.
  double phi_tol() const { return 5.0 * phi_error; }
  /// Critical point detection threshold on |Du|.
  double eps_grad() const { return 3.0 * grad_error; }
};

/// Solves the disc of radius R at mean curvature H on a mesh of size h and
/// measures the errors above.
Calibration calibrate(double R, double H, double h, const SolverOptions& options = {});
/// Calibration on the disc with the domain's diameter.
Calibration calibrate_for(const ConvexDomain& domain, double H, double h, const SolverOptions& options = {});

/// Boundary |Du|^2 measurements of the graph graph_scale() * v.
struct BoundaryGradient {
  double q2_max_fit{0.0};       // one-sided quadratic fit at boundary nodes
  double q2_max_elements{0.0};  // element gradients of boundary-adjacent triangles
  double q2_min{0.0};           // min over boundary nodes (fit)
  double q2_max_all_nodes{0.0}; // max over all nodes of the recovered gradient
  int q2_max_node{-1};
  int q2_min_node{-1};
  double q2_max() const { return std::max(q2_max_fit, q2_max_elements); }
};

BoundaryGradient measure_boundary_gradient(const GraphSolution& solution, Exec exec = Exec::parallel);

struct EstimateTolerances {
  double gradient{2e-2};
  double height{2e-3};
  double oscillation{2e-2};
  static EstimateTolerances from(const Calibration& c);
};

struct EstimateReport {
  std::string domain;
  double H{0.0};
  double h{0.0};
  double k_min{0.0};
  double k_max{0.0};
  bool circle{false};
  EstimateTolerances tol;

  BoundaryGradient gradient;
  double q_max2{0.0};
  double gradient_bound{0.0};
  double gradient_slack{0.0};      // bound - q_max2 (conservative, used for the check)
  double gradient_slack_fit{0.0};  // bound - q2_max_fit (used for equality decay)
  bool max_on_boundary{false};
  bool gradient_pass{false};

  double u_min{0.0};
  Vec2 u_min_location{};
  double height_lower{0.0};
  double height_upper{0.0};
  double lower_slack{0.0};  // u_min - lower
  double upper_slack{0.0};  // upper - u_min
  bool height_pass{false};

  double q_min2{0.0};
  double q_min_bound{0.0};
  double q_min_slack{0.0};  // q_min2 - bound
  bool q_min_pass{false};

  double un_oscillation{0.0};   // boundary oscillation of u_n
  double phi_oscillation{0.0};  // boundary oscillation of Phi(.;1)
  bool chain_pass{false};

  /// Every slack is within tolerance on a circle (asymptotic equality still
  /// needs confirm_equality against a refined run).
  bool equality_candidate{false};
  bool equality{false};

  bool pass() const { return gradient_pass && height_pass && q_min_pass && chain_pass; }
};

/// Measured q_max^2 vs the bound; also checks that the max over all nodes is
/// attained on the boundary within tolerance.
void gradient_bound_check(const GraphSolution& solution, const ConvexDomain& domain, EstimateReport& report);
/// u_min refined by a quadratic fit at the minimum node, against both bounds.
void height_bound_check(const GraphSolution& solution, const ConvexDomain& domain, EstimateReport& report);
void q_min_check(const GraphSolution& solution, const ConvexDomain& domain, EstimateReport& report);
/// Boundary oscillation of u_n and of Phi(.;1): both small on circles, both
/// above the tolerance otherwise.
void equality_chain_check(const GraphSolution& solution, const ConvexDomain& domain, EstimateReport& report);

/// All of the above for a t = 1 solution.
EstimateReport estimate_report(const GraphSolution& solution, const ConvexDomain& domain,
                               const EstimateTolerances& tol, Exec exec = Exec::parallel);

/// Largest |slack| among the fitted gradient, q_min and both height slacks.
/// The element cross-check is excluded: it is O(h) with mesh-dependent sign.
double max_abs_slack(const EstimateReport& r);

/// Equality is confirmed when the coarse run is an equality candidate and the
/// slacks of a run at half the mesh size are within its own tolerances and
/// no larger than the coarse ones.
bool confirm_equality(const EstimateReport& coarse, const EstimateReport& fine);

}  // namespace cmc
