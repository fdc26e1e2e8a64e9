#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cmc/domain.hpp"
#include "cmc/fields.hpp"

// The P-function Phi(x; alpha) = 2 (1 / sqrt(1 - |Du|^2) - 1 - alpha H u)
// of a spacelike CMC graph. For homotopy members u = t v and H is replaced
// by the effective mean curvature tH.
namespace cmc {

struct PhiExtremum {
  int node{-1};
  Vec2 location{};
  double value{0.0};
  bool on_boundary{false};
};

struct PhiField {
  ScalarField field;
  double alpha{1.0};
  double H{1.0};  // effective mean curvature of the analysed graph
  PhiExtremum max_info;
  PhiExtremum min_info;
  double boundary_max{0.0};
  double interior_max{0.0};
  double boundary_min{0.0};
  double interior_min{0.0};

  double range() const { return max_info.value - min_info.value; }
  /// Range of the raw nodal values (no quadratic refinement).
  double nodal_range() const;
};

double phi_pointwise(const Vec2& du, double u, double H, double alpha);

namespace kernels {

std::vector<double> phi_values_serial(std::span<const double> u, std::span<const Vec2> du, double H, double alpha);
std::vector<double> phi_values_parallel(std::span<const double> u, std::span<const Vec2> du, double H, double alpha);

}  // namespace kernels

/// Node-based Phi from recovered node gradients. Extrema are taken over
/// nodes (first index wins ties); an interior extremum is refined by a
/// quadratic fit of Phi when the fitted stationary point lies within h.
PhiField phi_field(const GraphSolution& solution, double alpha, Exec exec = Exec::parallel);

struct PhiMaxReport {
  PhiExtremum argmax;
  double boundary_max{0.0};
  double interior_max{0.0};
  double excess{0.0};  // interior_max - boundary_max
  double tol{0.0};
  bool pass{false};
};

/// Maximum principle check: interior excess over the boundary max must not exceed tol.
PhiMaxReport phi_max_location(const PhiField& phi, double tol);

enum class PhiMinClass { boundary, critical_point, interior };
std::string_view to_string(PhiMinClass c);

struct PhiMinReport {
  PhiExtremum argmin;
  PhiMinClass classification{PhiMinClass::boundary};
  double range{0.0};
  double tol{0.0};
  bool constant{false};  // range <= tol
  bool pass{false};
};

/// Minimum dichotomy: the min lies on the boundary, or at the critical point
/// of u (for alpha = 1 this additionally requires Phi to be constant). An
/// interior minimum within tol of the boundary minimum counts as boundary.
/// `critical_point` is the location of the unique critical point, if known.
PhiMinReport phi_min_location(const PhiField& phi, std::optional<Vec2> critical_point, double tol);

struct BoundaryDerivativeSample {
  int node{-1};
  double s{0.0};
  Vec2 location{};
  double u_n{0.0};        // outward normal derivative of u
  double curvature{0.0};  // boundary curvature K(s)
  double value{0.0};      // dPhi/dn from the boundary identity
};

/// dPhi/dn = -(2 K g u_n^2 + (2 - alpha) f u_n) with g = (1 - u_n^2)^{-1/2},
/// f = -2H, at every boundary node (u = 0 there, so |Du| = |u_n|).
std::vector<BoundaryDerivativeSample> phi_boundary_normal_derivative(const GraphSolution& solution,
                                                                     const ConvexDomain& domain, double alpha,
                                                                     Exec exec = Exec::parallel);

struct SignChainReport {
  int node{-1};
  double q2_at_max{0.0};   // |Du|^2 at the Phi max point
  double q2_max{0.0};      // max over boundary nodes of |Du|^2
  double lhs{0.0};         // q / sqrt(1 - q^2) at the Phi max point
  double rhs{0.0};         // H / K there
  double tol{0.0};
  bool pass{false};
};

/// At the boundary max point p of Phi(.;1): q(p) = q_max and
/// q / sqrt(1 - q^2) <= H / K(p), both within tol.
SignChainReport sign_chain_at_max(const GraphSolution& solution, const ConvexDomain& domain, const PhiField& phi,
                                  double tol, Exec exec = Exec::parallel);

}  // namespace cmc
