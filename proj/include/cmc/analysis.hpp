#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmc/fields.hpp"
#include "cmc/jet.hpp"

// Critical points, sub-level topology, nodal sectors and Taylor identities.
namespace cmc {

enum class CriticalKind { minimum, saddle, maximum, degenerate };
std::string_view to_string(CriticalKind kind);

struct CriticalPoint {
  int node{-1};       // mesh node the point was detected at
  Vec2 location{};    // refined by the local quadratic model
  double value{0.0};  // fitted value of the analysed graph at `location`
  double eig_min{0.0};
  double eig_max{0.0};  // Hessian eigenvalues of the analysed graph
  double K{0.0};        // Gaussian curvature there
  CriticalKind kind{CriticalKind::degenerate};
};

struct CriticalPointReport {
  std::vector<CriticalPoint> points;
  int count() const { return static_cast<int>(points.size()); }
  bool unique() const { return points.size() == 1; }
  int count_of(CriticalKind kind) const;
  bool has_degenerate() const { return count_of(CriticalKind::degenerate) > 0; }
};

struct CriticalPointOptions {
  /// Node gradient magnitude below which a PL-critical node is accepted even
  /// when its quadratic model has no stationary point nearby. <= 0 disables.
  double eps_grad{0.0};
  /// Eigenvalues with |lambda| <= degenerate_threshold are treated as zero.
  double degenerate_threshold{1e-3};
  /// Graph = scale * values; used for values, eigenvalues and K.
  double scale{1.0};
};

/// Interior nodes whose link changes sign 0 or >= 4 times (PL critical),
/// confirmed by the quadratic model (stationary point within 1.5 h) or by a
/// small recovered gradient, classified from the fitted Hessian. Candidates
/// closer than 1.5 h are merged.
CriticalPointReport critical_points(const TriMesh& mesh, std::span<const double> values,
                                    const CriticalPointOptions& options);

/// Analyses the graph of graph_scale() * v. The degenerate threshold is
/// 1e-3 times the effective mean curvature.
CriticalPointReport critical_points(const GraphSolution& solution, double eps_grad = 0.0);

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Number of connected components of {values < m} under P1 interpolation.
/// Requires min(values) < m < max(values).
int sublevel_components(const TriMesh& mesh, std::span<const double> values, double m);
int sublevel_components(const GraphSolution& solution, double m);

struct LevelTopologyReport {
  std::vector<double> levels;
  std::vector<int> counts;
  int max_count() const;
};

/// n_levels uniform levels strictly inside (min u, 0).
LevelTopologyReport level_topology(const GraphSolution& solution, int n_levels = 50);

struct SectorResult {
  int sectors{0};
  int sign_changes{0};
  bool indeterminate{false};
};

struct SectorOptions {
  int samples{720};
  double band_abs{0.0};   // hysteresis band, absolute
  double band_rel{1e-3};  // and relative to max |w| on the circle
};

/// Sign-alternating arcs of w on the circle of the given radius about p.
SectorResult nodal_sectors(const std::function<double(const Vec2&)>& w, const Vec2& p, double radius,
                           const SectorOptions& options = {});
/// Same on a nodal field (P1 interpolation); indeterminate if the circle leaves the mesh.
SectorResult nodal_sectors(const ScalarField& w, const Vec2& p, double radius, const SectorOptions& options = {});

struct HarmonicFit {
  bool found{false};
  int n{0};
  std::complex<double> lambda{};
  double relative_residual{1.0};
  /// Per radius: RMS of the fitted term divided by radius^n.
  std::vector<double> scaled_amplitude;
};

/// Least-squares fit of Re(lambda z^n), z = x - p, over circles of the given
/// radii for n = 3..n_max; the n with the smallest relative residual wins,
/// and is reported only if that residual is below 0.1.
HarmonicFit fit_leading_harmonic(const std::function<double(const Vec2&)>& w, const Vec2& p,
                                 std::span<const double> radii, int n_max = 8, int samples = 256);

struct TaylorCheck {
  std::string name;  // e.g. "u_xxyy"
  double measured{0.0};
  double expected{0.0};
  double tol{0.0};
  bool pass{false};
};

struct TaylorReport {
  std::vector<TaylorCheck> checks;
  bool all_pass() const;
};

/// Identities at the critical point p of an analytic graph with mean
/// curvature H (coordinates in which the Hessian is diagonal): first order 0,
/// u_xx = u_yy = H, u_xy = 0, third order 0, u_xxxx = u_yyyy = -3H^3,
/// u_xxyy = -H^3, u_xxxy = u_xyyy = 0, fifth order 0. Derivatives are exact
/// (jet arithmetic); each check uses relative tolerance rel_tol against
/// max(|expected|, H^(order-1)).
TaylorReport taylor_identities(const std::function<Jet(const Jet&, const Jet&)>& graph, const Vec2& p, double H,
                               double rel_tol = 1e-6);

/// Order <= 2 subset on a discrete solution, at its critical point, from the
/// recovered quadratic model; absolute tolerance `tol`.
TaylorReport taylor_identities(const GraphSolution& solution, const CriticalPoint& point, double tol = 5e-2);

struct CriticalTrack {
  std::vector<double> t;
  std::vector<Vec2> location;  // unique minimum per step (NaN if not unique)
  std::vector<double> displacement;  // between consecutive steps
  double max_displacement{0.0};
  bool all_unique{true};
};

CriticalTrack track_critical_point(std::span<const GraphSolution> steps, double eps_grad = 0.0);

}  // namespace cmc
