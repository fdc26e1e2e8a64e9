#include "cmc/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cmc {

std::string_view to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::minimum:
      return "minimum";
    case CriticalKind::saddle:
      return "saddle";
    case CriticalKind::maximum:
      return "maximum";
    case CriticalKind::degenerate:
      return "degenerate";
  }
  return "?";
}

int CriticalPointReport::count_of(CriticalKind kind) const {
  return static_cast<int>(std::count_if(points.begin(), points.end(), [&](const auto& p) { return p.kind == kind; }));
}

namespace {

// Link of an interior node as a cyclic vertex sequence.
std::vector<int> link_cycle(const TriMesh& mesh, int node) {
  std::vector<std::pair<int, int>> edges;
  for (int e : mesh.node_triangles(node)) {
    const Triangle& t = mesh.triangle(e);
    const int k = t[0] == node ? 0 : t[1] == node ? 1 : 2;
    edges.emplace_back(t[(k + 1) % 3], t[(k + 2) % 3]);
  }
  std::vector<int> cycle{edges.front().first};
  int cur = edges.front().second;
  while (cur != cycle.front() && cycle.size() <= edges.size()) {
    cycle.push_back(cur);
    auto it = std::find_if(edges.begin(), edges.end(), [&](const auto& ed) { return ed.first == cur; });
    if (it == edges.end()) break;
    cur = it->second;
  }
  return cycle;
}

// Symbolic perturbation: ties are broken by node index.
bool above(std::span<const double> v, int a, int b) { return v[a] > v[b] || (v[a] == v[b] && a > b); }

struct Candidate {
  CriticalPoint point;
  double offset;  // distance from node to refined location
};

}  // namespace

CriticalPointReport critical_points(const TriMesh& mesh, std::span<const double> values,
                                    const CriticalPointOptions& options) {
  const int nn = static_cast<int>(mesh.num_nodes());
  const double h = mesh.h();
  const double sc = options.scale;
  std::vector<Candidate> candidates;
  for (int n = 0; n < nn; ++n) {
    if (mesh.is_boundary(n)) continue;
    const std::vector<int> link = link_cycle(mesh, n);
    int changes = 0;
    const int m = static_cast<int>(link.size());
    for (int k = 0; k < m; ++k)
      if (above(values, link[k], n) != above(values, link[(k + 1) % m], n)) ++changes;
    if (changes == 2) continue;

    const QuadraticFit fit = fit_quadratic(mesh, values, n);
    const SymMat2 A{sc * fit.hessian.xx, sc * fit.hessian.xy, sc * fit.hessian.yy};
    const Vec2 g = sc * fit.gradient;
    Vec2 d{};
    bool near = false;
    const double det = A.det();
    if (det != 0.0) {
      d = {-(A.yy * g.x - A.xy * g.y) / det, -(-A.xy * g.x + A.xx * g.y) / det};
      near = norm(d) <= 1.5 * h;
    }
    const bool small_grad = options.eps_grad > 0.0 && norm(g) < options.eps_grad;
    if (!near && !small_grad) continue;
    if (!near) d = {};

    CriticalPoint p;
    p.node = n;
    p.location = mesh.node(n) + d;
    p.value = sc * fit.value + dot(g, d) + 0.5 * dot(d, A.apply(d));
    const auto [e0, e1] = A.eigenvalues();
    p.eig_min = e0;
    p.eig_max = e1;
    const Vec2 grad_at = g + A.apply(d);
    const double w = std::max(1.0 - norm2(grad_at), std::numeric_limits<double>::min());
    p.K = -det / (w * w);
    const double thr = options.degenerate_threshold;
    if (e0 > thr)
      p.kind = CriticalKind::minimum;
    else if (e1 < -thr)
      p.kind = CriticalKind::maximum;
    else if (e0 < -thr && e1 > thr)
      p.kind = CriticalKind::saddle;
    else
      p.kind = CriticalKind::degenerate;
    candidates.push_back({p, norm(d)});
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.offset < b.offset; });
  CriticalPointReport report;
  for (const Candidate& c : candidates) {
    const bool merged = std::any_of(report.points.begin(), report.points.end(), [&](const CriticalPoint& q) {
      return norm(q.location - c.point.location) <= 1.5 * h;
    });
    if (!merged) report.points.push_back(c.point);
  }
  std::sort(report.points.begin(), report.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.node < b.node; });
  return report;
}

CriticalPointReport critical_points(const GraphSolution& solution, double eps_grad) {
  CriticalPointOptions o;
  o.eps_grad = eps_grad;
  o.scale = solution.graph_scale();
  o.degenerate_threshold = 1e-3 * std::abs(o.scale * solution.H);
  return critical_points(*solution.mesh, solution.values, o);
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

int sublevel_components(const TriMesh& mesh, std::span<const double> values, double m) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(m > *lo && m < *hi)) throw AnalysisError("level outside the open range of the field");
  const double bump = 1e-14 * std::max(std::abs(*lo), std::abs(*hi));
  auto below = [&](int n) {
    const double v = values[n] == m ? values[n] + bump : values[n];
    return v < m;
  };
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<char> active(nt, 0);
  for (int e = 0; e < nt; ++e) {
    const Triangle& t = mesh.triangle(e);
    active[e] = below(t[0]) || below(t[1]) || below(t[2]);
  }
  UnionFind uf(nt);
  for (int e = 0; e < nt; ++e) {
    if (!active[e]) continue;
    const Triangle& t = mesh.triangle(e);
    for (int k = 0; k < 3; ++k) {
      const int f = mesh.triangle_neighbor(e, k);
      if (f < 0 || f < e || !active[f]) continue;
      // Shared edge is opposite local vertex k.
      if (below(t[(k + 1) % 3]) || below(t[(k + 2) % 3])) uf.unite(e, f);
    }
  }
  int count = 0;
  for (int e = 0; e < nt; ++e)
    if (active[e] && uf.find(e) == e) ++count;
  return count;
}

int sublevel_components(const GraphSolution& solution, double m) {
  std::vector<double> u(solution.values);
  const double s = solution.graph_scale();
  for (double& x : u) x *= s;
  return sublevel_components(*solution.mesh, u, m);
}

int LevelTopologyReport::max_count() const { return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end()); }

LevelTopologyReport level_topology(const GraphSolution& solution, int n_levels) {
  std::vector<double> u(solution.values);
  const double s = solution.graph_scale();
  for (double& x : u) x *= s;
  const double umin = *std::min_element(u.begin(), u.end());
  LevelTopologyReport r;
  r.levels.resize(n_levels);
  r.counts.resize(n_levels);
  for (int k = 0; k < n_levels; ++k) r.levels[k] = umin - umin * (k + 1.0) / (n_levels + 1.0);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n_levels; ++k) r.counts[k] = sublevel_components(*solution.mesh, u, r.levels[k]);
  return r;
}

namespace {

SectorResult count_sectors(const std::vector<double>& w, const SectorOptions& options) {
  double maxabs = 0.0;
  for (double x : w) maxabs = std::max(maxabs, std::abs(x));
  const double band = std::max(options.band_abs, options.band_rel * maxabs);
  std::vector<int> signs;
  for (double x : w)
    if (std::abs(x) > band) signs.push_back(x > 0.0 ? 1 : -1);
  SectorResult r;
  if (signs.empty()) {
    r.indeterminate = true;
    return r;
  }
  for (std::size_t k = 0; k < signs.size(); ++k)
    if (signs[k] != signs[(k + 1) % signs.size()]) ++r.sign_changes;
  r.sectors = r.sign_changes == 0 ? 1 : r.sign_changes;
  return r;
}

Vec2 on_circle(const Vec2& p, double radius, int k, int samples) {
  const double phi = 2.0 * kPi * k / samples;
  return p + Vec2{radius * std::cos(phi), radius * std::sin(phi)};
}

}  // namespace

SectorResult nodal_sectors(const std::function<double(const Vec2&)>& w, const Vec2& p, double radius,
                           const SectorOptions& options) {
  std::vector<double> v(options.samples);
  for (int k = 0; k < options.samples; ++k) v[k] = w(on_circle(p, radius, k, options.samples));
  return count_sectors(v, options);
}

SectorResult nodal_sectors(const ScalarField& w, const Vec2& p, double radius, const SectorOptions& options) {
  std::vector<double> v(options.samples);
  for (int k = 0; k < options.samples; ++k) {
    v[k] = w.mesh->interpolate(w.values, on_circle(p, radius, k, options.samples));
    if (std::isnan(v[k])) return {0, 0, true};
  }
  return count_sectors(v, options);
}

HarmonicFit fit_leading_harmonic(const std::function<double(const Vec2&)>& w, const Vec2& p,
                                 std::span<const double> radii, int n_max, int samples) {
  const int rows = static_cast<int>(radii.size()) * samples;
  Eigen::VectorXd b(rows);
  std::vector<std::complex<double>> z(rows);
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (int k = 0; k < samples; ++k) {
      const Vec2 q = on_circle(p, radii[i], k, samples);
      z[i * samples + k] = {q.x - p.x, q.y - p.y};
      b[i * samples + k] = w(q);
    }
  HarmonicFit best;
  const double bnorm = b.norm();
  if (bnorm == 0.0) return best;
  for (int n = 3; n <= n_max; ++n) {
    Eigen::MatrixXd A(rows, 2);
    for (int r = 0; r < rows; ++r) {
      const std::complex<double> zn = std::pow(z[r], n);
      A(r, 0) = zn.real();
      A(r, 1) = -zn.imag();
    }
    const Eigen::Vector2d x = A.colPivHouseholderQr().solve(b);
    const double rel = (b - A * x).norm() / bnorm;
    if (rel < best.relative_residual) {
      best.relative_residual = rel;
      best.n = n;
      best.lambda = {x[0], x[1]};
    }
  }
  best.found = best.relative_residual < 0.1;
  if (best.found) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
      double ss = 0.0;
      for (int k = 0; k < samples; ++k) ss += b[i * samples + k] * b[i * samples + k];
      best.scaled_amplitude.push_back(std::sqrt(ss / samples) / std::pow(radii[i], best.n));
    }
  } else {
    best.n = 0;
    best.lambda = {};
  }
  return best;
}

bool TaylorReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const TaylorCheck& c) { return c.pass; });
}

namespace {

std::string derivative_name(int i, int j) {
  return "u_" + std::string(i, 'x') + std::string(j, 'y');
}

}  // namespace

TaylorReport taylor_identities(const std::function<Jet(const Jet&, const Jet&)>& graph, const Vec2& p, double H,
                               double rel_tol) {
  const Jet f = graph(Jet::variable_x(p.x), Jet::variable_y(p.y));
  auto expected = [&](int i, int j) {
    const int order = i + j;
    if (order == 2) return (i == 1) ? 0.0 : H;
    if (order == 4) {
      if (i == 4 || j == 4) return -3.0 * H * H * H;
      if (i == 2) return -H * H * H;
    }
    return 0.0;
  };
  TaylorReport r;
  for (int order = 1; order <= kJetDegree; ++order)
    for (int i = order; i >= 0; --i) {
      const int j = order - i;
      TaylorCheck c;
      c.name = derivative_name(i, j);
      c.measured = f.derivative(i, j);
      c.expected = expected(i, j);
      c.tol = rel_tol * std::max(std::abs(c.expected), std::pow(std::abs(H), order - 1));
      c.pass = std::abs(c.measured - c.expected) <= c.tol;
      r.checks.push_back(c);
    }
  return r;
}

TaylorReport taylor_identities(const GraphSolution& solution, const CriticalPoint& point, double tol) {
  const double s = solution.graph_scale();
  const double H = s * solution.H;
  const QuadraticFit fit = fit_quadratic(*solution.mesh, solution.values, point.node);
  const SymMat2 A{s * fit.hessian.xx, s * fit.hessian.xy, s * fit.hessian.yy};
  const Vec2 g = s * fit.gradient + A.apply(point.location - solution.mesh->node(point.node));
  const std::pair<std::string, std::pair<double, double>> items[] = {
      {"u_x", {g.x, 0.0}}, {"u_y", {g.y, 0.0}}, {"u_xx", {A.xx, H}}, {"u_xy", {A.xy, 0.0}}, {"u_yy", {A.yy, H}}};
  TaylorReport r;
  for (const auto& [name, mv] : items) {
    TaylorCheck c{name, mv.first, mv.second, tol, false};
    c.pass = std::abs(c.measured - c.expected) <= tol;
    r.checks.push_back(c);
  }
  return r;
}

CriticalTrack track_critical_point(std::span<const GraphSolution> steps, double eps_grad) {
  CriticalTrack track;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const GraphSolution& s : steps) {
    const CriticalPointReport rep = critical_points(s, eps_grad);
    track.t.push_back(s.t);
    if (rep.unique() && rep.points[0].kind == CriticalKind::minimum) {
      track.location.push_back(rep.points[0].location);
    } else {
      track.location.push_back({nan, nan});
      track.all_unique = false;
    }
  }
  for (std::size_t k = 1; k < track.location.size(); ++k) {
    const double d = norm(track.location[k] - track.location[k - 1]);
    track.displacement.push_back(d);
    if (!std::isnan(d)) track.max_displacement = std::max(track.max_displacement, d);
  }
  return track;
}

}  // namespace cmc
