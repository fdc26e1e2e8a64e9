#include "cmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>

namespace cmc {

namespace {

// Positive when d lies inside the circumcircle of the counter-clockwise triangle (a, b, c).
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  const double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
  const double mag = (std::abs(adx) + std::abs(ady)) * (std::abs(bdy * cd) + std::abs(bd * cdy) +
                                                        std::abs(bdx * cd) + std::abs(bd * cdx)) +
                     ad * (std::abs(bdx * cdy) + std::abs(bdy * cdx));
  return std::abs(det) <= 1e-12 * mag ? 0.0 : det;
}

// Triangle soup with neighbor links; nbr[e][k] is across the edge opposite vertex k.
class Triangulation {
 public:
  Triangulation(std::span<const Vec2> pts, std::vector<Triangle> tris) : pts_(pts), tris_(std::move(tris)) {
    build_adjacency();
  }

  std::vector<Triangle> release() && { return std::move(tris_); }

  int legalize_all() {
    std::vector<std::pair<int, int>> stack;
    for (int e = static_cast<int>(tris_.size()) - 1; e >= 0; --e)
      for (int k = 2; k >= 0; --k) stack.emplace_back(e, k);
    return legalize(stack);
  }

  void insert(int p) {
    const int start = locate(pts_[p]);
    // Cavity: triangles whose circumcircle contains p, grown from the containing one.
    std::vector<int> cavity{start};
    std::vector<char>& in_cavity = mark_;
    in_cavity.resize(tris_.size(), 0);
    in_cavity[start] = 1;
    for (std::size_t i = 0; i < cavity.size(); ++i) {
      const int e = cavity[i];
      for (int k = 0; k < 3; ++k) {
        const int f = nbr_[e][k];
        if (f < 0 || in_cavity[f]) continue;
        const Triangle& t = tris_[f];
        if (incircle(pts_[t[0]], pts_[t[1]], pts_[t[2]], pts_[p]) > 0.0) {
          in_cavity[f] = 1;
          cavity.push_back(f);
        }
      }
    }
    struct Rim {
      int a, b, outside;
    };
    std::vector<Rim> rim;
    for (int e : cavity)
      for (int k = 0; k < 3; ++k) {
        const int f = nbr_[e][k];
        if (f >= 0 && in_cavity[f]) continue;
        rim.push_back({tris_[e][(k + 1) % 3], tris_[e][(k + 2) % 3], f});
      }
    for (int e : cavity) in_cavity[e] = 0;

    std::vector<int> slots(cavity.begin(), cavity.end());
    std::sort(slots.begin(), slots.end());
    while (slots.size() < rim.size()) {
      slots.push_back(static_cast<int>(tris_.size()));
      tris_.push_back({});
      nbr_.push_back({-1, -1, -1});
      mark_.push_back(0);
    }
    for (std::size_t j = 0; j < rim.size(); ++j) {
      const int e = slots[j];
      tris_[e] = {rim[j].a, rim[j].b, p};
      nbr_[e] = {-1, -1, rim[j].outside};
      if (rim[j].outside >= 0) {
        auto& on = nbr_[rim[j].outside];
        const Triangle& ot = tris_[rim[j].outside];
        for (int k = 0; k < 3; ++k)
          if (ot[(k + 1) % 3] == rim[j].b && ot[(k + 2) % 3] == rim[j].a) on[k] = e;
      }
    }
    // Fan links: edge (b, p) of one new triangle meets edge (p, a) of the next.
    for (std::size_t j = 0; j < rim.size(); ++j)
      for (std::size_t i = 0; i < rim.size(); ++i)
        if (rim[i].a == rim[j].b) {
          nbr_[slots[j]][0] = slots[i];
          nbr_[slots[i]][1] = slots[j];
        }
    last_ = slots.front();
  }

 private:
  void build_adjacency() {
    nbr_.assign(tris_.size(), {-1, -1, -1});
    mark_.assign(tris_.size(), 0);
    std::map<std::pair<int, int>, std::pair<int, int>> edges;
    for (int e = 0; e < static_cast<int>(tris_.size()); ++e)
      for (int k = 0; k < 3; ++k) {
        const int a = tris_[e][(k + 1) % 3];
        const int b = tris_[e][(k + 2) % 3];
        auto it = edges.find({b, a});
        if (it != edges.end()) {
          nbr_[e][k] = it->second.first;
          nbr_[it->second.first][it->second.second] = e;
          edges.erase(it);
        } else {
          edges[{a, b}] = {e, k};
        }
      }
  }

  void replace_nbr(int f, int old_e, int new_e) {
    if (f < 0) return;
    for (int& n : nbr_[f])
      if (n == old_e) n = new_e;
  }

  int legalize(std::vector<std::pair<int, int>>& stack) {
    int flips = 0;
    while (!stack.empty()) {
      const auto [e, k] = stack.back();
      stack.pop_back();
      const int f = nbr_[e][k];
      if (f < 0) continue;
      const Triangle te = tris_[e];
      const int a = te[k], b = te[(k + 1) % 3], c = te[(k + 2) % 3];
      int l = 0;
      while (nbr_[f][l] != e) ++l;
      const int d = tris_[f][l];
      if (incircle(pts_[a], pts_[b], pts_[c], pts_[d]) <= 0.0) continue;
      if (orient2d(pts_[a], pts_[b], pts_[d]) <= 0.0 || orient2d(pts_[d], pts_[c], pts_[a]) <= 0.0)
        continue;
      const int n1 = nbr_[f][(l + 1) % 3];
      const int n2 = nbr_[e][(k + 2) % 3];
      const int n3 = nbr_[e][(k + 1) % 3];
      const int n4 = nbr_[f][(l + 2) % 3];
      tris_[e] = {a, b, d};
      nbr_[e] = {n1, f, n2};
      tris_[f] = {d, c, a};
      nbr_[f] = {n3, e, n4};
      replace_nbr(n1, f, e);
      replace_nbr(n3, e, f);
      ++flips;
      stack.emplace_back(e, 0);
      stack.emplace_back(e, 2);
      stack.emplace_back(f, 0);
      stack.emplace_back(f, 2);
    }
    return flips;
  }

  int locate(const Vec2& p) const {
    int e = last_ < static_cast<int>(tris_.size()) ? last_ : 0;
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Triangle& t = tris_[e];
      int next = -1;
      for (int k = 0; k < 3; ++k)
        if (orient2d(pts_[t[(k + 1) % 3]], pts_[t[(k + 2) % 3]], p) < 0.0 && nbr_[e][k] >= 0) {
          next = nbr_[e][k];
          break;
        }
      if (next < 0) return e;
      e = next;
    }
    for (int f = 0; f < static_cast<int>(tris_.size()); ++f) {
      const Triangle& t = tris_[f];
      if (orient2d(pts_[t[0]], pts_[t[1]], p) >= 0.0 && orient2d(pts_[t[1]], pts_[t[2]], p) >= 0.0 &&
          orient2d(pts_[t[2]], pts_[t[0]], p) >= 0.0)
        return f;
    }
    throw MeshError("point location failed during Delaunay insertion");
  }

  std::span<const Vec2> pts_;
  std::vector<Triangle> tris_;
  std::vector<std::array<int, 3>> nbr_;
  std::vector<char> mark_;
  int last_{0};
};

}  // namespace

std::vector<Triangle> delaunay_convex(std::span<const Vec2> points, int hull_count) {
  if (hull_count < 3) throw MeshError("convex hull needs at least three vertices");
  std::vector<Triangle> fan;
  for (int i = 1; i + 1 < hull_count; ++i) fan.push_back({0, i, i + 1});
  Triangulation tri(points, std::move(fan));
  tri.legalize_all();
  for (int p = hull_count; p < static_cast<int>(points.size()); ++p) tri.insert(p);
  return std::move(tri).release();
}

int make_delaunay(std::span<const Vec2> points, std::vector<Triangle>& triangles) {
  Triangulation tri(points, std::move(triangles));
  const int flips = tri.legalize_all();
  triangles = std::move(tri).release();
  return flips;
}

TriMesh::TriMesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles, std::vector<int> boundary_nodes,
                 std::vector<double> boundary_params, double h)
    : nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_nodes_(std::move(boundary_nodes)),
      boundary_param_(nodes_.size(), -1.0),
      h_(h) {
  if (boundary_params.size() != boundary_nodes_.size())
    throw MeshError("boundary parameter count does not match boundary node count");
  for (std::size_t i = 0; i < boundary_nodes_.size(); ++i) boundary_param_[boundary_nodes_[i]] = boundary_params[i];

  const std::size_t nt = triangles_.size();
  areas_.resize(nt);
  basis_grads_.resize(nt);
  node_tris_.assign(nodes_.size(), {});
  lumped_mass_.assign(nodes_.size(), 0.0);
  for (std::size_t e = 0; e < nt; ++e) {
    const auto& t = triangles_[e];
    const Vec2& p0 = nodes_[t[0]];
    const Vec2& p1 = nodes_[t[1]];
    const Vec2& p2 = nodes_[t[2]];
    const double twice = orient2d(p0, p1, p2);
    if (!(twice > 0.0))
      throw MeshError("triangle " + std::to_string(e) + " is not positively oriented");
    areas_[e] = 0.5 * twice;
    basis_grads_[e] = {(1.0 / twice) * perp(p2 - p1), (1.0 / twice) * perp(p0 - p2),
                       (1.0 / twice) * perp(p1 - p0)};
    for (int k = 0; k < 3; ++k) {
      node_tris_[t[k]].push_back(static_cast<int>(e));
      lumped_mass_[t[k]] += areas_[e] / 3.0;
    }
  }

  tri_nbrs_.assign(nt, {-1, -1, -1});
  std::map<std::pair<int, int>, std::pair<int, int>> open_edges;
  for (std::size_t e = 0; e < nt; ++e)
    for (int k = 0; k < 3; ++k) {
      const int a = triangles_[e][(k + 1) % 3];
      const int b = triangles_[e][(k + 2) % 3];
      if (open_edges.count({a, b})) throw MeshError("edge used twice with the same orientation");
      auto it = open_edges.find({b, a});
      if (it != open_edges.end()) {
        tri_nbrs_[e][k] = it->second.first;
        tri_nbrs_[it->second.first][it->second.second] = static_cast<int>(e);
        open_edges.erase(it);
      } else {
        open_edges[{a, b}] = {static_cast<int>(e), k};
      }
    }
  for (const auto& [edge, owner] : open_edges)
    if (!is_boundary(edge.first) || !is_boundary(edge.second))
      throw MeshError("non-conforming mesh: open edge between nodes " + std::to_string(edge.first) + " and " +
                      std::to_string(edge.second));

  node_nbrs_.assign(nodes_.size(), {});
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    auto& nb = node_nbrs_[n];
    for (int e : node_tris_[n])
      for (int v : triangles_[e])
        if (v != static_cast<int>(n)) nb.push_back(v);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  build_locator();
}

double TriMesh::min_angle_degrees() const {
  double best = 180.0;
  for (const auto& t : triangles_)
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = nodes_[t[(k + 1) % 3]] - nodes_[t[k]];
      const Vec2 v = nodes_[t[(k + 2) % 3]] - nodes_[t[k]];
      best = std::min(best, std::atan2(std::abs(cross(u, v)), dot(u, v)) * 180.0 / kPi);
    }
  return best;
}

double TriMesh::max_edge_length() const {
  double best = 0.0;
  for (const auto& t : triangles_)
    for (int k = 0; k < 3; ++k) best = std::max(best, norm(nodes_[t[k]] - nodes_[t[(k + 1) % 3]]));
  return best;
}

double TriMesh::min_edge_length() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : triangles_)
    for (int k = 0; k < 3; ++k) best = std::min(best, norm(nodes_[t[k]] - nodes_[t[(k + 1) % 3]]));
  return best;
}

void TriMesh::build_locator() {
  if (nodes_.empty()) return;
  Vec2 lo = nodes_.front();
  Vec2 hi = nodes_.front();
  for (const auto& p : nodes_) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  grid_cell_ = std::max(2.0 * h_, 1e-9);
  grid_min_ = lo;
  grid_nx_ = static_cast<int>((hi.x - lo.x) / grid_cell_) + 1;
  grid_ny_ = static_cast<int>((hi.y - lo.y) / grid_cell_) + 1;
  grid_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    const auto& t = triangles_[e];
    double x0 = nodes_[t[0]].x, x1 = x0, y0 = nodes_[t[0]].y, y1 = y0;
    for (int k = 1; k < 3; ++k) {
      x0 = std::min(x0, nodes_[t[k]].x);
      x1 = std::max(x1, nodes_[t[k]].x);
      y0 = std::min(y0, nodes_[t[k]].y);
      y1 = std::max(y1, nodes_[t[k]].y);
    }
    const int i0 = static_cast<int>((x0 - lo.x) / grid_cell_);
    const int i1 = std::min(grid_nx_ - 1, static_cast<int>((x1 - lo.x) / grid_cell_));
    const int j0 = static_cast<int>((y0 - lo.y) / grid_cell_);
    const int j1 = std::min(grid_ny_ - 1, static_cast<int>((y1 - lo.y) / grid_cell_));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) grid_[static_cast<std::size_t>(j) * grid_nx_ + i].push_back(static_cast<int>(e));
  }
}

int TriMesh::locate(const Vec2& p) const {
  auto contains = [&](int e) {
    const auto& t = triangles_[e];
    const double tol = -1e-12 * areas_[e];
    return orient2d(nodes_[t[0]], nodes_[t[1]], p) >= tol && orient2d(nodes_[t[1]], nodes_[t[2]], p) >= tol &&
           orient2d(nodes_[t[2]], nodes_[t[0]], p) >= tol;
  };
  const int i = static_cast<int>(std::floor((p.x - grid_min_.x) / grid_cell_));
  const int j = static_cast<int>(std::floor((p.y - grid_min_.y) / grid_cell_));
  if (i < 0 || j < 0 || i >= grid_nx_ || j >= grid_ny_) return -1;
  for (int e : grid_[static_cast<std::size_t>(j) * grid_nx_ + i])
    if (contains(e)) return e;
  return -1;
}

double TriMesh::interpolate(std::span<const double> values, const Vec2& p) const {
  const int e = locate(p);
  if (e < 0) return std::numeric_limits<double>::quiet_NaN();
  const auto& t = triangles_[e];
  const double a = areas_[e];
  const double l0 = 0.5 * orient2d(p, nodes_[t[1]], nodes_[t[2]]) / a;
  const double l1 = 0.5 * orient2d(nodes_[t[0]], p, nodes_[t[2]]) / a;
  const double l2 = 1.0 - l0 - l1;
  return l0 * values[t[0]] + l1 * values[t[1]] + l2 * values[t[2]];
}

void TriMesh::write_nodes_csv(std::ostream& os) const {
  os << "id,x,y,is_boundary,s\n" << std::setprecision(17);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    os << i << ',' << nodes_[i].x << ',' << nodes_[i].y << ',' << (is_boundary(static_cast<int>(i)) ? 1 : 0) << ',';
    if (is_boundary(static_cast<int>(i))) os << boundary_param_[i];
    os << '\n';
  }
}

void TriMesh::write_triangles_csv(std::ostream& os) const {
  os << "id,n0,n1,n2\n";
  for (std::size_t e = 0; e < triangles_.size(); ++e)
    os << e << ',' << triangles_[e][0] << ',' << triangles_[e][1] << ',' << triangles_[e][2] << '\n';
}

TriMesh triangulate(const ConvexDomain& domain, double h, const MeshOptions& options) {
  if (!(h > 0.0) || !(h < domain.diameter() / 4.0))
    throw MeshError("mesh size h must satisfy 0 < h < diameter/4 (h=" + std::to_string(h) +
                    ", diameter=" + std::to_string(domain.diameter()) + ")");
  const double estimate = domain.area() / (0.8660254037844386 * h * h) + domain.perimeter() / h;
  if (estimate > static_cast<double>(options.max_nodes))
    throw MeshError("mesh size h=" + std::to_string(h) + " needs about " + std::to_string(static_cast<long>(estimate)) +
                    " nodes, above the budget of " + std::to_string(options.max_nodes));

  std::vector<Vec2> points;
  std::vector<int> boundary;
  std::vector<double> params;
  const int nb = std::max(8, static_cast<int>(std::ceil(domain.perimeter() / h)));
  for (int k = 0; k < nb; ++k) {
    const double s = domain.param_at_arclength(domain.perimeter() * k / nb);
    points.push_back(domain.point(s));
    boundary.push_back(k);
    params.push_back(s);
  }

  // Equilateral lattice clipped away from the boundary.
  const double dy = 0.8660254037844386 * h;
  const double reach = 0.5 * domain.diameter() + h;
  const int jmax = static_cast<int>(reach / dy) + 1;
  const int imax = static_cast<int>(reach / h) + 1;
  const double clearance = 0.6 * h;
  for (int j = -jmax; j <= jmax; ++j)
    for (int i = -imax; i <= imax; ++i) {
      const Vec2 p{(i + ((j & 1) ? 0.5 : 0.0)) * h, j * dy};
      if (domain.signed_distance(p) <= -clearance) points.push_back(p);
    }

  std::vector<Triangle> tris = delaunay_convex(points, nb);

  // Laplacian smoothing of interior nodes, keeping every incident triangle valid.
  for (int sweep = 0; sweep < options.smoothing_sweeps; ++sweep) {
    std::vector<std::vector<int>> incident(points.size());
    for (int e = 0; e < static_cast<int>(tris.size()); ++e)
      for (int v : tris[e]) incident[v].push_back(e);
    for (int n = nb; n < static_cast<int>(points.size()); ++n) {
      Vec2 sum{};
      int count = 0;
      for (int e : incident[n])
        for (int v : tris[e])
          if (v != n) {
            sum += points[v];
            ++count;
          }
      if (count == 0) continue;
      const Vec2 old = points[n];
      points[n] = (1.0 / count) * sum;
      for (int e : incident[n]) {
        const auto& t = tris[e];
        if (orient2d(points[t[0]], points[t[1]], points[t[2]]) <= 0.05 * h * h) {
          points[n] = old;
          break;
        }
      }
    }
    make_delaunay(points, tris);
  }

  return TriMesh(std::move(points), std::move(tris), std::move(boundary), std::move(params), h);
}

}  // namespace cmc
