#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cmc/mesh.hpp"

using namespace cmc;

namespace {

double orientation(const TriMesh& m, int e) {
  const Triangle& t = m.triangle(e);
  const Vec2 a = m.node(t[0]), b = m.node(t[1]), c = m.node(t[2]);
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

}  // namespace

TEST_CASE("disc boundary nodes lie on the circle") {
  const TriMesh m = triangulate(build_domain({DomainKind::disc, {1.0}}), 0.2);
  REQUIRE(!m.boundary_nodes().empty());
  for (int n : m.boundary_nodes()) {
    const Vec2 p = m.node(n);
    CHECK(std::abs(std::hypot(p.x, p.y) - 1.0) <= 1e-12);
    CHECK(m.is_boundary(n));
  }
}

TEST_CASE("refinement roughly quadruples the node count") {
  const ConvexDomain d = build_domain({DomainKind::disc, {1.0}});
  const double ratio = static_cast<double>(triangulate(d, 0.05).num_nodes()) / triangulate(d, 0.1).num_nodes();
  CHECK(ratio > 4.0 * 0.7);
  CHECK(ratio < 4.0 * 1.3);
}

TEST_CASE("quality, orientation and conformity") {
  for (const DomainSpec& spec : {DomainSpec{DomainKind::disc, {1.0}}, DomainSpec{DomainKind::ellipse, {1.5, 1.0}},
                                 DomainSpec{DomainKind::support_function, {1.0, 0.05, 3.0}}}) {
    for (double h : {0.1, 0.05}) {
      const ConvexDomain d = build_domain(spec);
      const TriMesh m = triangulate(d, h);
      CHECK(m.min_angle_degrees() >= 20.0);
      CHECK(m.max_edge_length() <= 1.5 * h);

      double area = 0.0;
      int negative = 0;
      for (int e = 0; e < static_cast<int>(m.num_triangles()); ++e) {
        if (!(orientation(m, e) > 0.0)) ++negative;
        area += m.area(e);
      }
      CHECK(negative == 0);
      // Inscribed polygon: area deficit is O(h^2) times the perimeter.
      CHECK(area <= d.area());
      CHECK(area >= d.area() - d.perimeter() * h * h);

      // Every interior edge is shared by exactly two triangles, each boundary
      // edge by one, and boundary edges join consecutive boundary nodes.
      std::map<std::pair<int, int>, int> edge_count;
      for (const Triangle& t : m.triangles())
        for (int k = 0; k < 3; ++k) {
          const int a = t[k], b = t[(k + 1) % 3];
          ++edge_count[{std::min(a, b), std::max(a, b)}];
        }
      int boundary_edges = 0, bad = 0;
      for (const auto& [edge, count] : edge_count) {
        if (count == 1) {
          ++boundary_edges;
          if (!(m.is_boundary(edge.first) && m.is_boundary(edge.second))) ++bad;
        } else if (count != 2) {
          ++bad;
        }
      }
      CHECK(bad == 0);
      CHECK(boundary_edges == static_cast<int>(m.boundary_nodes().size()));

      // Boundary nodes sit on the analytic curve at their recorded parameter.
      double worst = 0.0;
      for (int n : m.boundary_nodes()) {
        const Vec2 p = m.node(n), q = d.point(m.boundary_param(n));
        worst = std::max(worst, std::hypot(p.x - q.x, p.y - q.y));
      }
      CHECK(worst <= 1e-12);

      double mass = 0.0;
      for (int n = 0; n < static_cast<int>(m.num_nodes()); ++n) mass += m.lumped_mass(n);
      CHECK(mass == doctest::Approx(area).epsilon(1e-12));
    }
  }
}

TEST_CASE("triangulation is deterministic") {
  const ConvexDomain d = build_domain({DomainKind::ellipse, {1.5, 1.0}});
  const TriMesh a = triangulate(d, 0.07);
  const TriMesh b = triangulate(d, 0.07);
  std::ostringstream na, nb, ta, tb;
  a.write_nodes_csv(na);
  b.write_nodes_csv(nb);
  a.write_triangles_csv(ta);
  b.write_triangles_csv(tb);
  CHECK(na.str() == nb.str());
  CHECK(ta.str() == tb.str());
  CHECK(na.str().rfind("id,x,y,is_boundary,s\n", 0) == 0);
  CHECK(ta.str().rfind("id,n0,n1,n2\n", 0) == 0);
}

TEST_CASE("adjacency and point location") {
  const TriMesh m = triangulate(build_domain({DomainKind::disc, {1.0}}), 0.1);
  for (int e = 0; e < static_cast<int>(m.num_triangles()); ++e)
    for (int k = 0; k < 3; ++k) {
      const int f = m.triangle_neighbor(e, k);
      if (f < 0) continue;
      // The neighbor shares the edge opposite local vertex k.
      const Triangle& t = m.triangle(e);
      const std::set<int> shared{t[(k + 1) % 3], t[(k + 2) % 3]};
      int common = 0;
      for (int v : m.triangle(f)) common += static_cast<int>(shared.count(v));
      CHECK(common == 2);
    }

  // P1 interpolation reproduces affine functions.
  std::vector<double> affine(m.num_nodes());
  for (int n = 0; n < static_cast<int>(m.num_nodes()); ++n) affine[n] = 2.0 * m.node(n).x - 3.0 * m.node(n).y + 0.5;
  for (const Vec2 p : {Vec2{0.1, 0.2}, Vec2{-0.5, 0.3}, Vec2{0.0, -0.9}}) {
    CHECK(m.locate(p) >= 0);
    CHECK(m.interpolate(affine, p) == doctest::Approx(2.0 * p.x - 3.0 * p.y + 0.5).epsilon(1e-12));
  }
  CHECK(m.locate({1.5, 0.0}) == -1);
  CHECK(std::isnan(m.interpolate(affine, {1.5, 0.0})));
}

TEST_CASE("delaunay on a convex point set") {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.4, 0.5}};
  const std::vector<Triangle> tris = delaunay_convex(pts, 4);
  CHECK(tris.size() == 4);
  std::vector<Triangle> copy = tris;
  CHECK(make_delaunay(pts, copy) == 0);
}

TEST_CASE("invalid mesh sizes are rejected") {
  const ConvexDomain d = build_domain({DomainKind::disc, {1.0}});
  CHECK_THROWS_AS(triangulate(d, 0.0), MeshError);
  CHECK_THROWS_AS(triangulate(d, 0.6), MeshError);
  MeshOptions tiny;
  tiny.max_nodes = 100;
  CHECK_THROWS_AS(triangulate(d, 0.01, tiny), MeshError);
}
