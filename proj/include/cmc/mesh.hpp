#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "cmc/domain.hpp"
#include "cmc/geometry.hpp"

namespace cmc {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Triangle = std::array<int, 3>;

/// Conforming triangulation with counter-clockwise triangles. Boundary nodes
/// carry the curve parameter s of the analytic boundary they sit on.
/// Adjacency is built by the constructor; the mesh is immutable afterwards.
class TriMesh {
 public:
  TriMesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles,
          std::vector<int> boundary_nodes, std::vector<double> boundary_params, double h);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  double h() const { return h_; }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const Vec2& node(int i) const { return nodes_[i]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Triangle& triangle(int e) const { return triangles_[e]; }

  /// Boundary nodes in counter-clockwise order along the curve.
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  bool is_boundary(int node) const { return boundary_param_[node] >= 0.0; }
  /// Boundary curve parameter of a node; negative for interior nodes.
  double boundary_param(int node) const { return boundary_param_[node]; }

  double area(int e) const { return areas_[e]; }
  /// Gradients of the three P1 basis functions on triangle e.
  const std::array<Vec2, 3>& basis_gradients(int e) const { return basis_grads_[e]; }
  /// Triangles incident to a node, in increasing index order.
  const std::vector<int>& node_triangles(int node) const { return node_tris_[node]; }
  /// Edge-adjacent nodes, in increasing index order.
  const std::vector<int>& node_neighbors(int node) const { return node_nbrs_[node]; }
  /// Neighbor across the edge opposite local vertex k; -1 on the boundary.
  int triangle_neighbor(int e, int k) const { return tri_nbrs_[e][k]; }
  /// Sum of one third of incident triangle areas.
  double lumped_mass(int node) const { return lumped_mass_[node]; }

  /// Minimum interior angle over all triangles, in degrees.
  double min_angle_degrees() const;
  double max_edge_length() const;
  double min_edge_length() const;

  /// Triangle containing p, or -1 (uniform bucket grid; brute force fallback).
  int locate(const Vec2& p) const;
  /// P1 interpolation of nodal values at p; NaN outside the mesh.
  double interpolate(std::span<const double> values, const Vec2& p) const;

  void write_nodes_csv(std::ostream& os) const;
  void write_triangles_csv(std::ostream& os) const;

 private:
  void build_locator();

  std::vector<Vec2> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<int> boundary_nodes_;
  std::vector<double> boundary_param_;
  double h_;

  std::vector<double> areas_;
  std::vector<std::array<Vec2, 3>> basis_grads_;
  std::vector<std::vector<int>> node_tris_;
  std::vector<std::vector<int>> node_nbrs_;
  std::vector<std::array<int, 3>> tri_nbrs_;
  std::vector<double> lumped_mass_;

  Vec2 grid_min_;
  double grid_cell_{1.0};
  int grid_nx_{0};
  int grid_ny_{0};
  std::vector<std::vector<int>> grid_;
};

struct MeshOptions {
  /// Upper bound on the node count accepted before meshing starts.
  std::size_t max_nodes{2'000'000};
  int smoothing_sweeps{6};
};

/// Deterministic Delaunay triangulation of a strictly convex domain with
/// boundary nodes placed on the analytic curve at (nearly) uniform arclength.
/// Requires 0 < h < diameter / 4.
TriMesh triangulate(const ConvexDomain& domain, double h, const MeshOptions& options = {});

/// Delaunay triangulation of points whose first `hull_count` entries are the
/// counter-clockwise vertices of their convex hull. Exposed for testing.
std::vector<Triangle> delaunay_convex(std::span<const Vec2> points, int hull_count);

/// Lawson edge flips until every interior edge is locally Delaunay.
/// Returns the number of flips performed.
int make_delaunay(std::span<const Vec2> points, std::vector<Triangle>& triangles);

}  // namespace cmc
