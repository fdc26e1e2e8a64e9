#include <doctest.h>

#include <cmath>

#include "cmc/fields.hpp"
#include "cmc/oracles.hpp"
#include "support.hpp"

using namespace cmc;
using cmc::testing::sample;

namespace {

int nearest_node(const TriMesh& m, const Vec2& p) {
  int best = 0;
  double bd = 1e300;
  for (int n = 0; n < static_cast<int>(m.num_nodes()); ++n) {
    const double d = std::hypot(m.node(n).x - p.x, m.node(n).y - p.y);
    if (d < bd) bd = d, best = n;
  }
  return best;
}

GraphSolution as_solution(std::shared_ptr<const TriMesh> mesh, std::vector<double> values, double t = 1.0,
                          double H = 1.0) {
  GraphSolution s;
  s.mesh = std::move(mesh);
  s.values = std::move(values);
  s.t = t;
  s.H = H;
  return s;
}

}  // namespace

TEST_CASE("recovered gradient on the disc solution") {
  const GraphSolution& s = testing::disc().final();
  const TriMesh& m = *s.mesh;
  const GradientField g = gradient(s);
  const Vec2 center = s.t * g.node[nearest_node(m, {0.0, 0.0})];
  CHECK(std::hypot(center.x, center.y) <= 1e-2);
  double worst = 0.0;
  for (int n : m.boundary_nodes()) {
    const Vec2 du = s.t * g.node[n];
    worst = std::max(worst, std::abs(std::hypot(du.x, du.y) - 1.0 / std::sqrt(2.0)));
  }
  CHECK(worst <= 2e-2);
}

TEST_CASE("constant field has zero gradient") {
  auto mesh = testing::mesh_of({DomainKind::ellipse, {1.5, 1.0}}, 0.1);
  const std::vector<double> c(mesh->num_nodes(), 0.75);
  const GradientField g = recover_gradient(*mesh, c);
  double worst = 0.0;
  for (const Vec2& v : g.element) worst = std::max(worst, std::hypot(v.x, v.y));
  for (const Vec2& v : g.node) worst = std::max(worst, std::hypot(v.x, v.y));
  CHECK(worst <= 1e-13);
}

TEST_CASE("gradient recovery converges at first order or better") {
  std::vector<double> err;
  for (double h : {0.1, 0.05}) {
    const GraphSolution& s = testing::disc(h).final();
    const GradientField g = gradient(s);
    double worst = 0.0;
    for (int n = 0; n < static_cast<int>(s.values.size()); ++n) {
      const Vec2 exact = oracle::radial_cap_gradient(1.0, 1.0, 1.0, s.mesh->node(n));
      worst = std::max(worst, std::hypot(g.node[n].x - exact.x, g.node[n].y - exact.y));
    }
    err.push_back(worst);
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.0);
}

TEST_CASE("Hessian recovery reproduces quadratics") {
  auto mesh = testing::mesh_of({DomainKind::ellipse, {1.5, 1.0}}, 0.1);
  const auto quad = [](const Vec2& p) { return 0.3 + 0.5 * p.x - 0.2 * p.y + 1.2 * p.x * p.x - 0.7 * p.x * p.y + 0.4 * p.y * p.y; };
  const std::vector<QuadraticFit> fits = recover_hessian(*mesh, sample(*mesh, quad));
  const std::vector<QuadraticFit> saddle =
      recover_hessian(*mesh, sample(*mesh, [](const Vec2& p) { return p.x * p.x - p.y * p.y; }));
  int checked = 0;
  for (int n = 0; n < static_cast<int>(mesh->num_nodes()); ++n) {
    if (mesh->is_boundary(n)) continue;
    ++checked;
    CHECK(std::abs(fits[n].hessian.xx - 2.4) <= 1e-8 * 2.4);
    CHECK(std::abs(fits[n].hessian.xy + 0.7) <= 1e-8 * 2.4);
    CHECK(std::abs(fits[n].hessian.yy - 0.8) <= 1e-8 * 2.4);
    const Vec2 p = mesh->node(n);
    CHECK(std::abs(fits[n].gradient.x - (0.5 + 2.4 * p.x - 0.7 * p.y)) <= 1e-8);
    CHECK(std::abs(fits[n].value - quad(p)) <= 1e-10);
    CHECK(std::abs(saddle[n].hessian.xx - 2.0) <= 1e-8 * 2.0);
    CHECK(std::abs(saddle[n].hessian.yy + 2.0) <= 1e-8 * 2.0);
    CHECK(std::abs(saddle[n].hessian.xy) <= 1e-8 * 2.0);
  }
  CHECK(checked > 100);
}

TEST_CASE("Hessian of the disc solution at the center") {
  const GraphSolution& s = testing::disc().final();
  const HessianField hf = hessian_recovery(s);
  const SymMat2 d2 = hf.at(nearest_node(*s.mesh, {0.0, 0.0}));
  CHECK(std::abs(s.t * d2.xx - 1.0) <= 5e-2);
  CHECK(std::abs(s.t * d2.yy - 1.0) <= 5e-2);
  CHECK(std::abs(s.t * d2.xy) <= 5e-2);
}

TEST_CASE("Poisson member has unit Hessian") {
  const GraphSolution& s = testing::disc().run.steps.front();
  REQUIRE(s.t == 0.0);
  const HessianField hf = hessian_recovery(s);
  double worst = 0.0;
  for (int n = 0; n < static_cast<int>(s.values.size()); ++n) {
    if (hf.flagged(n)) continue;
    const SymMat2& d2 = hf.at(n);
    worst = std::max({worst, std::abs(d2.xx - 1.0), std::abs(d2.yy - 1.0), std::abs(d2.xy)});
  }
  CHECK(worst <= 0.1);
}

TEST_CASE("Gaussian curvature") {
  const GraphSolution& s = testing::disc().final();
  const ScalarField K = gaussian_curvature(s);
  CHECK(K.values[nearest_node(*s.mesh, {0.0, 0.0})] == doctest::Approx(-1.0).epsilon(0.1));
  int nonnegative = 0;
  for (int n = 0; n < static_cast<int>(K.values.size()); ++n)
    if (!s.mesh->is_boundary(n) && !K.is_flagged(n)) nonnegative += !(K.values[n] < 0.0);
  CHECK(nonnegative == 0);

  // Formal curvature of the Poisson paraboloid: -det = -H^2 at the vertex, negative inside.
  const GraphSolution& p = testing::disc().run.steps.front();
  const ScalarField Kp = gaussian_curvature(p);
  CHECK(Kp.values[nearest_node(*p.mesh, {0.0, 0.0})] == doctest::Approx(-1.0).epsilon(0.05));
  nonnegative = 0;
  for (int n = 0; n < static_cast<int>(Kp.values.size()); ++n)
    if (!p.mesh->is_boundary(n) && !Kp.is_flagged(n)) nonnegative += !(Kp.values[n] < 0.0);
  CHECK(nonnegative == 0);
}

TEST_CASE("hyperbolic cylinder curvatures from analytic derivatives") {
  // u = sqrt(r^2 + d^2), d = cross(axis, p): Du = u_d n, D^2u = u_dd n n^T with n = grad d.
  const double r = 0.5;
  const Vec2 axis{0.6, 0.8};
  const Vec2 nrm{-axis.y, axis.x};
  for (const Vec2 p : {Vec2{0.1, 0.2}, Vec2{-0.4, 0.3}, Vec2{0.9, -0.1}}) {
    const double d = axis.x * p.y - axis.y * p.x;
    const double w = std::sqrt(r * r + d * d);
    const double ud = d / w, udd = r * r / (w * w * w);
    const Vec2 du{ud * nrm.x, ud * nrm.y};
    const SymMat2 d2u{udd * nrm.x * nrm.x, udd * nrm.x * nrm.y, udd * nrm.y * nrm.y};
    CHECK(std::abs(gaussian_curvature_pointwise(du, d2u)) <= 1e-12);
    CHECK(mean_curvature_pointwise(du, d2u) == doctest::Approx(1.0 / (2.0 * r)).epsilon(1e-12));
  }
  // Cap at its center: Du = 0, D^2u = H I gives K = -H^2 and mean curvature H.
  CHECK(gaussian_curvature_pointwise({0.0, 0.0}, {2.0, 0.0, 2.0}) == doctest::Approx(-4.0));
  CHECK(mean_curvature_pointwise({0.0, 0.0}, {2.0, 0.0, 2.0}) == doctest::Approx(2.0));
}

TEST_CASE("hyperbolic cylinder sampled on a mesh is flat") {
  auto mesh = testing::mesh_of({DomainKind::disc, {1.0}}, 0.05);
  const oracle::HyperbolicCylinder cyl{0.5, {0.0, 1.0}, 0.0};
  const GraphSolution s =
      as_solution(mesh, sample(*mesh, [&](const Vec2& p) { return oracle::hyperbolic_cylinder(cyl, p); }));
  const ScalarField K = gaussian_curvature(s);
  const GradientField g = gradient(s);
  const HessianField hf = hessian_recovery(s);
  double worst_k = 0.0, worst_h = 0.0;
  for (int n = 0; n < static_cast<int>(K.values.size()); ++n) {
    if (K.is_flagged(n) || std::hypot(mesh->node(n).x, mesh->node(n).y) > 0.8) continue;
    worst_k = std::max(worst_k, std::abs(K.values[n]));
    worst_h = std::max(worst_h, std::abs(mean_curvature_pointwise(g.node[n], hf.at(n)) - 1.0));
  }
  // Discrete recovery: flatness holds to the fit error.
  CHECK(worst_k <= 5e-2);
  CHECK(worst_h <= 5e-2);
}

TEST_CASE("mean curvature residual") {
  const GraphSolution& s = testing::disc().final();
  const ScalarField r = mean_curvature_residual(s);
  double min_mass = 1e300, worst = 0.0;
  for (int n = 0; n < static_cast<int>(r.values.size()); ++n) {
    min_mass = std::min(min_mass, s.mesh->lumped_mass(n));
    worst = std::max(worst, std::abs(r.values[n]));
  }
  CHECK(worst <= 10 * 1e-10 / min_mass);

  for (double t : {0.0, 0.5, 1.0}) {
    const GraphSolution zero = as_solution(s.mesh, zero_field(*s.mesh), t, 1.0);
    const ScalarField z = mean_curvature_residual(zero);
    const double expected = 2.0 * zero.graph_scale() * 1.0;
    int off = 0;
    for (int n = 0; n < static_cast<int>(z.values.size()); ++n)
      if (!s.mesh->is_boundary(n)) off += std::abs(z.values[n] - expected) > 1e-12;
    CHECK(off == 0);
  }
}

TEST_CASE("normal and fundamental forms") {
  const NormalAndForms crit = normal_and_forms(Vec2{0.0, 0.0});
  CHECK(crit.normal == std::array<double, 3>{0.0, 0.0, 1.0});
  CHECK(crit.E == 1.0);
  CHECK(crit.F == 0.0);
  CHECK(crit.G == 1.0);
  const NormalAndForms steep = normal_and_forms(Vec2{1.0 / std::sqrt(2.0), 0.0});
  CHECK(steep.E == doctest::Approx(0.5));
  CHECK(steep.F == doctest::Approx(0.0));
  CHECK(steep.G == doctest::Approx(1.0));
  CHECK(steep.det() == doctest::Approx(0.5));

  const GraphSolution& s = testing::ellipse().final();
  const std::vector<NormalAndForms> forms = normal_and_forms(s);
  const GradientField g = gradient(s);
  int bad = 0;
  for (std::size_t n = 0; n < forms.size(); ++n) {
    const Vec2 du = s.t * g.node[n];
    bad += std::abs(forms[n].lorentz_norm2() + 1.0) > 1e-12;
    bad += !(forms[n].normal[2] > 0.0);
    bad += std::abs(forms[n].det() - (1.0 - du.x * du.x - du.y * du.y)) > 1e-15;
  }
  CHECK(bad == 0);
}

TEST_CASE("serial and parallel field kernels agree bitwise") {
  const GraphSolution& s = testing::ellipse().final();
  const TriMesh& m = *s.mesh;
  const std::vector<QuadraticFit> a = kernels::quadratic_fits_serial(m, s.values);
  const std::vector<QuadraticFit> b = kernels::quadratic_fits_parallel(m, s.values);
  bool same = a.size() == b.size();
  for (std::size_t n = 0; same && n < a.size(); ++n)
    same = a[n].value == b[n].value && a[n].gradient.x == b[n].gradient.x && a[n].gradient.y == b[n].gradient.y &&
           a[n].hessian.xx == b[n].hessian.xx && a[n].hessian.xy == b[n].hessian.xy &&
           a[n].hessian.yy == b[n].hessian.yy && a[n].flagged == b[n].flagged;
  CHECK(same);

  const GradientField ga = gradient(s, Exec::serial), gb = gradient(s, Exec::parallel);
  same = ga.node.size() == gb.node.size();
  for (std::size_t n = 0; same && n < ga.node.size(); ++n) same = ga.node[n].x == gb.node[n].x && ga.node[n].y == gb.node[n].y;
  CHECK(same);
  CHECK(gaussian_curvature(s, Exec::serial).values == gaussian_curvature(s, Exec::parallel).values);
  CHECK(mean_curvature_residual(s, Exec::serial).values == mean_curvature_residual(s, Exec::parallel).values);
}
