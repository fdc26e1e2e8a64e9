// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cmc/analysis.hpp"
#include "cmc/app/pipelines.hpp"
#include "cmc/estimates.hpp"
#include "cmc/jet.hpp"
#include "cmc/oracles.hpp"
#include "cmc/pfunction.hpp"
#include "cmc/solver.hpp"

using namespace cmc;

namespace {

struct Run {
  ConvexDomain domain;
  std::shared_ptr<const TriMesh> mesh;
  ContinuationResult family;
  const GraphSolution& final() const { return family.steps.back(); }
};

const Run& solve(const DomainSpec& spec, double h, double H = 1.0) {
  static std::map<std::tuple<std::vector<double>, int, double, double>, std::unique_ptr<Run>> cache;
  const auto key = std::make_tuple(spec.params, static_cast<int>(spec.kind), h, H);
  auto it = cache.find(key);
  if (it == cache.end()) {
    ConvexDomain domain = build_domain(spec);
    auto mesh = std::make_shared<const TriMesh>(triangulate(domain, h));
    ContinuationResult family = continuation(mesh, H, uniform_schedule(11));
    it = cache.emplace(key, std::make_unique<Run>(Run{std::move(domain), mesh, std::move(family)})).first;
  }
  return *it->second;
}

const DomainSpec kUnitDisc{DomainKind::disc, {1.0}};
const DomainSpec kEllipse{DomainKind::ellipse, {1.5, 1.0}};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double linf_to_cap(const GraphSolution& s, double R) {
  double worst = 0.0;
  for (int n = 0; n < static_cast<int>(s.values.size()); ++n)
    worst = std::max(worst, s.graph_scale() * std::abs(s.values[n] - oracle::radial_cap_value(R, s.H, s.t, s.mesh->node(n))));
  return worst;
}

double eps_grad(const Run& r) { return calibrate_for(r.domain, r.final().H, r.mesh->h()).eps_grad(); }

EstimateReport estimates(const Run& r) {
  return estimate_report(r.final(), r.domain, EstimateTolerances::from(calibrate_for(r.domain, r.final().H, r.mesh->h())));
}

struct Outcome {
  bool pass{false};
  std::string detail;
};

// Cartesian residual of the homotopy equation from exact jet derivatives.
double jet_residual(double R, double H, double t, double x, double y) {
  const Jet v = oracle::radial_cap_xy(R, H, t, Jet::variable_x(x), Jet::variable_y(y));
  const double vx = v.derivative(1, 0), vy = v.derivative(0, 1);
  const double vxx = v.derivative(2, 0), vxy = v.derivative(1, 1), vyy = v.derivative(0, 2);
  const double w = 1.0 - t * t * (vx * vx + vy * vy);
  const double lhs = w * (vxx + vyy) + t * t * (vx * vx * vxx + 2.0 * vx * vy * vxy + vy * vy * vyy);
  return lhs / std::pow(w, 1.5) - 2.0 * H;
}

Outcome oracle_validation() {
  double worst = 0.0;
  for (double R : {1.0, 2.0})
    for (double H : {0.5, 1.0, 2.0})
      for (double t : {0.25, 0.5, 1.0})
        for (int i = 0; i < 100; ++i) {
          const double r = R * i / 99.0;
          worst = std::max(worst, std::abs(oracle::radial_cap_residual(R, H, t, r)));
          worst = std::max(worst, std::abs(jet_residual(R, H, t, r * 0.6, r * 0.8)));
        }
  return {worst < 1e-10, "max residual " + num(worst)};
}

Outcome solver_convergence() {
  const double e1 = linf_to_cap(solve(kUnitDisc, 0.1).final(), 1.0);
  const double e2 = linf_to_cap(solve(kUnitDisc, 0.05).final(), 1.0);
  const double e3 = linf_to_cap(solve(kUnitDisc, 0.025).final(), 1.0);
  const double o12 = std::log2(e1 / e2), o23 = std::log2(e2 / e3);
  return {e2 <= 1e-2 && o12 >= 1.5 && o23 >= 1.5,
          "Linf " + num(e1) + ", " + num(e2) + ", " + num(e3) + "; orders " + num(o12) + ", " + num(o23)};
}

Outcome sharp_gradient() {
  const EstimateReport d1 = estimates(solve(kUnitDisc, 0.05));
  const EstimateReport d2 = estimates(solve({DomainKind::disc, {2.0}}, 0.05));
  const EstimateReport e1 = estimates(solve(kEllipse, 0.05));
  const EstimateReport e2 = estimates(solve(kEllipse, 0.025));
  const bool disc1 = std::abs(d1.q_max2 - 0.5) <= 2e-2 && std::abs(d1.gradient_bound - 0.5) <= 1e-12;
  const bool disc2 = std::abs(d2.q_max2 - 0.8) <= 2e-2 && std::abs(d2.gradient_bound - 0.8) <= 1e-12;
  const bool ell = std::abs(e1.gradient_bound - 0.835051) <= 1e-6 && e1.gradient_pass && e2.gradient_pass &&
                   e1.gradient_slack > 0.0 && e2.gradient_slack > 0.0 &&
                   std::abs(e1.gradient_slack - e2.gradient_slack) <= 0.5 * e1.gradient_slack;
  return {disc1 && disc2 && ell, "disc R=1 q_max^2 " + num(d1.q_max2) + ", disc R=2 " + num(d2.q_max2) +
                                     ", ellipse slack " + num(e1.gradient_slack) + " -> " + num(e2.gradient_slack)};
}

Outcome height_sandwich() {
  const EstimateReport d = estimates(solve(kUnitDisc, 0.05));
  const EstimateReport e = estimates(solve(kEllipse, 0.05));
  const double cap_min = 1.0 - std::sqrt(2.0);
  const bool disc = std::abs(d.u_min - cap_min) <= 2e-3 && std::abs(d.height_lower - cap_min) <= 1e-12 &&
                    std::abs(d.height_upper - cap_min) <= 1e-12;
  const bool ell = std::abs(e.height_lower - (1.0 - std::sqrt(97.0) / 4.0)) <= 1e-12 &&
                   std::abs(e.height_upper - (1.0 - std::sqrt(13.0) / 3.0)) <= 1e-12 &&
                   e.lower_slack > 0.0 && e.upper_slack > 0.0;
  return {disc && ell, "disc u_min " + num(d.u_min) + ", ellipse u_min " + num(e.u_min) + " in [" +
                           num(e.height_lower) + ", " + num(e.height_upper) + "]"};
}

Outcome uniqueness() {
  bool ok = true;
  int steps = 0;
  for (const DomainSpec& spec : {kUnitDisc, kEllipse}) {
    const Run& r = solve(spec, 0.05);
    const double eps = eps_grad(r);
    for (const GraphSolution& s : r.family.steps) {
      const CriticalPointReport c = critical_points(s, eps);
      ok = ok && c.unique() && c.points.front().kind == CriticalKind::minimum && c.points.front().K < 0.0;
      ++steps;
    }
    const LevelTopologyReport levels = level_topology(r.final(), 50);
    ok = ok && levels.counts.size() == 50 && levels.max_count() == 1;
  }
  return {ok, std::to_string(steps) + " steps checked, 50 levels per domain"};
}

Outcome saddle_surrogate() {
  auto mesh = std::make_shared<const TriMesh>(triangulate(build_domain({DomainKind::ellipse, {2.0, 1.0}}), 0.05));
  std::vector<double> wells(mesh->num_nodes());
  for (std::size_t n = 0; n < wells.size(); ++n) {
    const Vec2 p = mesh->node(static_cast<int>(n));
    wells[n] = std::min((p.x - 0.8) * (p.x - 0.8) + p.y * p.y, (p.x + 0.8) * (p.x + 0.8) + p.y * p.y) - 0.5;
  }
  const CriticalPointReport w = critical_points(*mesh, wells, CriticalPointOptions{});
  const int deep = sublevel_components(*mesh, wells, -0.2);
  const bool fixture = w.count_of(CriticalKind::saddle) >= 1 && deep >= 2;
  bool cmc_clean = true;
  for (const DomainSpec& spec : {kUnitDisc, kEllipse}) {
    const Run& r = solve(spec, 0.05);
    cmc_clean = cmc_clean && critical_points(r.final(), eps_grad(r)).count_of(CriticalKind::saddle) == 0 &&
                level_topology(r.final(), 50).max_count() == 1;
  }
  return {fixture && cmc_clean, "fixture saddles " + std::to_string(w.count_of(CriticalKind::saddle)) +
                                    ", deep components " + std::to_string(deep)};
}

Outcome phi_principles() {
  const Run& ell = solve(kEllipse, 0.05);
  const double ell_tol = calibrate_for(ell.domain, 1.0, 0.05).phi_tol();
  const PhiField phi = phi_field(ell.final(), 1.0);
  const PhiMaxReport max = phi_max_location(phi, ell_tol);
  const CriticalPointReport cp = critical_points(ell.final(), eps_grad(ell));
  const PhiMinReport min = phi_min_location(phi, cp.unique() ? std::optional<Vec2>(cp.points.front().location)
                                                             : std::nullopt, ell_tol);
  const double range_coarse = phi_field(solve(kUnitDisc, 0.1).final(), 1.0).range();
  const double range = phi_field(solve(kUnitDisc, 0.05).final(), 1.0).range();
  double worst_dn = 0.0;
  for (const BoundaryDerivativeSample& s : phi_boundary_normal_derivative(solve(kUnitDisc, 0.05).final(),
                                                                         solve(kUnitDisc, 0.05).domain, 1.0))
    worst_dn = std::max(worst_dn, std::abs(s.value));
  return {max.pass && min.pass && range <= 2e-2 && range < range_coarse && worst_dn <= 5e-2,
          "ellipse excess " + num(max.excess) + ", min " + std::string(to_string(min.classification)) +
              "; disc range " + num(range_coarse) + " -> " + num(range) + ", max |dPhi/dn| " + num(worst_dn)};
}

Outcome taylor() {
  bool analytic = true;
  for (double H : {1.0, 2.0})
    analytic = analytic && taylor_identities([H](const Jet& x, const Jet& y) { return oracle::radial_cap_xy(1.0, H, 1.0, x, y); },
                                             {0.0, 0.0}, H, 1e-6)
                               .all_pass();
  const Run& d = solve(kUnitDisc, 0.05);
  const CriticalPointReport cp = critical_points(d.final(), eps_grad(d));
  const bool discrete = cp.unique() && taylor_identities(d.final(), cp.points.front(), 5e-2).all_pass();
  return {analytic && discrete, std::string("analytic ") + (analytic ? "ok" : "fail") + ", discrete " +
                                    (discrete ? "ok" : "fail")};
}

Outcome continuation_surrogate() {
  const Run& d = solve(kUnitDisc, 0.05);
  double max_slope = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < d.family.steps.size(); ++i) {
    max_slope = std::max(max_slope, 1.0 - d.family.steps[i].theta);
    if (i > 0) monotone = monotone && d.family.steps[i].theta <= d.family.steps[i - 1].theta;
  }
  const double t1 = solve(kEllipse, 0.05).family.theta0, t2 = solve(kEllipse, 0.025).family.theta0;
  return {std::abs(max_slope - 1.0 / std::sqrt(2.0)) <= 1e-2 && monotone && t1 > 0.0 && t2 > 0.0 &&
              std::abs(t1 - t2) <= 1e-2,
          "disc max t|Dv| " + num(max_slope) + ", ellipse theta0 " + num(t1) + " -> " + num(t2)};
}

Outcome sectors() {
  bool counts = true;
  for (int n = 1; n <= 6; ++n)
    counts = counts && nodal_sectors([n](const Vec2& p) { return oracle::harmonic_leading(n, 1.0, p); }, {0.0, 0.0}, 0.1)
                               .sectors == 2 * n;
  const std::vector<double> radii{0.05, 0.1};
  double worst = 0.0;
  bool found = true;
  const std::vector<std::pair<int, std::complex<double>>> cases{{3, {2.0, 1.0}}, {4, {1.0, 0.0}}, {5, {0.5, -0.3}}, {6, {-1.0, 2.0}}};
  for (const auto& [n, lambda] : cases) {
    const Vec2 c{0.2, 0.1};
    const HarmonicFit fit = fit_leading_harmonic(
        [&](const Vec2& p) {
          return oracle::harmonic_leading(n, lambda, p - c) + 0.01 * oracle::harmonic_leading(n + 2, 1.0, p - c);
        },
        c, radii);
    found = found && fit.found && fit.n == n;
    if (fit.found) worst = std::max(worst, std::abs(fit.lambda - lambda) / std::abs(lambda));
  }
  return {counts && found && worst <= 0.02, "max relative lambda error " + num(worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "cmc_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::ostringstream log;
  for (const char* run : {"a", "b"}) {
    app::Settings s = app::Settings::parse("domain = ellipse\n");
    s.set("out", (root / run).string());
    app::run_verify(app::make_run_config(s), log);
  }
  int files = 0;
  bool same = true;
  for (const auto& entry : std::filesystem::directory_iterator(root / "a")) {
    const auto name = entry.path().filename();
    if (name == "metadata.json") continue;
    same = same && slurp(entry.path()) == slurp(root / "b" / name);
    ++files;
  }
  std::filesystem::remove_all(root);
  return {same && files > 0, std::to_string(files) + " reports compared"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle_validation", oracle_validation}, {"solver_convergence", solver_convergence},
      {"sharp_gradient_bound", sharp_gradient}, {"sharp_height_sandwich", height_sandwich},
      {"uniqueness", uniqueness},               {"saddle_surrogate", saddle_surrogate},
      {"phi_principles", phi_principles},       {"taylor_identities", taylor},
      {"continuation_surrogate", continuation_surrogate}, {"nodal_sectors", sectors},
      {"determinism", determinism}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
