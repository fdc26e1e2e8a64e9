#include "cmc/app/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmc/oracles.hpp"

namespace cmc::app {

std::string fmt_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_oracle_csv(const std::string& path, double R, double H, double t, int samples) {
  std::ostringstream os;
  os << "r,value,slope,residual\n";
  for (int i = 0; i < samples; ++i) {
    const double r = R * i / (samples - 1);
    const oracle::RadialSample s = oracle::radial_cap(R, H, t, r);
    os << fmt_number(r) << ',' << fmt_number(s.value) << ',' << fmt_number(s.slope) << ','
       << fmt_number(oracle::radial_cap_residual(R, H, t, r)) << '\n';
  }
  write_text(path, os.str());
}

void write_mesh_csv(const std::string& nodes_path, const std::string& triangles_path, const TriMesh& mesh) {
  std::ostringstream a, b;
  mesh.write_nodes_csv(a);
  mesh.write_triangles_csv(b);
  write_text(nodes_path, a.str());
  write_text(triangles_path, b.str());
}

void write_solution_csv(const std::string& path, const GraphSolution& solution) {
  const TriMesh& mesh = *solution.mesh;
  const GradientField g = gradient(solution);
  std::ostringstream os;
  os << "node_id,x,y,v,u,grad_x,grad_y\n";
  for (int n = 0; n < static_cast<int>(mesh.num_nodes()); ++n) {
    const Vec2 p = mesh.node(n);
    const Vec2 du = solution.t * g.node[n];
    os << n << ',' << fmt_number(p.x) << ',' << fmt_number(p.y) << ',' << fmt_number(solution.values[n]) << ','
       << fmt_number(solution.u(n)) << ',' << fmt_number(du.x) << ',' << fmt_number(du.y) << '\n';
  }
  write_text(path, os.str());
}

void write_field_csv(const std::string& path, const ScalarField& field) {
  const TriMesh& mesh = *field.mesh;
  std::ostringstream os;
  os << "node_id,x,y,value\n";
  for (int n = 0; n < static_cast<int>(field.values.size()); ++n) {
    const Vec2 p = mesh.node(n);
    os << n << ',' << fmt_number(p.x) << ',' << fmt_number(p.y) << ',' << fmt_number(field.values[n]) << '\n';
  }
  write_text(path, os.str());
}

void write_wide_csv(const std::string& path, const TriMesh& mesh, const std::vector<const ScalarField*>& fields) {
  std::ostringstream os;
  os << "node_id,x,y";
  for (const ScalarField* f : fields) os << ',' << f->name;
  os << '\n';
  for (int n = 0; n < static_cast<int>(mesh.num_nodes()); ++n) {
    const Vec2 p = mesh.node(n);
    os << n << ',' << fmt_number(p.x) << ',' << fmt_number(p.y);
    for (const ScalarField* f : fields) os << ',' << fmt_number(f->values[n]);
    os << '\n';
  }
  write_text(path, os.str());
}

void write_levels_csv(const std::string& path, const LevelTopologyReport& report) {
  std::ostringstream os;
  os << "m,component_count\n";
  for (std::size_t k = 0; k < report.levels.size(); ++k)
    os << fmt_number(report.levels[k]) << ',' << report.counts[k] << '\n';
  write_text(path, os.str());
}

Json diagnostics_json(const ContinuationResult& run) {
  Json steps = Json::array();
  for (const GraphSolution& s : run.steps)
    steps.push_back({{"t", s.t}, {"iters", s.iters}, {"residual_norm", s.residual_norm}, {"theta", s.theta}});
  return {{"steps", steps}, {"theta0", run.theta0}};
}

namespace {

Json point_json(const Vec2& p) { return Json::array({p.x, p.y}); }

}  // namespace

Json extremum_json(const PhiField& phi, const PhiMinReport& min) {
  const PhiExtremum& mx = phi.max_info;
  return {{"alpha", phi.alpha},
          {"max", {{"x", mx.location.x}, {"y", mx.location.y}, {"value", mx.value}, {"on_boundary", mx.on_boundary}}},
          {"min",
           {{"x", min.argmin.location.x},
            {"y", min.argmin.location.y},
            {"value", min.argmin.value},
            {"on_boundary", min.argmin.on_boundary},
            {"classification", std::string(to_string(min.classification))}}},
          {"range", phi.range()}};
}

Json critical_points_json(const CriticalPointReport& report) {
  Json pts = Json::array();
  for (const CriticalPoint& p : report.points)
    pts.push_back({{"location", point_json(p.location)},
                   {"value", p.value},
                   {"eigenvalues", Json::array({p.eig_min, p.eig_max})},
                   {"K", p.K},
                   {"classification", std::string(to_string(p.kind))}});
  return {{"count", report.count()}, {"unique", report.unique()}, {"points", pts}};
}

Json estimate_json(const EstimateReport& r) {
  return {{"domain", r.domain},
          {"H", r.H},
          {"h", r.h},
          {"K_min", r.k_min},
          {"K_max", r.k_max},
          {"circle", r.circle},
          {"tolerances", {{"gradient", r.tol.gradient}, {"height", r.tol.height}, {"oscillation", r.tol.oscillation}}},
          {"q_max2", r.q_max2},
          {"q_max2_fit", r.gradient.q2_max_fit},
          {"q_max2_elements", r.gradient.q2_max_elements},
          {"q_max2_all_nodes", r.gradient.q2_max_all_nodes},
          {"gradient_bound", r.gradient_bound},
          {"gradient_slack", r.gradient_slack},
          {"gradient_slack_fit", r.gradient_slack_fit},
          {"max_on_boundary", r.max_on_boundary},
          {"gradient_pass", r.gradient_pass},
          {"u_min", r.u_min},
          {"u_min_location", point_json(r.u_min_location)},
          {"height_lower", r.height_lower},
          {"height_upper", r.height_upper},
          {"lower_slack", r.lower_slack},
          {"upper_slack", r.upper_slack},
          {"height_pass", r.height_pass},
          {"q_min2", r.q_min2},
          {"q_min_bound", r.q_min_bound},
          {"q_min_slack", r.q_min_slack},
          {"q_min_pass", r.q_min_pass},
          {"un_oscillation", r.un_oscillation},
          {"phi_oscillation", r.phi_oscillation},
          {"chain_pass", r.chain_pass},
          {"equality_candidate", r.equality_candidate},
          {"circle_equality", r.equality}};
}

Json calibration_json(const Calibration& c) {
  return {{"disc_radius", c.R},   {"H", c.H},
          {"h", c.h},             {"u_error", c.u_error},
          {"grad_error", c.grad_error}, {"q2_error", c.q2_error},
          {"phi_error", c.phi_error}};
}

Json taylor_json(const TaylorReport& report) {
  Json checks = Json::array();
  for (const TaylorCheck& c : report.checks)
    checks.push_back(
        {{"name", c.name}, {"measured", c.measured}, {"expected", c.expected}, {"tol", c.tol}, {"pass", c.pass}});
  return checks;
}

Json mesh_json(const TriMesh& mesh) {
  return {{"h", mesh.h()},
          {"nodes", mesh.num_nodes()},
          {"triangles", mesh.num_triangles()},
          {"boundary_nodes", mesh.boundary_nodes().size()},
          {"min_angle_degrees", mesh.min_angle_degrees()},
          {"max_edge_length", mesh.max_edge_length()}};
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "domain,H,K_min,K_max,q_max2,bound,u_min,lower,upper,pass\n";
  for (const SweepRow& r : rows)
    os << '"' << r.domain << '"' << ',' << fmt_number(r.H) << ',' << fmt_number(r.k_min) << ','
       << fmt_number(r.k_max) << ',' << fmt_number(r.q_max2) << ',' << fmt_number(r.bound) << ','
       << fmt_number(r.u_min) << ',' << fmt_number(r.lower) << ',' << fmt_number(r.upper) << ','
       << (r.pass ? "true" : "false") << '\n';
  write_text(path, os.str());
}

}  // namespace cmc::app
