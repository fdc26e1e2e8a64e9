#include "cmc/app/pipelines.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>

#include "cmc/oracles.hpp"

namespace cmc::app {

namespace {

namespace fs = std::filesystem;

std::string in_dir(const RunConfig& c, const std::string& file) { return (fs::path(c.out) / file).string(); }

void prepare_out(const RunConfig& c) { fs::create_directories(c.out); }

Json config_json(const RunConfig& c) {
  Json sched = Json::array();
  for (double t : c.schedule) sched.push_back(t);
  Json alphas = Json::array();
  for (double a : c.alphas) alphas.push_back(a);
  return {{"domain", std::string(to_string(c.domain.kind))},
          {"params", c.domain.params},
          {"H", c.H},
          {"h", c.h},
          {"schedule", sched},
          {"alphas", alphas},
          {"levels", c.levels},
          {"sabotage_scale", c.sabotage_scale}};
}

Json metadata_json(const std::string& command, std::chrono::steady_clock::time_point start) {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"command", command}, {"version", kVersion}, {"timestamp", stamp}, {"wall_time_s", wall}};
}

struct Family {
  ConvexDomain domain;
  std::shared_ptr<const TriMesh> mesh;
  ContinuationResult run;
};

// Domain and mesh errors are configuration errors; solver errors propagate.
Family solve_family(const DomainSpec& spec, double H, double h, const std::vector<double>& schedule) {
  Family f{[&] {
    try {
      return build_domain(spec);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }(), nullptr, {}};
  try {
    f.mesh = std::make_shared<const TriMesh>(triangulate(f.domain, h));
  } catch (const MeshError& e) {
    throw ConfigError(e.what());
  }
  f.run = continuation(f.mesh, H, schedule);
  return f;
}

std::string solver_failure(const std::exception& e) {
  if (const auto* c = dynamic_cast<const ContinuationError*>(&e))
    return "solver failure at t = " + fmt_number(c->t()) + ": " + c->what();
  return std::string("solver failure: ") + e.what();
}

class Checks {
 public:
  void add(const std::string& name, const std::string& status, Json numbers, const std::string& detail = "") {
    Json j{{"name", name}, {"status", status}, {"numbers", std::move(numbers)}};
    if (!detail.empty()) j["detail"] = detail;
    list_.push_back(std::move(j));
    if (status == "pass") ++pass_;
    else if (status == "fail") ++fail_;
    else ++indeterminate_;
  }
  void add(const std::string& name, bool ok, Json numbers, const std::string& detail = "") {
    add(name, std::string(ok ? "pass" : "fail"), std::move(numbers), detail);
  }
  const Json& list() const { return list_; }
  int failed() const { return fail_; }
  int passed() const { return pass_; }
  int indeterminate() const { return indeterminate_; }

 private:
  Json list_ = Json::array();
  int pass_{0}, fail_{0}, indeterminate_{0};
};

std::string alpha_tag(double a) { return "[alpha=" + fmt_number(a) + "]"; }

EstimateTolerances tolerances(const RunConfig& c, const Calibration& cal) {
  EstimateTolerances t = EstimateTolerances::from(cal);
  if (c.tol.gradient >= 0.0) t.gradient = c.tol.gradient;
  if (c.tol.height >= 0.0) t.height = c.tol.height;
  if (c.tol.phi >= 0.0) t.oscillation = c.tol.phi;
  return t;
}

bool strict_slacks(const EstimateReport& r) {
  return r.gradient_slack > r.tol.gradient && r.q_min_slack > r.tol.gradient && r.lower_slack > r.tol.height &&
         r.upper_slack > r.tol.height;
}

}  // namespace

int run_oracle(const RunConfig& c, std::ostream& log) {
  if (c.domain.kind != DomainKind::disc) throw ConfigError("the oracle is defined on discs only");
  prepare_out(c);
  const double R = c.domain.params[0];
  try {
    write_oracle_csv(in_dir(c, "oracle.csv"), R, c.H, c.oracle_t, c.oracle_samples);
  } catch (const oracle::OracleError& e) {
    throw ConfigError(e.what());
  }
  log << "oracle: wrote " << c.oracle_samples << " samples to " << in_dir(c, "oracle.csv") << "\n";
  return kPass;
}

int run_solve(const RunConfig& c, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  prepare_out(c);
  std::optional<Family> solved;
  try {
    solved.emplace(solve_family(c.domain, c.H, c.h, c.schedule));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::runtime_error& e) {
    log << solver_failure(e) << "\n";
    write_json(in_dir(c, "metadata.json"), metadata_json("solve", start));
    return kSolverFailure;
  }
  const Family& f = *solved;
  const GraphSolution& sol = f.run.steps.back();
  write_mesh_csv(in_dir(c, "mesh_nodes.csv"), in_dir(c, "mesh_triangles.csv"), *f.mesh);
  write_solution_csv(in_dir(c, "solution.csv"), sol);
  Json diag = diagnostics_json(f.run);
  diag["domain"] = f.domain.label();
  diag["H"] = c.H;
  diag["mesh"] = mesh_json(*f.mesh);
  write_json(in_dir(c, "diagnostics.json"), diag);

  std::vector<double> u = sol.u_values();
  const ScalarField uf{f.mesh, FieldKind::node, u, "u", {}};
  const ScalarField K = gaussian_curvature(sol);
  const ScalarField Hres = mean_curvature_residual(sol);
  const PhiField phi = phi_field(sol, 1.0);
  write_field_csv(in_dir(c, "field_u.csv"), uf);
  write_field_csv(in_dir(c, "field_gaussian_curvature.csv"), K);
  write_field_csv(in_dir(c, "field_mean_curvature_residual.csv"), Hres);
  write_field_csv(in_dir(c, "field_phi.csv"), phi.field);
  write_wide_csv(in_dir(c, "fields.csv"), *f.mesh, {&uf, &K, &Hres, &phi.field});
  write_json(in_dir(c, "metadata.json"), metadata_json("solve", start));
  log << "solve: " << f.domain.label() << " H=" << c.H << " h=" << c.h << " nodes=" << f.mesh->num_nodes()
      << " steps=" << f.run.steps.size() << " theta0=" << f.run.theta0 << "\n";
  return kPass;
}

VerifyOutcome run_verify(const RunConfig& c, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  prepare_out(c);
  VerifyOutcome out;
  Json summary{{"command", "verify"}, {"version", kVersion}, {"config", config_json(c)}};

  std::optional<Family> solved;
  try {
    solved.emplace(solve_family(c.domain, c.H, c.h, c.schedule));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::runtime_error& e) {
    summary["status"] = "solver_failure";
    summary["detail"] = solver_failure(e);
    write_json(in_dir(c, "summary.json"), summary);
    write_json(in_dir(c, "metadata.json"), metadata_json("verify", start));
    log << solver_failure(e) << "\n";
    out.exit_code = kSolverFailure;
    out.summary = summary;
    return out;
  }
  const Family& f = *solved;
  const ConvexDomain& domain = f.domain;
  summary["domain"] = domain.label();
  summary["mesh"] = mesh_json(*f.mesh);

  GraphSolution sol = f.run.steps.back();
  if (c.sabotage_scale != 1.0)
    for (double& v : sol.values) v *= c.sabotage_scale;

  const Calibration cal = calibrate_for(domain, c.H, c.h);
  const EstimateTolerances tol = tolerances(c, cal);
  const double phi_tol = c.tol.phi >= 0.0 ? c.tol.phi : cal.phi_tol();
  const double eps_grad = c.tol.eps_grad >= 0.0 ? c.tol.eps_grad : cal.eps_grad();
  summary["calibration"] = calibration_json(cal);
  summary["tolerances"] = {{"gradient", tol.gradient},
                           {"height", tol.height},
                           {"oscillation", tol.oscillation},
                           {"phi", phi_tol},
                           {"eps_grad", eps_grad}};

  Checks checks;
  {
    Json thetas = Json::array();
    bool monotone = true;
    for (std::size_t k = 0; k < f.run.steps.size(); ++k) {
      thetas.push_back(f.run.steps[k].theta);
      if (k > 0 && f.run.steps[k].theta > f.run.steps[k - 1].theta + 1e-12) monotone = false;
    }
    checks.add("solver", f.run.theta0 > 0.0,
               {{"steps", f.run.steps.size()},
                {"theta0", f.run.theta0},
                {"theta_non_increasing", monotone},
                {"theta", thetas},
                {"final_residual", f.run.steps.back().residual_norm}});
  }
  write_json(in_dir(c, "diagnostics.json"), diagnostics_json(f.run));

  EstimateReport est = estimate_report(sol, domain, tol);
  if (c.checks.equality && est.circle && est.equality_candidate) {
    // Asymptotic equality: the slacks must also be small, and not larger, at h/2.
    try {
      const Family fine = solve_family(c.domain, c.H, 0.5 * c.h, c.schedule);
      GraphSolution fs = fine.run.steps.back();
      if (c.sabotage_scale != 1.0)
        for (double& v : fs.values) v *= c.sabotage_scale;
      const Calibration cal_fine = calibrate_for(domain, c.H, 0.5 * c.h);
      const EstimateReport fine_report = estimate_report(fs, domain, tolerances(c, cal_fine));
      est.equality = confirm_equality(est, fine_report);
      summary["refinement"] = {{"h", 0.5 * c.h}, {"max_abs_slack", max_abs_slack(fine_report)},
                               {"equality_candidate", fine_report.equality_candidate}};
    } catch (const std::runtime_error& e) {
      summary["refinement"] = {{"error", e.what()}};
    }
  }
  write_json(in_dir(c, "estimates.json"), estimate_json(est));

  if (c.checks.gradient) {
    checks.add("gradient_bound", est.gradient_pass,
               {{"q_max2", est.q_max2},
                {"bound", est.gradient_bound},
                {"slack", est.gradient_slack},
                {"max_on_boundary", est.max_on_boundary},
                {"tol", tol.gradient}});
    checks.add("q_min_bound", est.q_min_pass,
               {{"q_min2", est.q_min2}, {"bound", est.q_min_bound}, {"slack", est.q_min_slack}, {"tol", tol.gradient}});
  }
  if (c.checks.height)
    checks.add("height_bounds", est.height_pass,
               {{"u_min", est.u_min},
                {"lower", est.height_lower},
                {"upper", est.height_upper},
                {"lower_slack", est.lower_slack},
                {"upper_slack", est.upper_slack},
                {"tol", tol.height}});
  if (c.checks.equality) {
    checks.add("equality_chain", est.chain_pass,
               {{"un_oscillation", est.un_oscillation},
                {"phi_oscillation", est.phi_oscillation},
                {"tol", tol.oscillation},
                {"circle", est.circle}});
    if (est.circle)
      checks.add("circle_equality", est.equality,
                 {{"equality_candidate", est.equality_candidate}, {"max_abs_slack", max_abs_slack(est)}},
                 "all slacks within tolerance and not growing at h/2");
    else
      checks.add("strict_slacks", strict_slacks(est),
                 {{"gradient_slack", est.gradient_slack},
                  {"q_min_slack", est.q_min_slack},
                  {"lower_slack", est.lower_slack},
                  {"upper_slack", est.upper_slack}},
                 "non-circular domain: every bound holds strictly");
  }

  std::optional<Vec2> critical;
  if (c.checks.topology) {
    bool all_unique = true;
    Json per_step = Json::array();
    for (const GraphSolution& s : f.run.steps) {
      GraphSolution a = s;
      if (c.sabotage_scale != 1.0)
        for (double& v : a.values) v *= c.sabotage_scale;
      const CriticalPointReport rep = critical_points(a, eps_grad);
      const bool ok = rep.unique() && rep.points[0].kind == CriticalKind::minimum && rep.points[0].K < 0.0;
      all_unique = all_unique && ok;
      per_step.push_back({{"t", s.t}, {"count", rep.count()}, {"ok", ok}});
    }
    const CriticalPointReport rep = critical_points(sol, eps_grad);
    if (rep.unique()) critical = rep.points[0].location;
    write_json(in_dir(c, "critical_points.json"), critical_points_json(rep));
    checks.add("critical_points", all_unique, {{"per_step", per_step}, {"final", critical_points_json(rep)}});

    const LevelTopologyReport lt = level_topology(sol, c.levels);
    write_levels_csv(in_dir(c, "levels.csv"), lt);
    checks.add("sublevel_topology", lt.max_count() == 1, {{"levels", lt.levels.size()}, {"max_count", lt.max_count()}});
    const bool saddle = rep.count_of(CriticalKind::saddle) > 0;
    checks.add("saddle_equivalence", !saddle && lt.max_count() < 2,
               {{"saddle_detected", saddle}, {"max_components", lt.max_count()}},
               "a saddle exists iff some sub-level set has two or more components; neither occurs");

    const CriticalTrack track = track_critical_point(f.run.steps, eps_grad);
    checks.add("critical_point_track", track.all_unique && track.max_displacement <= c.h,
               {{"max_displacement", track.max_displacement}, {"h", c.h}});
  } else {
    const CriticalPointReport rep = critical_points(sol, eps_grad);
    if (rep.unique()) critical = rep.points[0].location;
  }

  if (c.checks.phi) {
    Json extrema = Json::array();
    for (double alpha : c.alphas) {
      const PhiField phi = phi_field(sol, alpha);
      const PhiMaxReport mx = phi_max_location(phi, phi_tol);
      const PhiMinReport mn = phi_min_location(phi, critical, phi_tol);
      extrema.push_back(extremum_json(phi, mn));
      write_field_csv(in_dir(c, "phi_alpha_" + fmt_number(alpha) + ".csv"), phi.field);
      const Json max_numbers{{"boundary_max", mx.boundary_max},
                             {"interior_max", mx.interior_max},
                             {"excess", mx.excess},
                             {"tol", phi_tol}};
      if (alpha == 1.0)
        checks.add("phi_max" + alpha_tag(alpha), mx.pass, max_numbers);
      else
        checks.add("phi_max" + alpha_tag(alpha), "indeterminate", max_numbers,
                   "maximum principle is asserted for alpha = 1 only");
      const Json min_numbers{{"classification", std::string(to_string(mn.classification))},
                             {"value", mn.argmin.value},
                             {"range", mn.range},
                             {"constant", mn.constant},
                             {"tol", phi_tol}};
      if (alpha >= 1.0 && alpha <= 2.0)
        checks.add("phi_min" + alpha_tag(alpha), mn.pass, min_numbers);
      else
        checks.add("phi_min" + alpha_tag(alpha), "indeterminate", min_numbers, "alpha outside [1, 2]: reported only");
    }
    write_json(in_dir(c, "phi_extrema.json"), extrema);

    const auto bd = phi_boundary_normal_derivative(sol, domain, 1.0);
    const PhiField phi1 = phi_field(sol, 1.0);
    double max_abs = 0.0;
    int at_max = bd.front().node, at_min = bd.front().node;
    double dn_at_max = bd.front().value, dn_at_min = bd.front().value;
    for (const auto& b : bd) {
      max_abs = std::max(max_abs, std::abs(b.value));
      if (phi1.field.values[b.node] > phi1.field.values[at_max]) {
        at_max = b.node;
        dn_at_max = b.value;
      }
      if (phi1.field.values[b.node] < phi1.field.values[at_min]) {
        at_min = b.node;
        dn_at_min = b.value;
      }
    }
    const bool hopf = dn_at_max >= -phi_tol && dn_at_min <= phi_tol;
    const bool ok = domain.is_circle() ? (max_abs <= phi_tol && hopf) : hopf;
    checks.add("phi_boundary_identity", ok,
               {{"max_abs", max_abs}, {"at_boundary_max", dn_at_max}, {"at_boundary_min", dn_at_min}, {"tol", phi_tol}});
    const SignChainReport chain = sign_chain_at_max(sol, domain, phi1, phi_tol);
    checks.add("phi_sign_chain", chain.pass,
               {{"q2_at_max", chain.q2_at_max}, {"q2_max", chain.q2_max}, {"lhs", chain.lhs}, {"rhs", chain.rhs}});
  }

  if (c.checks.taylor) {
    const double H = c.H;
    const TaylorReport oracle_rep = taylor_identities(
        [H](const Jet& x, const Jet& y) { return oracle::radial_cap_xy(1.0, H, 1.0, x, y); }, {0.0, 0.0}, H);
    checks.add("taylor_oracle", oracle_rep.all_pass(), taylor_json(oracle_rep));
    const CriticalPointReport rep = critical_points(sol, eps_grad);
    if (domain.is_circle() && rep.unique()) {
      const TaylorReport sr = taylor_identities(sol, rep.points[0]);
      checks.add("taylor_solution", sr.all_pass(), taylor_json(sr));
    } else {
      checks.add("taylor_solution", "indeterminate", Json::object(),
                 "second-order identities at the critical point are specific to circles");
    }
  }

  if (c.checks.sectors) {
    bool ok = true;
    Json counts = Json::array();
    for (int n = 1; n <= 6; ++n) {
      const SectorResult r =
          nodal_sectors([n](const Vec2& p) { return oracle::harmonic_leading(n, 1.0, p); }, {0.0, 0.0}, 0.1);
      counts.push_back(r.sectors);
      ok = ok && r.sectors == 2 * n;
    }
    const double radii[] = {0.05, 0.1};
    const std::complex<double> lambda{2.0, 1.0};
    const HarmonicFit fit = fit_leading_harmonic(
        [&](const Vec2& p) {
          return oracle::harmonic_leading(3, lambda, p) + 0.01 * oracle::harmonic_leading(5, 1.0, p);
        },
        {0.0, 0.0}, radii);
    ok = ok && fit.found && fit.n == 3 && std::abs(fit.lambda - lambda) <= 0.02 * std::abs(lambda);
    Json numbers{{"sectors_re_zn", counts}, {"fit_n", fit.n}, {"fit_lambda", {fit.lambda.real(), fit.lambda.imag()}}};
    if (domain.kind() == DomainKind::disc) {
      // Negative control: solution minus the exact cap is discretization noise.
      const double R = domain.params()[0];
      std::vector<double> w(sol.values.size());
      for (std::size_t n = 0; n < w.size(); ++n)
        w[n] = sol.u(static_cast<int>(n)) - oracle::radial_cap_value(R, c.H, 1.0, f.mesh->node(static_cast<int>(n)));
      const ScalarField wf{f.mesh, FieldKind::node, w, "difference", {}};
      SectorOptions so;
      so.band_abs = 3.0 * cal.u_error;
      const SectorResult nc = nodal_sectors(wf, {0.0, 0.0}, std::min(0.2, 0.5 * R), so);
      numbers["negative_control"] = {{"indeterminate", nc.indeterminate}, {"sectors", nc.sectors}};
    }
    checks.add("nodal_sectors", ok, numbers);
  }

  summary["checks"] = checks.list();
  summary["passed"] = checks.passed();
  summary["failed"] = checks.failed();
  summary["indeterminate"] = checks.indeterminate();
  summary["status"] = checks.failed() == 0 ? "pass" : "fail";
  write_json(in_dir(c, "summary.json"), summary);
  write_json(in_dir(c, "metadata.json"), metadata_json("verify", start));
  log << "verify: " << domain.label() << " passed=" << checks.passed() << " failed=" << checks.failed()
      << " indeterminate=" << checks.indeterminate() << "\n";
  for (const Json& j : checks.list())
    if (j["status"] == "fail") log << "  FAIL " << j["name"].get<std::string>() << "\n";
  out.exit_code = checks.failed() == 0 ? kPass : kVerificationFailure;
  out.summary = std::move(summary);
  return out;
}

int run_sweep(const RunConfig& c, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  prepare_out(c);
  struct Point {
    DomainSpec spec;
    double H;
  };
  std::vector<Point> grid;
  if (c.sweep_requested) {
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    if (!c.sweep_R.empty()) axes.push_back({"R", c.sweep_R});
    if (!c.sweep_a.empty()) axes.push_back({"a", c.sweep_a});
    if (!c.sweep_b.empty()) axes.push_back({"b", c.sweep_b});
    const std::vector<double> Hs = c.sweep_H.empty() ? std::vector<double>{c.H} : c.sweep_H;
    const bool empty_axis = (c.sweep_H.empty() && axes.empty());
    std::vector<DomainSpec> specs{c.domain};
    for (const auto& [name, values] : axes) {
      std::vector<DomainSpec> next;
      for (const DomainSpec& s : specs)
        for (double v : values) next.push_back(with_parameter(s, name, v));
      specs = std::move(next);
    }
    if (!empty_axis)
      for (const DomainSpec& s : specs)
        for (double H : Hs) grid.push_back({s, H});
  }

  std::vector<SweepRow> rows;
  Json points = Json::array();
  int worst = kPass;
  for (const Point& p : grid) {
    Json pj{{"domain", std::string(to_string(p.spec.kind))}, {"params", p.spec.params}, {"H", p.H}};
    try {
      const Family f = solve_family(p.spec, p.H, c.h, c.schedule);
      const Calibration cal = calibrate_for(f.domain, p.H, c.h);
      EstimateReport r = estimate_report(f.run.steps.back(), f.domain, tolerances(c, cal));
      if (r.circle && r.equality_candidate) {
        const Family fine = solve_family(p.spec, p.H, 0.5 * c.h, c.schedule);
        const Calibration cal_fine = calibrate_for(f.domain, p.H, 0.5 * c.h);
        r.equality = confirm_equality(r, estimate_report(fine.run.steps.back(), f.domain, tolerances(c, cal_fine)));
      }
      const bool pass = r.gradient_pass && r.height_pass && r.q_min_pass;
      rows.push_back({r.domain, r.H, r.k_min, r.k_max, r.q_max2, r.gradient_bound, r.u_min, r.height_lower,
                      r.height_upper, pass});
      pj["report"] = estimate_json(r);
      pj["max_abs_slack"] = max_abs_slack(r);
      if (!pass) worst = std::max(worst, static_cast<int>(kVerificationFailure));
    } catch (const ConfigError& e) {
      pj["error"] = e.what();
      worst = std::max(worst, static_cast<int>(kConfigError));
    } catch (const std::runtime_error& e) {
      pj["error"] = solver_failure(e);
      worst = std::max(worst, static_cast<int>(kSolverFailure));
    }
    points.push_back(pj);
  }
  write_sweep_csv(in_dir(c, "sweep.csv"), rows);
  write_json(in_dir(c, "sweep.json"), {{"command", "sweep"}, {"version", kVersion}, {"h", c.h}, {"points", points}});
  write_json(in_dir(c, "metadata.json"), metadata_json("sweep", start));
  log << "sweep: " << grid.size() << " points, " << rows.size() << " rows\n";
  return worst;
}

}  // namespace cmc::app
