// Command-line front end: solve, verify, sweep and oracle pipelines.
#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <optional>

#include "cmc/app/pipelines.hpp"

using namespace cmc::app;

int main(int argc, char** argv) {
  CLI::App app{"Spacelike constant mean curvature graphs: solver and estimate verification"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");

  const std::map<std::string, std::string> descriptions{
      {"domain", "disc | ellipse | support_function | superellipse"},
      {"R", "disc radius"},
      {"a", "ellipse / superellipse semi-axis along x"},
      {"b", "ellipse / superellipse semi-axis along y"},
      {"p", "superellipse exponent"},
      {"rho0", "support function mean radius"},
      {"eps", "support function modulation amplitude"},
      {"k", "support function modulation frequency"},
      {"H", "mean curvature (must be positive)"},
      {"h", "target mesh size"},
      {"steps", "number of uniform continuation steps from t=0 to t=1"},
      {"schedule", "explicit comma-separated t schedule (overrides steps)"},
      {"alphas", "comma-separated P-function parameters"},
      {"levels", "number of sub-level sets sampled"},
      {"tol_gradient", "override for the |Du|^2 tolerance"},
      {"tol_height", "override for the height tolerance"},
      {"tol_phi", "override for the P-function tolerance"},
      {"eps_grad", "override for the critical point gradient threshold"},
      {"out", "output directory"},
      {"sabotage_scale", "negative control: scale the analysed solution"},
      {"check_gradient", "enable gradient bound checks"},
      {"check_height", "enable height bound checks"},
      {"check_phi", "enable P-function checks"},
      {"check_topology", "enable critical point and sub-level checks"},
      {"check_taylor", "enable Taylor identity checks"},
      {"check_sectors", "enable nodal sector checks"},
      {"check_equality", "enable equality and oscillation checks"},
      {"t", "homotopy parameter sampled by the oracle"},
      {"samples", "number of oracle radii"},
      {"sweep_H", "comma-separated H values"},
      {"sweep_R", "comma-separated disc radii"},
      {"sweep_a", "comma-separated ellipse semi-axes a"},
      {"sweep_b", "comma-separated ellipse semi-axes b"}};

  std::string config_path;
  std::map<std::string, std::optional<std::string>> flags;
  for (const std::string& key : Settings::known_keys()) flags[key];

  const char* names[] = {"solve", "verify", "sweep", "oracle"};
  const char* helps[] = {"mesh, continuation solve and field exports", "run every enabled check",
                         "estimate table over a parameter grid", "sample the radial exact solution"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], helps[i]);
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", config_path, "flat key = value configuration file");
    for (const std::string& key : Settings::known_keys()) {
      const auto it = descriptions.find(key);
      sub->add_option("--" + key, flags[key], it == descriptions.end() ? "" : it->second);
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    Settings settings = config_path.empty() ? Settings{} : Settings::load(config_path);
    for (const auto& [key, value] : flags)
      if (value) settings.set(key, *value);
    const RunConfig config = make_run_config(settings);
    if (subs[0]->parsed()) return run_solve(config, std::cout);
    if (subs[1]->parsed()) return run_verify(config, std::cout).exit_code;
    if (subs[2]->parsed()) return run_sweep(config, std::cout);
    return run_oracle(config, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
}
