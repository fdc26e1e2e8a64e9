#include "cmc/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cmc/solver.hpp"

namespace cmc::app {

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'", line);
  }
  if (used != text.size() || !std::isfinite(v))
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'", line);
  return v;
}

}  // namespace

const std::vector<std::string>& Settings::known_keys() {
  static const std::vector<std::string> keys{
      "domain",       "R",           "a",          "b",           "p",           "rho0",          "eps",
      "k",            "H",           "h",          "steps",       "schedule",    "alphas",        "levels",
      "tol_gradient", "tol_height",  "tol_phi",    "eps_grad",    "out",         "sabotage_scale", "check_gradient",
      "check_height", "check_phi",   "check_topology", "check_taylor", "check_sectors", "check_equality", "t",
      "samples",      "sweep_H",     "sweep_R",    "sweep_a",     "sweep_b"};
  return keys;
}

Settings Settings::parse(const std::string& text) {
  Settings s;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  const auto& keys = known_keys();
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown key '" + key + "'", line);
    if (s.values_.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    s.values_[key] = value;
    s.lines_[key] = line;
  }
  return s;
}

Settings Settings::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void Settings::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
  lines_.erase(key);
}

std::string Settings::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Settings::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto l = lines_.find(key);
  return to_double(key, it->second, l == lines_.end() ? 0 : l->second);
}

int Settings::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, fallback);
  if (v != std::floor(v)) {
    const auto l = lines_.find(key);
    throw ConfigError("'" + key + "' expects an integer", l == lines_.end() ? 0 : l->second);
  }
  return static_cast<int>(v);
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  const auto l = lines_.find(key);
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'", l == lines_.end() ? 0 : l->second);
}

std::vector<double> Settings::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto l = lines_.find(key);
  const int line = l == lines_.end() ? 0 : l->second;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_double(key, item, line));
  }
  return out;
}

RunConfig make_run_config(const Settings& s) {
  RunConfig c;
  const DomainKind kind = [&] {
    try {
      return parse_domain_kind(s.get("domain", "disc"));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }();
  switch (kind) {
    case DomainKind::disc:
      c.domain = {kind, {s.get_double("R", 1.0)}};
      break;
    case DomainKind::ellipse:
      c.domain = {kind, {s.get_double("a", 1.5), s.get_double("b", 1.0)}};
      break;
    case DomainKind::superellipse:
      c.domain = {kind, {s.get_double("a", 1.5), s.get_double("b", 1.0), s.get_double("p", 4.0)}};
      break;
    case DomainKind::support_function:
      c.domain = {kind, {s.get_double("rho0", 1.0), s.get_double("eps", 0.05), s.get_double("k", 3.0)}};
      break;
  }

  c.H = s.get_double("H", 1.0);
  if (c.H == 0.0) throw ConfigError("H must be nonzero");
  if (c.H < 0.0) throw ConfigError("H must be positive (negative H is the reflection u -> -u of |H|)");
  c.h = s.get_double("h", 0.05);
  if (!(c.h > 0.0)) throw ConfigError("mesh size h must be positive");

  if (s.has("schedule")) {
    c.schedule = s.get_list("schedule", {});
  } else {
    const int steps = s.get_int("steps", 11);
    if (steps < 2) throw ConfigError("steps must be at least 2");
    c.schedule = uniform_schedule(steps);
  }
  if (c.schedule.size() < 2 || c.schedule.front() != 0.0 || c.schedule.back() != 1.0)
    throw ConfigError("schedule must start at 0 and end at 1");
  for (std::size_t i = 1; i < c.schedule.size(); ++i)
    if (!(c.schedule[i] > c.schedule[i - 1])) throw ConfigError("schedule must be strictly increasing");

  c.alphas = s.get_list("alphas", c.alphas);
  c.levels = s.get_int("levels", 50);
  if (c.levels < 1) throw ConfigError("levels must be positive");
  c.tol.gradient = s.get_double("tol_gradient", -1.0);
  c.tol.height = s.get_double("tol_height", -1.0);
  c.tol.phi = s.get_double("tol_phi", -1.0);
  c.tol.eps_grad = s.get_double("eps_grad", -1.0);
  c.out = s.get("out", "out");
  c.sabotage_scale = s.get_double("sabotage_scale", 1.0);

  c.checks.gradient = s.get_bool("check_gradient", true);
  c.checks.height = s.get_bool("check_height", true);
  c.checks.phi = s.get_bool("check_phi", true);
  c.checks.topology = s.get_bool("check_topology", true);
  c.checks.taylor = s.get_bool("check_taylor", true);
  c.checks.sectors = s.get_bool("check_sectors", true);
  c.checks.equality = s.get_bool("check_equality", true);

  c.oracle_t = s.get_double("t", 1.0);
  if (!(c.oracle_t >= 0.0 && c.oracle_t <= 1.0)) throw ConfigError("t must lie in [0, 1]");
  c.oracle_samples = s.get_int("samples", 101);
  if (c.oracle_samples < 2) throw ConfigError("samples must be at least 2");

  c.sweep_H = s.get_list("sweep_H", {});
  c.sweep_R = s.get_list("sweep_R", {});
  c.sweep_a = s.get_list("sweep_a", {});
  c.sweep_b = s.get_list("sweep_b", {});
  c.sweep_requested = s.has("sweep_H") || s.has("sweep_R") || s.has("sweep_a") || s.has("sweep_b");
  for (double H : c.sweep_H)
    if (!(H > 0.0)) throw ConfigError("sweep_H values must be positive");
  return c;
}

DomainSpec with_parameter(const DomainSpec& spec, const std::string& name, double value) {
  DomainSpec out = spec;
  auto need = [&](DomainKind k, std::size_t index) {
    if (spec.kind != k) throw ConfigError("sweep parameter '" + name + "' does not apply to " +
                                          std::string(to_string(spec.kind)));
    out.params[index] = value;
  };
  if (name == "R")
    need(DomainKind::disc, 0);
  else if (name == "a")
    need(DomainKind::ellipse, 0);
  else if (name == "b")
    need(DomainKind::ellipse, 1);
  else
    throw ConfigError("unknown sweep parameter '" + name + "'");
  return out;
}

}  // namespace cmc::app
