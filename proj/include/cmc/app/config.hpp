#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmc/domain.hpp"

namespace cmc::app {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0);
  /// 1-based line of the config file, 0 when not from a file.
  int line() const { return line_; }

 private:
  int line_;
};

/// Flat key/value settings: file first, then command-line overrides.
class Settings {
 public:
  /// Parses `key = value` lines; '#' starts a comment. Unknown keys and
  /// duplicates are errors reported with their line number.
  static Settings parse(const std::string& text);
  static Settings load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list; an empty value gives an empty list.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

struct Toggles {
  bool gradient{true};
  bool height{true};
  bool phi{true};
  bool topology{true};
  bool taylor{true};
  bool sectors{true};
  bool equality{true};
};

struct ToleranceOverrides {
  // Negative means "use the calibrated value".
  double gradient{-1.0};
  double height{-1.0};
  double phi{-1.0};
  double eps_grad{-1.0};
};

struct RunConfig {
  DomainSpec domain{DomainKind::disc, {1.0}};
  double H{1.0};
  double h{0.05};
  std::vector<double> schedule;
  std::vector<double> alphas{1.0, 1.5, 2.0};
  int levels{50};
  ToleranceOverrides tol;
  Toggles checks;
  std::string out{"out"};
  /// Negative control: analysed solution values are multiplied by this.
  double sabotage_scale{1.0};
  // oracle subcommand
  double oracle_t{1.0};
  int oracle_samples{101};
  // sweep grid (empty lists leave the parameter fixed)
  std::vector<double> sweep_H;
  std::vector<double> sweep_R;
  std::vector<double> sweep_a;
  std::vector<double> sweep_b;
  bool sweep_requested{false};
};

/// Validates and converts. Throws ConfigError (H = 0, h <= 0, bad schedule, ...).
RunConfig make_run_config(const Settings& settings);

/// The domain spec with one parameter replaced by a sweep value.
DomainSpec with_parameter(const DomainSpec& spec, const std::string& name, double value);

}  // namespace cmc::app
