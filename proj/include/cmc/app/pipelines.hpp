#pragma once

#include <iosfwd>
#include <string>

#include "cmc/app/config.hpp"
#include "cmc/app/io.hpp"

namespace cmc::app {

enum ExitCode : int { kPass = 0, kVerificationFailure = 1, kSolverFailure = 2, kConfigError = 3 };

inline constexpr const char* kVersion = "1.0.0";

/// Mesh, continuation and exports: mesh_nodes.csv, mesh_triangles.csv,
/// solution.csv, diagnostics.json, field_*.csv, fields.csv, metadata.json.
int run_solve(const RunConfig& config, std::ostream& log);

struct VerifyOutcome {
  int exit_code{kPass};
  Json summary;
};

/// Runs every enabled check and writes summary.json plus the per-module
/// reports. The summary holds no timing data (see metadata.json).
VerifyOutcome run_verify(const RunConfig& config, std::ostream& log);

/// One estimate row per grid point (cartesian product of the sweep lists);
/// writes sweep.csv and sweep.json.
int run_sweep(const RunConfig& config, std::ostream& log);

/// Samples the radial family to oracle.csv.
int run_oracle(const RunConfig& config, std::ostream& log);

}  // namespace cmc::app
