#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "cmc/analysis.hpp"
#include "cmc/estimates.hpp"
#include "cmc/pfunction.hpp"

// File formats. Numbers are written with 17 significant digits so outputs
// round-trip and identical runs give identical bytes.
namespace cmc::app {

using Json = nlohmann::ordered_json;

std::string fmt_number(double v);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const Json& j);

/// r,value,slope,residual on `samples` uniform radii in [0, R].
void write_oracle_csv(const std::string& path, double R, double H, double t, int samples);

void write_mesh_csv(const std::string& nodes_path, const std::string& triangles_path, const TriMesh& mesh);

/// node_id,x,y,v,u,grad_x,grad_y with gradients of u.
void write_solution_csv(const std::string& path, const GraphSolution& solution);

/// node_id,x,y,value
void write_field_csv(const std::string& path, const ScalarField& field);

/// node_id,x,y,<name>... for plotting.
void write_wide_csv(const std::string& path, const TriMesh& mesh, const std::vector<const ScalarField*>& fields);

/// m,component_count
void write_levels_csv(const std::string& path, const LevelTopologyReport& report);

Json diagnostics_json(const ContinuationResult& run);
Json extremum_json(const PhiField& phi, const PhiMinReport& min);
Json critical_points_json(const CriticalPointReport& report);
Json estimate_json(const EstimateReport& report);
Json calibration_json(const Calibration& c);
Json taylor_json(const TaylorReport& report);
Json mesh_json(const TriMesh& mesh);

struct SweepRow {
  std::string domain;
  double H{0.0};
  double k_min{0.0};
  double k_max{0.0};
  double q_max2{0.0};
  double bound{0.0};
  double u_min{0.0};
  double lower{0.0};
  double upper{0.0};
  bool pass{false};
};

/// domain,H,K_min,K_max,q_max2,bound,u_min,lower,upper,pass
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace cmc::app
