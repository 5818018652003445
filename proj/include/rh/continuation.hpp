#pragma once

#include <string>
#include <vector>

#include "rh/disc_system.hpp"

namespace rh {

enum class PathStatus { reached, level_collapsed, failed };

const char* to_string(PathStatus s);

struct PathSample {
  double s = 0.0;  // arclength fraction in [0,1]
  VecC w;
  DiscState state;
  double step = 0.0;
};

struct PathResult {
  std::vector<PathSample> samples;
  PathStatus status = PathStatus::failed;
  std::string detail;
  int rejected_steps = 0;

  const DiscState& terminal() const { return samples.back().state; }
  std::vector<double> p_values() const;
};

struct TrackOpts {
  SolveOpts solver;
  double step_init = 0.05;
  double step_min = 1e-5;
  double step_max = 0.1;
  double t_floor_factor = 1e-4;  // floor is factor * chart level
  double agree_tol = 1e-6;
};

// Predictor-corrector march along the piecewise-linear path through
// `waypoints` (the first waypoint must lie in the chart's trust region).
PathResult track(const StartChart& chart, const std::vector<VecC>& waypoints,
                 const DefiningFunction& df, const TrackOpts& opts = {});

// P(w_target) via the straight ray from the chart's base anchor.
double p_value(const StartChart& chart, const VecC& w_target,
               const DefiningFunction& df, const TrackOpts& opts = {});

struct PathAgreement {
  double max_dF = 0.0;
  double max_dG = 0.0;
  double max_dP = 0.0;
  bool pass = false;
};

// Tracks every path to the common target and compares terminal discs.
PathAgreement path_independence_check(const StartChart& chart,
                                      const VecC& w_target,
                                      const DefiningFunction& df,
                                      const std::vector<std::vector<VecC>>& paths,
                                      const TrackOpts& opts = {});

// One JSON object per sample, newline separated.
std::string path_to_json_lines(const PathResult& r);
// columns: s, Re w_j, Im w_j ..., P
std::string path_to_csv(const PathResult& r);

}  // namespace rh
