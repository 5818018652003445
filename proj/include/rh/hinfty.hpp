#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "rh/continuation.hpp"
#include "rh/disc_system.hpp"

namespace rh {

struct Solution {
  std::vector<TrigPoly> phi;  // optimal controller, analytic
  double gamma = 0.0;
  int m = 0;                  // twist order
  Certificate certificate;
  double divisibility_defect = 0.0;
  std::optional<bool> real_symmetric;

  nlohmann::ordered_json to_json() const;
};

Solution solution_from_json(const nlohmann::json& j);

struct HinftyOpts {
  int degree = 24;
  TrackOpts track;
  double defect_rel_tol = 1e-7;
  int symmetry_samples = 1000;
  unsigned seed = 7;
};

// Least m >= 1 making z^m S_j analytic for every component.
int minimal_m(const std::vector<TrigPoly>& S);

// Twist, continue the flat disc to the zero anchor, deflate by z^m.
Solution solve(DfPtr df, const HinftyOpts& opts = {});

struct SweepResult {
  std::vector<double> tau;
  std::vector<double> gamma;
  std::vector<Solution> solutions;
  std::vector<double> dgamma;   // centered quotients at interior grid points
  std::vector<double> dphi_sup; // same for the controller, sup norm

  std::string to_csv() const;
};

// Per-tau solves of a parametric family spec, warm-started left to right.
SweepResult sweep(const nlohmann::json& family_spec,
                  const std::vector<double>& tau_grid,
                  const HinftyOpts& opts = {});

}  // namespace rh
