#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rh/constraints.hpp"
#include "rh/trigpoly.hpp"

namespace rh {

// One analytic disc: anchor w = F(0), analytic F and dual G, level t.
struct DiscState {
  VecC w;
  std::vector<TrigPoly> F;  // analytic, common degree N
  std::vector<TrigPoly> G;
  double t = 0.0;

  int dim() const { return static_cast<int>(F.size()); }
  int degree() const { return F.empty() ? 0 : F[0].degree(); }
};

// Explicit (f, g, t0) seeding continuation.
struct StartChart {
  std::vector<TrigPoly> f;
  std::vector<TrigPoly> g;
  double t0 = 0.0;
  double validity_radius = 0.0;  // trusted seed region around f(0)

  VecC base_anchor() const;
  DiscState to_state() const;
};

struct Certificate {
  double flatness_dev = 0.0;    // sup |rho(z,F(z)) - t|
  double tangency_resid = 0.0;  // sup_{j,z} |G_j S_fn - drho/dw_j|
  double bilinear_resid = 0.0;  // sup |sum F_j G_j - 1|
  bool winding_ok = false;
  double truncation_loss = 0.0;

  double max_resid() const;
};

struct SolveOpts {
  double tol = 1e-10;
  double stall_tol = 1e-7;  // acceptable truncation floor at stationarity
  int max_iter = 50;
  double rank_tol = 1e-10;
  double basin = 1e-2;          // certificate threshold for trusting a seed
  double sfn_rel_floor = 1e-8;  // min |S_fn| relative to gradient scale
};

// The L^t lift: D_w rho / sum_j w_j drho/dw_j.
VecC tangency_data(const DefiningFunction& df, cd z, const VecC& w);

// Residual of the disc system at the state's degree N, on the 4N+1 grid:
// [flatness rows | negative modes of (drho/dw_j)/S_fn | anchor rows].
Eigen::VectorXd residual(const DiscState& state, const DefiningFunction& df);

// Exact linearization with respect to (Re/Im F-coefficients 1..N, t);
// coefficient 0 is pinned by the anchor.
Eigen::MatrixXd jacobian(const DiscState& state, const DefiningFunction& df);

// Damped Gauss-Newton with the anchor pinned to target_w.
DiscState newton_solve(const DiscState& start, const VecC& target_w,
                       const DefiningFunction& df, const SolveOpts& opts = {});

Certificate certify(const DiscState& state, const DefiningFunction& df);

// Chart construction: F = center + offset (constant), refined to a zero of
// the disc system by newton_solve. `center` must be analytic.
StartChart make_start_chart(const DefiningFunction& df,
                            const std::vector<TrigPoly>& center,
                            const VecC& offset, int degree,
                            const SolveOpts& opts = {});

// Coordinate probe in a normalized chart (g constant along e_1,
// f_1 constant).
struct PhiValue {
  TrigPoly phi1;                  // real, mean-removed
  std::vector<TrigPoly> phi2m3;   // Phi_2 - Phi_3
  VecC phi4;
};

PhiValue chart_phi(const TrigPoly& u, const TrigPoly& v,
                   const std::vector<TrigPoly>& k,
                   const std::vector<TrigPoly>& l, const VecC& w,
                   const StartChart& chart, const DefiningFunction& df);

// I = 2 (drho/dw_1)(.,f(.)) X, the positive weight in D Phi_1 [u] = I u.
TrigPoly chart_phi_weight(const StartChart& chart, const DefiningFunction& df);

}  // namespace rh
