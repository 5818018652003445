#pragma once

#include <Eigen/Dense>

#include "rh/constraints.hpp"
#include "rh/trigpoly.hpp"

namespace rh {

struct NehariResult {
  double gamma = 0.0;
  Eigen::VectorXcd schmidt_u, schmidt_v;
  int hankel_dim = 0;
  Eigen::MatrixXcd hankel;
};

// dist_Linf(c, Hinf) = largest singular value of the Hankel matrix
// H[j][k] = chat(-(j+k+1)), j,k = 0..d-1, d = deepest negative frequency.
NehariResult nehari(const TrigPoly& c);

struct MinimaxOpts {
  int grid = 0;           // 0 -> 4*degree+1
  double grad_tol = 1e-12;
  double p_max = 1e7;     // final smoothing exponent
  int max_newton = 200;
};

struct MinimaxResult {
  double gamma_upper = 0.0;
  TrigPoly f_opt;
  int iterations = 0;
};

// Upper bound on gamma_rho over analytic polynomials of the given degree,
// for n = 1 families with convex fibers. Smoothed-minimax Newton with
// exponent continuation; machinery disjoint from the disc solver.
MinimaxResult convex_minimax(const DefiningFunction& df, int degree,
                             const MinimaxOpts& opts = {});

struct CompDerivReport {
  std::vector<double> scales;
  std::vector<double> ratios;  // ||R(f, s h)||_{1,2} / ||s h||_{1,2}
  double slope = 0.0;          // log-log fit
  bool pass = false;
};

// First-order remainder decay of the composition operator
// P(f)(z) = rho(z, f(z)); pass iff the log-log slope is >= 0.9.
CompDerivReport composition_derivative_check(
    const DefiningFunction& p, const std::vector<TrigPoly>& f,
    const std::vector<double>& h_scales, unsigned seed = 11);

}  // namespace rh
