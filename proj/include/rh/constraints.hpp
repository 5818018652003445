#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rh/trigpoly.hpp"

namespace rh {

using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;

// Realification convention throughout: w in C^n maps to
// (Re w_1, Im w_1, ..., Re w_n, Im w_n) in R^{2n}.
VecR realify(const VecC& w);
VecC complexify(const VecR& v);

// The constraint function rho with derivative access. Families implement the
// real gradient and real Hessian; the complex (Wirtinger) gradient is derived.
class DefiningFunction {
public:
  virtual ~DefiningFunction() = default;

  virtual int dim() const = 0;
  virtual double outer_radius() const = 0;
  virtual int smoothness_order() const { return 6; }
  virtual std::optional<double> parameter() const { return std::nullopt; }

  // Center selector S(z) on the circle (exact), and its trig-poly form.
  virtual VecC selector(cd z) const = 0;
  virtual std::vector<TrigPoly> selector_poly() const = 0;

  virtual double rho(cd z, const VecC& w) const = 0;
  virtual VecR grad_real(cd z, const VecC& w) const = 0;
  virtual MatR hessian(cd z, const VecC& w) const = 0;

  // D_w rho as a complex vector: g_j = (d/dx_j - i d/dy_j) rho / 2.
  VecC grad(cd z, const VecC& w) const;
};

using DfPtr = std::shared_ptr<const DefiningFunction>;

struct EvalResult {
  double rho;
  VecC grad;       // D_w rho
  VecC grad_conj;  // conj of grad
  MatR hess;       // realified 2n x 2n, symmetric
};

// Throws EvaluationAtZeroSet when rho(z,w) = 0.
EvalResult eval_grad_hess(const DefiningFunction& df, cd z, const VecC& w);

struct AuditViolation {
  std::string assumption;
  cd z;
  VecC w;
  std::string detail;
};

struct AuditReport {
  double kappa_min = std::numeric_limits<double>::infinity();
  double min_grad_norm = std::numeric_limits<double>::infinity();
  std::vector<AuditViolation> violations;
  std::vector<std::string> warnings;
  int samples = 0;
  bool pass = true;

  nlohmann::ordered_json to_json() const;
};

// Minimum tangential-Hessian eigenvalue over sampled level-set points
// (vacuous pass with +inf sentinel when n = 1).
AuditReport hypoconvexity_audit(const DefiningFunction& df,
                                const std::vector<double>& levels,
                                int samples_per_level, unsigned seed = 7);

// Gradient nonvanishing on 0 < rho <= R, rho(z,S(z)) = 0, star-shapedness
// of fibers about S(z), analytic-selector warning.
AuditReport assumption_audit(const DefiningFunction& df, int z_samples = 32,
                             int level_samples = 6, unsigned seed = 7);

// Builtin family construction. `spec` is the family JSON:
//   {"family": name, "n": n, "S": [TrigPoly...], "params": {...}, "R": R}
// Known names: shifted_ball, star_fiber, convex_perturbed_ball,
// indefinite_test, parametric.
DfPtr make_family(const nlohmann::json& spec);

// Parametric family evaluated at tau: leaf numbers of "left"/"right"
// specs are interpolated linearly before construction.
DfPtr make_family_at(const nlohmann::json& spec, double tau);

// rho_m(z,w) = rho(z, w z^{-m}); selector becomes z^m S(z).
DfPtr twist(DfPtr df, int m);

// rho^(z,w) = rho(z, w + c(z)) for an analytic center c; selector S - c.
DfPtr recenter(DfPtr df, std::vector<TrigPoly> c);

// Same with the center given as an exact function on the circle (used for
// Moebius-composed centers that are not trig polynomials). c_at_origin is
// the value of the analytic interior extension of c at 0, needed to relate
// anchors across the shift.
DfPtr recenter(DfPtr df, std::function<VecC(cd)> c_on_circle,
               VecC c_at_origin);

// rho'(z,w) = rho(moebius(z), w) with moebius(0) = z0; `rot` pre-composes
// a rotation zeta -> e^{i rot} zeta (alternative normalization).
DfPtr mobius_pullback(DfPtr df, cd z0, double rot = 0.0);

cd mobius_map(cd zeta, cd z0, double rot = 0.0);

}  // namespace rh
