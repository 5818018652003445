#pragma once

#include <complex>
#include <vector>

#include "rh/errors.hpp"

namespace rh {

using cd = std::complex<double>;

// Truncated Fourier series on the unit circle,
//   f(e^{i theta}) = sum_{k=-N..N} c_k e^{i k theta}.
// Coefficients are stored for k = -N..N; coeff(k) outside that range is 0.
class TrigPoly {
public:
  TrigPoly() : degree_(0), c_(1, cd(0.0)) {}
  explicit TrigPoly(int degree);
  TrigPoly(int degree, std::vector<cd> coeffs);  // coeffs indexed -N..N

  static TrigPoly constant(cd v);
  // c * z^k as a TrigPoly of degree max(|k|, degree_hint)
  static TrigPoly harmonic(int k, cd c = cd(1.0), int degree_hint = 0);
  // Recover coefficients -N..N from samples at M >= 2N+1 equispaced points.
  static TrigPoly from_grid(const std::vector<cd>& values, int degree);

  int degree() const { return degree_; }
  cd coeff(int k) const;
  void set_coeff(int k, cd v);

  TrigPoly padded(int degree) const;
  // Drop modes beyond `degree`; if `discarded` is non-null it receives the
  // l2 mass of the dropped modes.
  TrigPoly truncated(int degree, double* discarded = nullptr) const;

  cd eval_theta(double theta) const;
  cd eval_circle(cd z) const;  // |z| = 1 assumed; z^{-k} taken as conj(z)^k
  std::vector<cd> grid_values(int M) const;

  TrigPoly operator+(const TrigPoly& o) const;
  TrigPoly operator-(const TrigPoly& o) const;
  TrigPoly operator*(cd s) const;
  TrigPoly operator-() const;

  TrigPoly conjugated() const;        // pointwise complex conjugate
  TrigPoly theta_derivative() const;  // d/dtheta
  TrigPoly frequency_shift(int m) const;  // multiply by z^m

  TrigPoly analytic_part() const;          // modes k >= 0
  TrigPoly negative_part() const;          // modes k < 0
  std::pair<TrigPoly, TrigPoly> riesz_split() const;

  cd mean() const { return coeff(0); }
  double l2_norm() const;
  double sup_norm(int grid = 0) const;  // grid 0 -> 4N+1 points
  double max_abs_coeff() const;

  bool is_real(double tol = 1e-11) const;
  bool is_analytic(double tol = 1e-11) const;

private:
  int degree_;
  std::vector<cd> c_;  // size 2N+1, c_[k+N]
};

// Convolution product, truncated to `working_degree` (default:
// max of the operand degrees). Dropped l2 mass goes to `discarded`.
TrigPoly multiply(const TrigPoly& a, const TrigPoly& b,
                  int working_degree = -1, double* discarded = nullptr);

// Harmonic conjugate u~ with u~(0) = 0; rejects non-real input.
TrigPoly harmonic_conjugate(const TrigPoly& u);

// Winding number by phase-increment summation with adaptive grid doubling.
int winding_number(const TrigPoly& f, int grid_size = 256,
                   double zero_tol = 1e-10);

// Continuous-branch logarithm of a nonvanishing winding-zero function.
TrigPoly log_winding_zero(const TrigPoly& f, double zero_tol = 1e-10);

// Horner evaluation of an analytic TrigPoly at |z0| < 1.
cd eval_interior(const TrigPoly& f, cd z0);

struct SobolevNorm {
  double C = 1.0;
};

// sqrt(C sum |f_k|^2 + sum k^2 |f_k|^2)
double w12_norm(const TrigPoly& f, const SobolevNorm& n = {});

}  // namespace rh
