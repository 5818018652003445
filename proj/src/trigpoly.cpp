#include "rh/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rh {

namespace {
constexpr double kPi = std::numbers::pi;
}

TrigPoly::TrigPoly(int degree) : degree_(degree), c_(2 * degree + 1, cd(0.0)) {
  if (degree < 0) throw std::invalid_argument("TrigPoly: negative degree");
}

TrigPoly::TrigPoly(int degree, std::vector<cd> coeffs)
    : degree_(degree), c_(std::move(coeffs)) {
  if (degree < 0 || c_.size() != static_cast<size_t>(2 * degree + 1))
    throw std::invalid_argument("TrigPoly: coefficient count mismatch");
}

TrigPoly TrigPoly::constant(cd v) {
  TrigPoly p(0);
  p.c_[0] = v;
  return p;
}

TrigPoly TrigPoly::harmonic(int k, cd c, int degree_hint) {
  TrigPoly p(std::max(std::abs(k), degree_hint));
  p.set_coeff(k, c);
  return p;
}

TrigPoly TrigPoly::from_grid(const std::vector<cd>& values, int degree) {
  const int M = static_cast<int>(values.size());
  if (M < 2 * degree + 1)
    throw std::invalid_argument("TrigPoly::from_grid: grid too small");
  TrigPoly p(degree);
  for (int k = -degree; k <= degree; ++k) {
    cd acc(0.0);
    for (int j = 0; j < M; ++j) {
      const double th = 2.0 * kPi * j / M;
      acc += values[j] * std::polar(1.0, -k * th);
    }
    p.set_coeff(k, acc / static_cast<double>(M));
  }
  return p;
}

cd TrigPoly::coeff(int k) const {
  if (std::abs(k) > degree_) return cd(0.0);
  return c_[k + degree_];
}

void TrigPoly::set_coeff(int k, cd v) {
  if (std::abs(k) > degree_)
    throw std::out_of_range("TrigPoly::set_coeff: index beyond degree");
  c_[k + degree_] = v;
}

TrigPoly TrigPoly::padded(int degree) const {
  if (degree < degree_)
    throw std::invalid_argument("TrigPoly::padded: smaller degree");
  TrigPoly p(degree);
  for (int k = -degree_; k <= degree_; ++k) p.set_coeff(k, coeff(k));
  return p;
}

TrigPoly TrigPoly::truncated(int degree, double* discarded) const {
  if (degree >= degree_) {
    if (discarded) *discarded = 0.0;
    return padded(degree);
  }
  TrigPoly p(degree);
  double lost = 0.0;
  for (int k = -degree_; k <= degree_; ++k) {
    if (std::abs(k) <= degree)
      p.set_coeff(k, coeff(k));
    else
      lost += std::norm(coeff(k));
  }
  if (discarded) *discarded = std::sqrt(lost);
  return p;
}

cd TrigPoly::eval_theta(double theta) const {
  // Horner in z over k >= 0 and in conj(z) over k < 0.
  const cd z = std::polar(1.0, theta);
  return eval_circle(z);
}

cd TrigPoly::eval_circle(cd z) const {
  cd pos(0.0);
  for (int k = degree_; k >= 1; --k) pos = (pos + coeff(k)) * z;
  const cd zb = std::conj(z);
  cd neg(0.0);
  for (int k = degree_; k >= 1; --k) neg = (neg + coeff(-k)) * zb;
  return pos + neg + coeff(0);
}

std::vector<cd> TrigPoly::grid_values(int M) const {
  std::vector<cd> v(M);
  for (int j = 0; j < M; ++j) v[j] = eval_theta(2.0 * kPi * j / M);
  return v;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
  const int d = std::max(degree_, o.degree_);
  TrigPoly r(d);
  for (int k = -d; k <= d; ++k) r.set_coeff(k, coeff(k) + o.coeff(k));
  return r;
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const {
  const int d = std::max(degree_, o.degree_);
  TrigPoly r(d);
  for (int k = -d; k <= d; ++k) r.set_coeff(k, coeff(k) - o.coeff(k));
  return r;
}

TrigPoly TrigPoly::operator*(cd s) const {
  TrigPoly r(*this);
  for (auto& v : r.c_) v *= s;
  return r;
}

TrigPoly TrigPoly::operator-() const { return (*this) * cd(-1.0); }

TrigPoly TrigPoly::conjugated() const {
  TrigPoly r(degree_);
  for (int k = -degree_; k <= degree_; ++k)
    r.set_coeff(k, std::conj(coeff(-k)));
  return r;
}

TrigPoly TrigPoly::theta_derivative() const {
  TrigPoly r(degree_);
  for (int k = -degree_; k <= degree_; ++k)
    r.set_coeff(k, cd(0.0, static_cast<double>(k)) * coeff(k));
  return r;
}

TrigPoly TrigPoly::frequency_shift(int m) const {
  TrigPoly r(degree_ + std::abs(m));
  for (int k = -degree_; k <= degree_; ++k) r.set_coeff(k + m, coeff(k));
  return r;
}

TrigPoly TrigPoly::analytic_part() const {
  TrigPoly r(degree_);
  for (int k = 0; k <= degree_; ++k) r.set_coeff(k, coeff(k));
  return r;
}

TrigPoly TrigPoly::negative_part() const {
  TrigPoly r(degree_);
  for (int k = -degree_; k < 0; ++k) r.set_coeff(k, coeff(k));
  return r;
}

std::pair<TrigPoly, TrigPoly> TrigPoly::riesz_split() const {
  return {analytic_part(), negative_part()};
}

double TrigPoly::l2_norm() const {
  double s = 0.0;
  for (const auto& v : c_) s += std::norm(v);
  return std::sqrt(s);
}

double TrigPoly::sup_norm(int grid) const {
  const int M = grid > 0 ? grid : 4 * degree_ + 1;
  double m = 0.0;
  for (int j = 0; j < M; ++j)
    m = std::max(m, std::abs(eval_theta(2.0 * kPi * j / M)));
  return m;
}

double TrigPoly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& v : c_) m = std::max(m, std::abs(v));
  return m;
}

bool TrigPoly::is_real(double tol) const {
  for (int k = 0; k <= degree_; ++k)
    if (std::abs(coeff(-k) - std::conj(coeff(k))) > tol) return false;
  return true;
}

bool TrigPoly::is_analytic(double tol) const {
  for (int k = -degree_; k < 0; ++k)
    if (std::abs(coeff(k)) > tol) return false;
  return true;
}

TrigPoly multiply(const TrigPoly& a, const TrigPoly& b, int working_degree,
                  double* discarded) {
  const int wd =
      working_degree >= 0 ? working_degree : std::max(a.degree(), b.degree());
  const int full = a.degree() + b.degree();
  TrigPoly conv(full);
  for (int k = -a.degree(); k <= a.degree(); ++k) {
    const cd ak = a.coeff(k);
    if (ak == cd(0.0)) continue;
    for (int l = -b.degree(); l <= b.degree(); ++l)
      conv.set_coeff(k + l, conv.coeff(k + l) + ak * b.coeff(l));
  }
  return conv.truncated(wd, discarded);
}

TrigPoly harmonic_conjugate(const TrigPoly& u) {
  if (!u.is_real(1e-9))
    throw NonRealInput("harmonic_conjugate: input is not real-valued");
  TrigPoly r(u.degree());
  for (int k = -u.degree(); k <= u.degree(); ++k) {
    if (k == 0) continue;
    const double sgn = k > 0 ? 1.0 : -1.0;
    r.set_coeff(k, cd(0.0, -sgn) * u.coeff(k));
  }
  return r;
}

int winding_number(const TrigPoly& f, int grid_size, double zero_tol) {
  constexpr int kGridCap = 1 << 16;
  constexpr double kPi = std::numbers::pi;
  int M = std::max(grid_size, 4 * f.degree() + 1);
  while (true) {
    std::vector<cd> v = f.grid_values(M);
    double minmod = std::abs(v[0]);
    for (const auto& x : v) minmod = std::min(minmod, std::abs(x));
    if (minmod <= zero_tol)
      throw NearZeroOnCircle("winding_number: function near zero on circle");
    double total = 0.0;
    bool coarse = false;
    for (int j = 0; j < M; ++j) {
      const double inc = std::arg(v[(j + 1) % M] / v[j]);
      if (std::abs(inc) >= kPi / 2) {
        coarse = true;
        break;
      }
      total += inc;
    }
    if (!coarse) return static_cast<int>(std::lround(total / (2.0 * kPi)));
    if (M * 2 > kGridCap)
      throw GridTooCoarse("winding_number: refinement cap exceeded");
    M *= 2;
  }
}

TrigPoly log_winding_zero(const TrigPoly& f, double zero_tol) {
  if (winding_number(f, 256, zero_tol) != 0)
    throw WindingNonzero("log_winding_zero: nonzero winding number");
  const int N = std::max(f.degree(), 1);
  const int M = 8 * N + 1;
  std::vector<cd> v = f.grid_values(M);
  std::vector<cd> lg(M);
  double phase = std::arg(v[0]);
  for (int j = 0; j < M; ++j) {
    if (j > 0) phase += std::arg(v[j] / v[j - 1]);
    lg[j] = cd(std::log(std::abs(v[j])), phase);
  }
  // log f is generally not band-limited; project onto degree 2N and let the
  // caller's tolerance govern. Callers needing more resolution pad first.
  return TrigPoly::from_grid(lg, 2 * N);
}

cd eval_interior(const TrigPoly& f, cd z0) {
  if (std::abs(z0) >= 1.0)
    throw InteriorPointExpected("eval_interior: |z0| >= 1");
  if (!f.is_analytic(1e-9))
    throw std::invalid_argument("eval_interior: input not analytic");
  cd acc(0.0);
  for (int k = f.degree(); k >= 0; --k) acc = acc * z0 + f.coeff(k);
  return acc;
}

double w12_norm(const TrigPoly& f, const SobolevNorm& n) {
  double s = 0.0;
  for (int k = -f.degree(); k <= f.degree(); ++k)
    s += (n.C + static_cast<double>(k) * k) * std::norm(f.coeff(k));
  return std::sqrt(s);
}

}  // namespace rh
