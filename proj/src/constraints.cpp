#include "rh/constraints.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rh/errors.hpp"
#include "rh/json_io.hpp"

namespace rh {

namespace {
constexpr double kPi = std::numbers::pi;
}

VecR realify(const VecC& w) {
  VecR v(2 * w.size());
  for (int j = 0; j < w.size(); ++j) {
    v[2 * j] = w[j].real();
    v[2 * j + 1] = w[j].imag();
  }
  return v;
}

VecC complexify(const VecR& v) {
  VecC w(v.size() / 2);
  for (int j = 0; j < w.size(); ++j) w[j] = cd(v[2 * j], v[2 * j + 1]);
  return w;
}

VecC DefiningFunction::grad(cd z, const VecC& w) const {
  const VecR g = grad_real(z, w);
  VecC out(dim());
  for (int j = 0; j < dim(); ++j)
    out[j] = cd(g[2 * j], -g[2 * j + 1]) * 0.5;
  return out;
}

EvalResult eval_grad_hess(const DefiningFunction& df, cd z, const VecC& w) {
  const double r = df.rho(z, w);
  if (r <= 0.0)
    throw EvaluationAtZeroSet("eval_grad_hess: rho(z,w) = 0");
  EvalResult res;
  res.rho = r;
  res.grad = df.grad(z, w);
  res.grad_conj = res.grad.conjugate();
  res.hess = df.hessian(z, w);
  return res;
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

namespace {

class ShiftedBall : public DefiningFunction {
public:
  ShiftedBall(std::vector<TrigPoly> S, double R)
      : S_(std::move(S)), R_(R) {}

  int dim() const override { return static_cast<int>(S_.size()); }
  double outer_radius() const override { return R_; }
  VecC selector(cd z) const override {
    VecC s(dim());
    for (int j = 0; j < dim(); ++j) s[j] = S_[j].eval_circle(z);
    return s;
  }
  std::vector<TrigPoly> selector_poly() const override { return S_; }

  double rho(cd z, const VecC& w) const override {
    return (w - selector(z)).norm();
  }
  VecR grad_real(cd z, const VecC& w) const override {
    const VecR d = realify(VecC(w - selector(z)));
    const double a = d.norm();
    if (a == 0.0) throw EvaluationAtZeroSet("ShiftedBall gradient at center");
    return d / a;
  }
  MatR hessian(cd z, const VecC& w) const override {
    const VecR d = realify(VecC(w - selector(z)));
    const double a = d.norm();
    if (a == 0.0) throw EvaluationAtZeroSet("ShiftedBall Hessian at center");
    const VecR u = d / a;
    return (MatR::Identity(d.size(), d.size()) - u * u.transpose()) / a;
  }

private:
  std::vector<TrigPoly> S_;
  double R_;
};

// rho = ||A(z)(w - S(z))|| with A(z) Hermitian positive definite on the circle.
class ConvexPerturbedBall : public DefiningFunction {
public:
  ConvexPerturbedBall(std::vector<TrigPoly> S,
                      std::vector<std::vector<TrigPoly>> A, double R)
      : S_(std::move(S)), A_(std::move(A)), R_(R) {}

  int dim() const override { return static_cast<int>(S_.size()); }
  double outer_radius() const override { return R_; }
  VecC selector(cd z) const override {
    VecC s(dim());
    for (int j = 0; j < dim(); ++j) s[j] = S_[j].eval_circle(z);
    return s;
  }
  std::vector<TrigPoly> selector_poly() const override { return S_; }

  double rho(cd z, const VecC& w) const override {
    return (matrix(z) * (w - selector(z))).norm();
  }
  VecR grad_real(cd z, const VecC& w) const override {
    const MatR M = realify_matrix(matrix(z));
    const VecR u = M * realify(VecC(w - selector(z)));
    const double a = u.norm();
    if (a == 0.0) throw EvaluationAtZeroSet("ConvexPerturbedBall at center");
    return M.transpose() * (u / a);
  }
  MatR hessian(cd z, const VecC& w) const override {
    const MatR M = realify_matrix(matrix(z));
    const VecR u = M * realify(VecC(w - selector(z)));
    const double a = u.norm();
    if (a == 0.0) throw EvaluationAtZeroSet("ConvexPerturbedBall at center");
    const VecR uh = u / a;
    const MatR P =
        (MatR::Identity(u.size(), u.size()) - uh * uh.transpose()) / a;
    return M.transpose() * P * M;
  }

private:
  Eigen::MatrixXcd matrix(cd z) const {
    const int n = dim();
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = A_[i][j].eval_circle(z);
    return M;
  }
  static MatR realify_matrix(const Eigen::MatrixXcd& A) {
    const int n = static_cast<int>(A.rows());
    MatR M(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        M(2 * i, 2 * j) = A(i, j).real();
        M(2 * i, 2 * j + 1) = -A(i, j).imag();
        M(2 * i + 1, 2 * j) = A(i, j).imag();
        M(2 * i + 1, 2 * j + 1) = A(i, j).real();
      }
    return M;
  }

  std::vector<TrigPoly> S_;
  std::vector<std::vector<TrigPoly>> A_;
  double R_;
};

// n = 1 star fibers: rho = |w - S(z)| / r(z, arg(w - S(z))).
// The profile r is a trig polynomial in both arguments,
//   r(z, th) = sum_l b_l(z) e^{i l th},  real-valued and positive.
class StarFiber : public DefiningFunction {
public:
  StarFiber(TrigPoly S, std::vector<std::pair<int, TrigPoly>> profile,
            double R)
      : S_(std::move(S)), profile_(std::move(profile)), R_(R) {
    // positivity / reality check on a coarse grid
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) {
        const cd z = std::polar(1.0, 2.0 * kPi * i / 64);
        const cd rv = profile_value(z, 2.0 * kPi * j / 64, 0);
        if (std::abs(rv.imag()) > 1e-10)
          throw NonPositiveProfile("star_fiber: profile not real-valued");
        if (rv.real() <= 1e-10)
          throw NonPositiveProfile("star_fiber: profile not positive");
      }
  }

  int dim() const override { return 1; }
  double outer_radius() const override { return R_; }
  VecC selector(cd z) const override {
    VecC s(1);
    s[0] = S_.eval_circle(z);
    return s;
  }
  std::vector<TrigPoly> selector_poly() const override { return {S_}; }

  double rho(cd z, const VecC& w) const override {
    const cd d = w[0] - S_.eval_circle(z);
    const double a = std::abs(d);
    if (a == 0.0) return 0.0;
    return a / profile_value(z, std::arg(d), 0).real();
  }
  VecR grad_real(cd z, const VecC& w) const override {
    return derivs(z, w).first;
  }
  MatR hessian(cd z, const VecC& w) const override {
    return derivs(z, w).second;
  }

private:
  // d^o/dth^o of the profile at (z, th)
  cd profile_value(cd z, double th, int order) const {
    cd acc(0.0);
    for (const auto& [l, b] : profile_) {
      cd fac(1.0);
      for (int o = 0; o < order; ++o) fac *= cd(0.0, l);
      acc += fac * b.eval_circle(z) * std::polar(1.0, l * th);
    }
    return acc;
  }

  std::pair<VecR, MatR> derivs(cd z, const VecC& w) const {
    const cd d = w[0] - S_.eval_circle(z);
    const double x = d.real(), y = d.imag();
    const double a = std::abs(d);
    if (a == 0.0) throw EvaluationAtZeroSet("StarFiber at center");
    const double th = std::arg(d);
    const double r = profile_value(z, th, 0).real();
    const double rt = profile_value(z, th, 1).real();
    const double rtt = profile_value(z, th, 2).real();
    const double g = 1.0 / r;
    const double gp = -rt / (r * r);
    const double gpp = (2.0 * rt * rt - r * rtt) / (r * r * r);

    const double ax = x / a, ay = y / a;
    const double a2 = a * a;
    const double tx = -y / a2, ty = x / a2;
    const double axx = y * y / (a2 * a), axy = -x * y / (a2 * a),
                 ayy = x * x / (a2 * a);
    const double a4 = a2 * a2;
    const double txx = 2.0 * x * y / a4, txy = (y * y - x * x) / a4,
                 tyy = -2.0 * x * y / a4;

    VecR grad(2);
    grad[0] = ax * g + a * gp * tx;
    grad[1] = ay * g + a * gp * ty;

    MatR H(2, 2);
    H(0, 0) = axx * g + 2.0 * ax * gp * tx + a * gpp * tx * tx + a * gp * txx;
    H(0, 1) = axy * g + ax * gp * ty + ay * gp * tx + a * gpp * tx * ty +
              a * gp * txy;
    H(1, 0) = H(0, 1);
    H(1, 1) = ayy * g + 2.0 * ay * gp * ty + a * gpp * ty * ty + a * gp * tyy;
    return {grad, H};
  }

  TrigPoly S_;
  std::vector<std::pair<int, TrigPoly>> profile_;
  double R_;
};

// n = 2 family with an indefinite tangential Hessian,
//   rho = ||w - S|| + eps Re((w_2 - S_2)^2) / ||w - S||.
// Violates (1) for large eps; shipped for negative audit tests.
class IndefiniteTest : public DefiningFunction {
public:
  IndefiniteTest(std::vector<TrigPoly> S, double eps, double R)
      : S_(std::move(S)), eps_(eps), R_(R) {}

  int dim() const override { return 2; }
  double outer_radius() const override { return R_; }
  VecC selector(cd z) const override {
    VecC s(2);
    s[0] = S_[0].eval_circle(z);
    s[1] = S_[1].eval_circle(z);
    return s;
  }
  std::vector<TrigPoly> selector_poly() const override { return S_; }

  double rho(cd z, const VecC& w) const override {
    const VecR d = realify(VecC(w - selector(z)));
    const double a = d.norm();
    if (a == 0.0) return 0.0;
    const double q = d[2] * d[2] - d[3] * d[3];
    return a + eps_ * q / a;
  }
  VecR grad_real(cd z, const VecC& w) const override {
    const VecR d = realify(VecC(w - selector(z)));
    const double a = d.norm();
    if (a == 0.0) throw EvaluationAtZeroSet("IndefiniteTest at center");
    const double q = d[2] * d[2] - d[3] * d[3];
    VecR gq = VecR::Zero(4);
    gq[2] = 2.0 * d[2];
    gq[3] = -2.0 * d[3];
    const VecR ah = d / a;
    return ah + eps_ * (gq / a - q * ah / (a * a));
  }
  MatR hessian(cd z, const VecC& w) const override {
    const VecR d = realify(VecC(w - selector(z)));
    const double a = d.norm();
    if (a == 0.0) throw EvaluationAtZeroSet("IndefiniteTest at center");
    const double q = d[2] * d[2] - d[3] * d[3];
    VecR gq = VecR::Zero(4);
    gq[2] = 2.0 * d[2];
    gq[3] = -2.0 * d[3];
    MatR Hq = MatR::Zero(4, 4);
    Hq(2, 2) = 2.0;
    Hq(3, 3) = -2.0;
    const VecR ah = d / a;
    const MatR Ha = (MatR::Identity(4, 4) - ah * ah.transpose()) / a;
    MatR Hf = Hq / a - (gq * ah.transpose() + ah * gq.transpose()) / (a * a) -
              q * Ha / (a * a) +
              2.0 * q * (ah * ah.transpose()) / (a * a * a);
    return Ha + eps_ * Hf;
  }

private:
  std::vector<TrigPoly> S_;
  double eps_;
  double R_;
};

std::vector<TrigPoly> selectors_from_json(const nlohmann::json& spec, int n) {
  std::vector<TrigPoly> S;
  if (spec.contains("S")) {
    for (const auto& sj : spec.at("S")) S.push_back(trigpoly_from_json(sj));
  }
  while (static_cast<int>(S.size()) < n) S.push_back(TrigPoly::constant(0.0));
  return S;
}

nlohmann::json lerp_json(const nlohmann::json& a, const nlohmann::json& b,
                         double t) {
  if (a.is_number() && b.is_number())
    return (1.0 - t) * a.get<double>() + t * b.get<double>();
  if (a.is_array() && b.is_array() && a.size() == b.size()) {
    nlohmann::json out = nlohmann::json::array();
    for (size_t i = 0; i < a.size(); ++i)
      out.push_back(lerp_json(a[i], b[i], t));
    return out;
  }
  if (a.is_object() && b.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (auto it = a.begin(); it != a.end(); ++it)
      out[it.key()] = b.contains(it.key())
                          ? lerp_json(it.value(), b.at(it.key()), t)
                          : it.value();
    return out;
  }
  return t < 0.5 ? a : b;
}

class ParameterTagged : public DefiningFunction {
public:
  ParameterTagged(DfPtr inner, double tau) : inner_(std::move(inner)), tau_(tau) {}
  int dim() const override { return inner_->dim(); }
  double outer_radius() const override { return inner_->outer_radius(); }
  std::optional<double> parameter() const override { return tau_; }
  VecC selector(cd z) const override { return inner_->selector(z); }
  std::vector<TrigPoly> selector_poly() const override {
    return inner_->selector_poly();
  }
  double rho(cd z, const VecC& w) const override { return inner_->rho(z, w); }
  VecR grad_real(cd z, const VecC& w) const override {
    return inner_->grad_real(z, w);
  }
  MatR hessian(cd z, const VecC& w) const override {
    return inner_->hessian(z, w);
  }

private:
  DfPtr inner_;
  double tau_;
};

}  // namespace

DfPtr make_family(const nlohmann::json& spec) {
  if (!spec.contains("family"))
    throw ConfigError("family spec: missing \"family\"");
  const std::string name = spec.at("family").get<std::string>();
  if (name == "parametric")
    return make_family_at(spec, spec.value("tau", 0.0));

  const double R = spec.value("R", 8.0);
  const int n = spec.value("n", 1);
  if (n < 1) throw ConfigError("family spec: n must be >= 1");

  if (name == "shifted_ball") {
    if (!spec.contains("S")) throw ConfigError("shifted_ball: missing \"S\"");
    return std::make_shared<ShiftedBall>(selectors_from_json(spec, n), R);
  }
  if (name == "star_fiber") {
    if (n != 1) throw ConfigError("star_fiber: n must be 1");
    if (!spec.contains("S")) throw ConfigError("star_fiber: missing \"S\"");
    auto S = selectors_from_json(spec, 1);
    std::vector<std::pair<int, TrigPoly>> profile;
    const auto& params = spec.value("params", nlohmann::json::object());
    if (params.contains("profile")) {
      for (const auto& entry : params.at("profile"))
        profile.emplace_back(entry.at(0).get<int>(),
                             trigpoly_from_json(entry.at(1)));
    } else {
      profile.emplace_back(0, TrigPoly::constant(1.0));
    }
    return std::make_shared<StarFiber>(S[0], std::move(profile), R);
  }
  if (name == "convex_perturbed_ball") {
    if (!spec.contains("S"))
      throw ConfigError("convex_perturbed_ball: missing \"S\"");
    auto S = selectors_from_json(spec, n);
    std::vector<std::vector<TrigPoly>> A(n, std::vector<TrigPoly>(n));
    const auto& params = spec.value("params", nlohmann::json::object());
    if (params.contains("A")) {
      const auto& Aj = params.at("A");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[i][j] = trigpoly_from_json(Aj[i][j]);
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          A[i][j] = TrigPoly::constant(i == j ? 1.0 : 0.0);
    }
    return std::make_shared<ConvexPerturbedBall>(std::move(S), std::move(A), R);
  }
  if (name == "indefinite_test") {
    auto S = selectors_from_json(spec, 2);
    const double eps =
        spec.value("params", nlohmann::json::object()).value("eps", 2.0);
    return std::make_shared<IndefiniteTest>(std::move(S), eps, R);
  }
  throw UnknownFamily("unknown family \"" + name + "\"");
}

DfPtr make_family_at(const nlohmann::json& spec, double tau) {
  if (spec.value("family", "") == "parametric") {
    if (!spec.contains("left") || !spec.contains("right"))
      throw ConfigError("parametric: missing \"left\"/\"right\"");
    nlohmann::json inner = lerp_json(spec.at("left"), spec.at("right"), tau);
    return std::make_shared<ParameterTagged>(make_family(inner), tau);
  }
  return std::make_shared<ParameterTagged>(make_family(spec), tau);
}

// ---------------------------------------------------------------------------
// Wrappers
// ---------------------------------------------------------------------------

namespace {

MatR rotation_block(cd phase, int n) {
  MatR Q = MatR::Zero(2 * n, 2 * n);
  const double c = phase.real(), s = phase.imag();
  for (int j = 0; j < n; ++j) {
    Q(2 * j, 2 * j) = c;
    Q(2 * j, 2 * j + 1) = -s;
    Q(2 * j + 1, 2 * j) = s;
    Q(2 * j + 1, 2 * j + 1) = c;
  }
  return Q;
}

class Twisted : public DefiningFunction {
public:
  Twisted(DfPtr inner, int m) : inner_(std::move(inner)), m_(m) {}
  int dim() const override { return inner_->dim(); }
  double outer_radius() const override { return inner_->outer_radius(); }
  std::optional<double> parameter() const override {
    return inner_->parameter();
  }
  VecC selector(cd z) const override {
    return std::pow(z, m_) * inner_->selector(z);
  }
  std::vector<TrigPoly> selector_poly() const override {
    std::vector<TrigPoly> out;
    for (const auto& s : inner_->selector_poly())
      out.push_back(s.frequency_shift(m_));
    return out;
  }
  double rho(cd z, const VecC& w) const override {
    return inner_->rho(z, VecC(std::pow(std::conj(z), m_) * w));
  }
  VecR grad_real(cd z, const VecC& w) const override {
    const cd ph = std::pow(std::conj(z), m_);
    const MatR Q = rotation_block(ph, dim());
    return Q.transpose() * inner_->grad_real(z, VecC(ph * w));
  }
  MatR hessian(cd z, const VecC& w) const override {
    const cd ph = std::pow(std::conj(z), m_);
    const MatR Q = rotation_block(ph, dim());
    return Q.transpose() * inner_->hessian(z, VecC(ph * w)) * Q;
  }

private:
  DfPtr inner_;
  int m_;
};

class Recentered : public DefiningFunction {
public:
  Recentered(DfPtr inner, std::function<VecC(cd)> c,
             std::vector<TrigPoly> c_poly)
      : inner_(std::move(inner)), c_(std::move(c)), c_poly_(std::move(c_poly)) {}

  int dim() const override { return inner_->dim(); }
  double outer_radius() const override { return inner_->outer_radius(); }
  std::optional<double> parameter() const override {
    return inner_->parameter();
  }
  VecC selector(cd z) const override {
    return inner_->selector(z) - c_(z);
  }
  std::vector<TrigPoly> selector_poly() const override {
    std::vector<TrigPoly> inner = inner_->selector_poly();
    if (c_poly_.empty()) return inner;  // Moebius-composed center: inexact
    std::vector<TrigPoly> out;
    for (int j = 0; j < dim(); ++j) out.push_back(inner[j] - c_poly_[j]);
    return out;
  }
  double rho(cd z, const VecC& w) const override {
    return inner_->rho(z, VecC(w + c_(z)));
  }
  VecR grad_real(cd z, const VecC& w) const override {
    return inner_->grad_real(z, VecC(w + c_(z)));
  }
  MatR hessian(cd z, const VecC& w) const override {
    return inner_->hessian(z, VecC(w + c_(z)));
  }

private:
  DfPtr inner_;
  std::function<VecC(cd)> c_;
  std::vector<TrigPoly> c_poly_;
};

class MobiusPulled : public DefiningFunction {
public:
  MobiusPulled(DfPtr inner, cd z0, double rot)
      : inner_(std::move(inner)), z0_(z0), rot_(rot) {}
  int dim() const override { return inner_->dim(); }
  double outer_radius() const override { return inner_->outer_radius(); }
  VecC selector(cd z) const override {
    return inner_->selector(mobius_map(z, z0_, rot_));
  }
  std::vector<TrigPoly> selector_poly() const override {
    // projection of the composed selector; exact values come from selector()
    const int d = 4 * std::max(1, max_selector_degree());
    std::vector<TrigPoly> out;
    for (int j = 0; j < dim(); ++j) {
      const int M = 4 * d + 1;
      std::vector<cd> vals(M);
      for (int i = 0; i < M; ++i)
        vals[i] = selector(std::polar(1.0, 2.0 * kPi * i / M))[j];
      out.push_back(TrigPoly::from_grid(vals, d));
    }
    return out;
  }
  double rho(cd z, const VecC& w) const override {
    return inner_->rho(mobius_map(z, z0_, rot_), w);
  }
  VecR grad_real(cd z, const VecC& w) const override {
    return inner_->grad_real(mobius_map(z, z0_, rot_), w);
  }
  MatR hessian(cd z, const VecC& w) const override {
    return inner_->hessian(mobius_map(z, z0_, rot_), w);
  }

private:
  int max_selector_degree() const {
    int d = 0;
    for (const auto& s : inner_->selector_poly()) d = std::max(d, s.degree());
    return d;
  }
  DfPtr inner_;
  cd z0_;
  double rot_;
};

}  // namespace

DfPtr twist(DfPtr df, int m) {
  if (m < 1) throw std::invalid_argument("twist: m must be >= 1");
  return std::make_shared<Twisted>(std::move(df), m);
}

DfPtr recenter(DfPtr df, std::vector<TrigPoly> c) {
  auto cp = c;
  auto fn = [c = std::move(c), n = df->dim()](cd z) {
    VecC v(n);
    for (int j = 0; j < n; ++j) v[j] = c[j].eval_circle(z);
    return v;
  };
  return std::make_shared<Recentered>(std::move(df), std::move(fn),
                                      std::move(cp));
}

DfPtr recenter(DfPtr df, std::function<VecC(cd)> c_on_circle, VecC) {
  return std::make_shared<Recentered>(std::move(df), std::move(c_on_circle),
                                      std::vector<TrigPoly>{});
}

cd mobius_map(cd zeta, cd z0, double rot) {
  const cd zr = zeta * std::polar(1.0, rot);
  return (zr + z0) / (1.0 + std::conj(z0) * zr);
}

DfPtr mobius_pullback(DfPtr df, cd z0, double rot) {
  if (std::abs(z0) >= 1.0)
    throw InteriorPointExpected("mobius_pullback: |z0| >= 1");
  return std::make_shared<MobiusPulled>(std::move(df), z0, rot);
}

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

namespace {

// Find s > 0 with rho(z, S(z) + s u) = level by expansion + bisection.
std::optional<double> level_radius(const DefiningFunction& df, cd z,
                                   const VecC& u, double level) {
  const VecC S = df.selector(z);
  double lo = 0.0, hi = 0.5;
  int guard = 0;
  while (df.rho(z, VecC(S + hi * u)) < level) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60) return std::nullopt;
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (df.rho(z, VecC(S + mid * u)) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

VecC random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  VecC u(n);
  for (int j = 0; j < n; ++j) u[j] = cd(nd(rng), nd(rng));
  return u / u.norm();
}

// Minimum eigenvalue of the Hessian restricted to the realified complex
// tangent space {u : sum u_j drho/dw_j = 0}.
double tangential_min_eig(const EvalResult& e, int n) {
  // complex nullspace of the row vector grad
  Eigen::MatrixXcd row(1, n);
  for (int j = 0; j < n; ++j) row(0, j) = e.grad[j];
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(row);
  lu.setThreshold(1e-12);
  Eigen::MatrixXcd null = lu.kernel();  // n x (n-1) for nonzero grad
  if (null.cols() == 0) return std::numeric_limits<double>::infinity();
  MatR B(2 * n, 2 * null.cols());
  for (int c = 0; c < null.cols(); ++c) {
    VecC v = null.col(c);
    v /= v.norm();
    B.col(2 * c) = realify(v);
    B.col(2 * c + 1) = realify(VecC(cd(0.0, 1.0) * v));
  }
  // B need not be orthonormal across columns; solve the generalized problem.
  const MatR Hp = B.transpose() * e.hess * B;
  const MatR Gp = B.transpose() * B;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatR> es(Hp, Gp);
  return es.eigenvalues().minCoeff();
}

}  // namespace

AuditReport hypoconvexity_audit(const DefiningFunction& df,
                                const std::vector<double>& levels,
                                int samples_per_level, unsigned seed) {
  AuditReport rep;
  const int n = df.dim();
  if (n == 1) {
    // complex tangent space is {0}; vacuous pass with +inf sentinel
    rep.samples = 0;
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);
  for (double level : levels) {
    for (int s = 0; s < samples_per_level; ++s) {
      const cd z = std::polar(1.0, ud(rng));
      const VecC u = random_unit(rng, n);
      const auto rad = level_radius(df, z, u, level);
      if (!rad) continue;
      const VecC w = df.selector(z) + (*rad) * u;
      try {
        const EvalResult e = eval_grad_hess(df, z, w);
        const double lam = tangential_min_eig(e, n);
        rep.kappa_min = std::min(rep.kappa_min, lam);
        rep.min_grad_norm = std::min(rep.min_grad_norm, e.grad.norm());
        ++rep.samples;
        if (lam <= 0.0) {
          rep.pass = false;
          rep.violations.push_back(
              {"(1) strict hypoconvexity", z, w,
               "tangential Hessian eigenvalue " + std::to_string(lam)});
        }
      } catch (const EvaluationAtZeroSet&) {
      }
    }
  }
  return rep;
}

AuditReport assumption_audit(const DefiningFunction& df, int z_samples,
                             int level_samples, unsigned seed) {
  AuditReport rep;
  const int n = df.dim();
  std::mt19937_64 rng(seed);
  const double R = df.outer_radius();

  // (3f): rho vanishes exactly on the selector graph
  for (int i = 0; i < z_samples; ++i) {
    const cd z = std::polar(1.0, 2.0 * kPi * i / z_samples);
    const double r0 = df.rho(z, df.selector(z));
    ++rep.samples;
    if (std::abs(r0) > 1e-10) {
      rep.pass = false;
      rep.violations.push_back({"(3f) rho(z,S(z)) = 0", z, df.selector(z),
                                "rho = " + std::to_string(r0)});
    }
  }

  // (3b) gradient nonvanishing, and (3c) proxy: monotone rho along rays
  for (int i = 0; i < z_samples; ++i) {
    const cd z = std::polar(1.0, 2.0 * kPi * (i + 0.3) / z_samples);
    const VecC u = random_unit(rng, n);
    for (int l = 1; l <= level_samples; ++l) {
      const double level = R * l / (level_samples + 1.0);
      const auto rad = level_radius(df, z, u, level);
      if (!rad) continue;
      const VecC w = df.selector(z) + (*rad) * u;
      ++rep.samples;
      const VecC g = df.grad(z, w);
      rep.min_grad_norm = std::min(rep.min_grad_norm, g.norm());
      if (g.norm() < 1e-10) {
        rep.pass = false;
        rep.violations.push_back(
            {"(3b) D_w rho != 0", z, w, "gradient vanished"});
      }
    }
    // star-shapedness proxy along the sampled ray
    double prev = 0.0;
    bool monotone = true;
    const auto rmax = level_radius(df, z, u, 0.9 * R);
    if (rmax) {
      for (int k = 1; k <= 24; ++k) {
        const double s = *rmax * k / 24.0;
        const double r = df.rho(z, VecC(df.selector(z) + s * u));
        if (r <= prev - 1e-12) monotone = false;
        prev = r;
      }
      if (!monotone) {
        rep.pass = false;
        rep.violations.push_back({"(3c) star-shaped fibers (proxy)", z,
                                  VecC(df.selector(z)),
                                  "rho not monotone along sampled ray"});
      }
    }
  }

  // analytic selector warning
  bool analytic = true;
  for (const auto& s : df.selector_poly())
    if (!s.is_analytic(1e-12)) analytic = false;
  if (analytic)
    rep.warnings.push_back(
        "selector S is analytic: gamma = 0 and the flat-solution "
        "construction does not apply");
  return rep;
}

nlohmann::ordered_json AuditReport::to_json() const {
  nlohmann::ordered_json j;
  j["pass"] = pass;
  j["kappa_min"] = std::isfinite(kappa_min) ? nlohmann::ordered_json(kappa_min)
                                            : nlohmann::ordered_json("inf");
  j["min_grad_norm"] = std::isfinite(min_grad_norm)
                           ? nlohmann::ordered_json(min_grad_norm)
                           : nlohmann::ordered_json("inf");
  j["samples"] = samples;
  j["warnings"] = warnings;
  auto viol = nlohmann::ordered_json::array();
  for (const auto& v : violations) {
    nlohmann::ordered_json vj;
    vj["assumption"] = v.assumption;
    vj["z"] = {v.z.real(), v.z.imag()};
    auto wj = nlohmann::ordered_json::array();
    for (int k = 0; k < v.w.size(); ++k)
      wj.push_back({v.w[k].real(), v.w[k].imag()});
    vj["w"] = wj;
    vj["detail"] = v.detail;
    viol.push_back(vj);
  }
  j["violations"] = viol;
  return j;
}

}  // namespace rh
