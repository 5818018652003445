#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "rh/constraints.hpp"
#include "rh/errors.hpp"

using namespace rh;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json trig_json(int degree, std::vector<std::pair<double, double>> coeffs) {
  json j;
  j["degree"] = degree;
  json arr = json::array();
  for (auto [re, im] : coeffs) arr.push_back({re, im});
  j["coeffs"] = arr;
  return j;
}

json conj_z_spec() {
  json spec;
  spec["family"] = "shifted_ball";
  spec["n"] = 1;
  spec["R"] = 8.0;
  spec["S"] = json::array({trig_json(1, {{1, 0}, {0, 0}, {0, 0}})});
  return spec;
}

json zero_center_spec(int n) {
  json spec;
  spec["family"] = "shifted_ball";
  spec["n"] = n;
  spec["R"] = 8.0;
  spec["S"] = json::array();
  for (int j = 0; j < n; ++j) spec["S"].push_back(trig_json(0, {{0, 0}}));
  return spec;
}

json star_spec() {
  // r(z, th) = 1 + 0.1 cos th, strictly positive
  json spec;
  spec["family"] = "star_fiber";
  spec["n"] = 1;
  spec["R"] = 8.0;
  spec["S"] = json::array({trig_json(1, {{1, 0}, {0, 0}, {0, 0}})});
  spec["params"]["profile"] =
      json::array({json::array({0, trig_json(0, {{1, 0}})}),
                   json::array({1, trig_json(0, {{0.05, 0}})}),
                   json::array({-1, trig_json(0, {{0.05, 0}})})});
  return spec;
}

// max relative FD error of the gradient over random probes
void check_derivatives(const DefiningFunction& df, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);
  const int n = df.dim();
  int tried = 0;
  for (int trial = 0; tried < 100 && trial < 400; ++trial) {
    const cd z = std::polar(1.0, ud(rng));
    VecC w(n);
    for (int j = 0; j < n; ++j) w[j] = cd(2.0 + nd(rng), nd(rng));
    if (df.rho(z, w) < 0.5) continue;
    ++tried;
    const double h = 1e-6;
    const VecR g = df.grad_real(z, w);
    const MatR H = df.hessian(z, w);
    const double scale = std::max(1.0, g.norm());
    for (int i = 0; i < 2 * n; ++i) {
      VecR v = realify(w);
      VecR vp = v, vm = v;
      vp[i] += h;
      vm[i] -= h;
      const double fd =
          (df.rho(z, complexify(vp)) - df.rho(z, complexify(vm))) / (2 * h);
      CHECK(std::abs(g[i] - fd) <= 1e-6 * scale);
      const VecR gfd =
          (df.grad_real(z, complexify(vp)) - df.grad_real(z, complexify(vm))) /
          (2 * h);
      for (int k = 0; k < 2 * n; ++k)
        CHECK(std::abs(H(k, i) - gfd[k]) <= 1e-5 * scale);
    }
  }
  CHECK(tried == 100);
}

}  // namespace

TEST_CASE("eval_grad_hess on the round fiber") {
  DfPtr df = make_family(zero_center_spec(1));
  VecC w(1);
  w[0] = 2.0;
  const EvalResult r = eval_grad_hess(*df, cd(1.0), w);
  CHECK(r.rho == doctest::Approx(2.0));
  CHECK(std::abs(r.grad[0] - cd(0.5)) < 1e-14);
  CHECK(std::abs(r.grad_conj[0] - cd(0.5)) < 1e-14);
  CHECK((r.hess - r.hess.transpose()).norm() < 1e-14);
  // Hessian of |w| at w=2: diag(0, 1/2) in (x,y)
  CHECK(r.hess(0, 0) == doctest::Approx(0.0));
  CHECK(r.hess(1, 1) == doctest::Approx(0.5));

  VecC zero = VecC::Zero(1);
  zero[0] = df->selector(cd(1.0))[0];
  CHECK_THROWS_AS(eval_grad_hess(*df, cd(1.0), zero), EvaluationAtZeroSet);
}

TEST_CASE("gradients and Hessians match finite differences") {
  check_derivatives(*make_family(conj_z_spec()), 101);
  check_derivatives(*make_family(zero_center_spec(2)), 102);
  check_derivatives(*make_family(star_spec()), 103);
  json cvx = zero_center_spec(2);
  cvx["family"] = "convex_perturbed_ball";
  cvx["params"]["A"] = json::array(
      {json::array({trig_json(0, {{2, 0}}), trig_json(1, {{0, 0}, {0, 0}, {0.2, 0}})}),
       json::array({trig_json(1, {{0.2, 0}, {0, 0}, {0, 0}}), trig_json(0, {{1.5, 0}})})});
  check_derivatives(*make_family(cvx), 104);
}

TEST_CASE("hypoconvexity audit") {
  // n = 1: complex tangent space is trivial, vacuous pass
  const AuditReport r1 =
      hypoconvexity_audit(*make_family(conj_z_spec()), {0.5, 1.0}, 20);
  CHECK(r1.pass);
  CHECK(r1.kappa_min == std::numeric_limits<double>::infinity());

  // n = 2 round fibers at level t: kappa = 1/t
  for (double t : {0.5, 1.0, 2.0}) {
    const AuditReport r2 =
        hypoconvexity_audit(*make_family(zero_center_spec(2)), {t}, 60);
    CHECK(r2.pass);
    CHECK(r2.kappa_min == doctest::Approx(1.0 / t).epsilon(0.05));
  }

  // indefinite tangential Hessian rejected with a witness
  json broken = zero_center_spec(2);
  broken["family"] = "indefinite_test";
  broken["params"]["eps"] = 2.0;
  const AuditReport rb =
      hypoconvexity_audit(*make_family(broken), {0.5, 1.0, 2.0}, 40);
  CHECK_FALSE(rb.pass);
  CHECK(rb.kappa_min < 0.0);
  CHECK_FALSE(rb.violations.empty());
}

TEST_CASE("assumption audit") {
  const AuditReport ok = assumption_audit(*make_family(conj_z_spec()));
  CHECK(ok.pass);
  CHECK(ok.min_grad_norm > 0.0);

  // analytic selector warns: the control problem degenerates
  json an = zero_center_spec(1);
  an["S"] = json::array({trig_json(1, {{0, 0}, {1, 0}, {0.5, 0}})});
  const AuditReport wa = assumption_audit(*make_family(an));
  CHECK(wa.pass);
  CHECK_FALSE(wa.warnings.empty());

  const AuditReport st = assumption_audit(*make_family(star_spec()));
  CHECK(st.pass);
}

TEST_CASE("builtin families") {
  DfPtr df = make_family(conj_z_spec());
  VecC w(1);
  w[0] = 2.0;
  CHECK(df->rho(cd(1.0), w) == doctest::Approx(1.0));

  // star fiber with r == 1 reduces to the round fiber
  json flat = star_spec();
  flat["params"]["profile"] =
      json::array({json::array({0, trig_json(0, {{1, 0}})})});
  DfPtr sf = make_family(flat);
  DfPtr sb = make_family(conj_z_spec());
  std::mt19937 rng(55);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);
  for (int i = 0; i < 1000; ++i) {
    const cd z = std::polar(1.0, ud(rng));
    VecC p(1);
    p[0] = cd(nd(rng), nd(rng)) * 2.0;
    CHECK(std::abs(sf->rho(z, p) - sb->rho(z, p)) <= 1e-12);
  }

  CHECK_THROWS_AS(make_family(json{{"family", "nope"}}), UnknownFamily);
  json neg = star_spec();
  neg["params"]["profile"] =
      json::array({json::array({1, trig_json(0, {{1, 0}})})});  // vanishes
  CHECK_THROWS_AS(make_family(neg), NonPositiveProfile);
}

TEST_CASE("parametric family interpolates") {
  json spec;
  spec["family"] = "parametric";
  spec["left"] = conj_z_spec();
  json right = conj_z_spec();
  right["S"] = json::array({trig_json(1, {{2, 0}, {0, 0}, {0, 0}})});
  spec["right"] = right;

  DfPtr at0 = make_family_at(spec, 0.0);
  DfPtr left = make_family(conj_z_spec());
  std::mt19937 rng(77);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 50; ++i) {
    const cd z = std::polar(1.0, 0.13 * i);
    VecC w(1);
    w[0] = cd(2.0 + nd(rng), nd(rng));
    CHECK(at0->rho(z, w) == doctest::Approx(left->rho(z, w)));
  }
  CHECK(at0->parameter().has_value());
  CHECK(*make_family_at(spec, 0.25)->parameter() == doctest::Approx(0.25));
  // midpoint: selector coefficient is the average
  DfPtr mid = make_family_at(spec, 0.5);
  CHECK(std::abs(mid->selector_poly()[0].coeff(-1) - cd(1.5)) < 1e-14);
}

TEST_CASE("selector lies on the zero set") {
  for (const json& spec :
       {conj_z_spec(), zero_center_spec(2), star_spec()}) {
    DfPtr df = make_family(spec);
    for (int i = 0; i < 100; ++i) {
      const cd z = std::polar(1.0, 2.0 * kPi * i / 100.0);
      CHECK(df->rho(z, df->selector(z)) <= 1e-12);
    }
  }
}

TEST_CASE("twist") {
  DfPtr df = make_family(conj_z_spec());
  DfPtr tw = twist(df, 1);
  // |w/z - conj z| = |w - 1| on the circle
  std::mt19937 rng(91);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 200; ++i) {
    const cd z = std::polar(1.0, 0.031 * i);
    VecC w(1);
    w[0] = cd(nd(rng), nd(rng)) * 2.0;
    CHECK(tw->rho(z, w) == doctest::Approx(std::abs(w[0] - cd(1.0))));
  }
  // twisted selector z * conj z = 1 is analytic
  CHECK(tw->selector_poly()[0].is_analytic(1e-12));
  CHECK(std::abs(tw->selector_poly()[0].coeff(0) - cd(1.0)) < 1e-13);
  check_derivatives(*tw, 105);

  // hypoconvexity is preserved by the unitary fiber map
  json n2 = zero_center_spec(2);
  n2["S"] = json::array({trig_json(1, {{1, 0}, {0, 0}, {0, 0}}),
                         trig_json(0, {{0, 0}})});
  const AuditReport before =
      hypoconvexity_audit(*make_family(n2), {0.5, 1.0}, 30);
  const AuditReport after =
      hypoconvexity_audit(*twist(make_family(n2), 1), {0.5, 1.0}, 30);
  CHECK(before.pass);
  CHECK(after.pass);
}

TEST_CASE("recenter and mobius") {
  DfPtr df = make_family(conj_z_spec());
  DfPtr tw = twist(df, 1);  // |w - 1|
  std::vector<TrigPoly> c{TrigPoly::constant(1.0)};
  DfPtr rc = recenter(tw, c);  // |w|
  VecC w(1);
  w[0] = cd(0.3, 0.4);
  CHECK(rc->rho(cd(1.0), w) == doctest::Approx(0.5));
  CHECK(rc->selector_poly()[0].max_abs_coeff() < 1e-13);
  check_derivatives(*rc, 106);

  CHECK(std::abs(mobius_map(cd(0.0), cd(0.5)) - cd(0.5)) < 1e-15);
  // the pullback maps the circle to the circle
  DfPtr pb = mobius_pullback(df, cd(0.5));
  for (int i = 0; i < 50; ++i) {
    const cd zeta = std::polar(1.0, 0.13 * i);
    CHECK(std::abs(std::abs(mobius_map(zeta, cd(0.5))) - 1.0) < 1e-13);
    VecC p(1);
    p[0] = cd(3.0, 1.0);
    CHECK(pb->rho(zeta, p) ==
          doctest::Approx(df->rho(mobius_map(zeta, cd(0.5)), p)));
  }
  check_derivatives(*pb, 107);
}
