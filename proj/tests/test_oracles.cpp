#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "rh/constraints.hpp"
#include "rh/errors.hpp"
#include "rh/oracles.hpp"

using namespace rh;
using nlohmann::json;

namespace {

json trig_json(int degree, std::vector<std::pair<double, double>> coeffs) {
  json j;
  j["degree"] = degree;
  json arr = json::array();
  for (auto [re, im] : coeffs) arr.push_back({re, im});
  j["coeffs"] = arr;
  return j;
}

DfPtr ball_family(json sel) {
  json spec;
  spec["family"] = "shifted_ball";
  spec["n"] = 1;
  spec["R"] = 8.0;
  spec["S"] = json::array({std::move(sel)});
  return make_family(spec);
}

}  // namespace

TEST_CASE("nehari closed forms") {
  // conj z: 1x1 Hankel matrix [1]
  TrigPoly c(1);
  c.set_coeff(-1, 1.0);
  const NehariResult r1 = nehari(c);
  CHECK(r1.gamma == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r1.hankel_dim == 1);

  // analytic symbol: distance zero
  TrigPoly an(2);
  an.set_coeff(0, 3.0);
  an.set_coeff(1, 1.0);
  CHECK(nehari(an).gamma == doctest::Approx(0.0));

  // two negative modes: sigma_max of [[1, 0.5], [0.5, 0]] = (1+sqrt 2)/2
  TrigPoly c2(2);
  c2.set_coeff(-1, 1.0);
  c2.set_coeff(-2, 0.5);
  const NehariResult r2 = nehari(c2);
  CHECK(r2.hankel_dim == 2);
  CHECK(r2.gamma ==
        doctest::Approx((1.0 + std::sqrt(2.0)) / 2.0).epsilon(1e-13));
}

TEST_CASE("nehari ignores analytic perturbations") {
  std::mt19937 rng(41);
  std::normal_distribution<double> nd;
  TrigPoly c(3);
  c.set_coeff(-1, cd(0.7, 0.2));
  c.set_coeff(-2, cd(-0.3, 0.1));
  c.set_coeff(-3, cd(0.05, -0.4));
  const double base = nehari(c).gamma;
  for (int trial = 0; trial < 5; ++trial) {
    TrigPoly shifted = c;
    for (int k = 0; k <= 3; ++k)
      shifted.set_coeff(k, cd(nd(rng), nd(rng)));
    CHECK(std::abs(nehari(shifted).gamma - base) <= 1e-12);
  }
}

TEST_CASE("convex minimax on circular fibers") {
  const MinimaxResult r = convex_minimax(*ball_family(trig_json(
                              1, {{1, 0}, {0, 0}, {0, 0}})), 8);
  CHECK(r.gamma_upper >= 1.0 - 1e-9);
  CHECK(r.gamma_upper <= 1.0 + 1e-4);
  CHECK(r.f_opt.is_analytic(1e-10));

  // analytic center: the center itself is a feasible zero-cost choice
  const MinimaxResult z = convex_minimax(*ball_family(trig_json(
                              1, {{0, 0}, {1, 0}, {0.5, 0}})), 4);
  CHECK(z.gamma_upper <= 1e-10);
}

TEST_CASE("convex minimax degree monotonicity and nehari bound") {
  DfPtr df = ball_family(trig_json(2, {{0.5, 0}, {1, 0}, {0, 0}, {0, 0}, {0, 0}}));
  const double g4 = convex_minimax(*df, 4).gamma_upper;
  const double g8 = convex_minimax(*df, 8).gamma_upper;
  const double g16 = convex_minimax(*df, 16).gamma_upper;
  CHECK(g8 <= g4 + 1e-12);
  CHECK(g16 <= g8 + 1e-12);

  TrigPoly c(2);
  c.set_coeff(-1, 1.0);
  c.set_coeff(-2, 0.5);
  const double lower = nehari(c).gamma;
  CHECK(g16 >= lower - 1e-12);
  CHECK(g16 <= lower + 1e-3);
}

TEST_CASE("composition derivative remainder decays linearly") {
  DfPtr df = ball_family(trig_json(1, {{1, 0}, {0, 0}, {0, 0}}));
  std::vector<TrigPoly> f{TrigPoly::constant(3.0) + TrigPoly::harmonic(1, 0.2)};
  const CompDerivReport rep = composition_derivative_check(
      *df, f, {1e-2, 1e-3, 1e-4, 1e-5});
  CHECK(rep.pass);
  CHECK(rep.slope >= 0.9);
  CHECK(rep.slope <= 1.1);
  CHECK(rep.ratios.size() == 4);
  // ratios decay with the scale
  for (size_t i = 1; i < rep.ratios.size(); ++i)
    CHECK(rep.ratios[i] < rep.ratios[i - 1]);
}

TEST_CASE("composition derivative check on star fibers") {
  json spec;
  spec["family"] = "star_fiber";
  spec["n"] = 1;
  spec["R"] = 8.0;
  spec["S"] = json::array({trig_json(1, {{1, 0}, {0, 0}, {0, 0}})});
  spec["params"]["profile"] =
      json::array({json::array({0, trig_json(0, {{1, 0}})}),
                   json::array({1, trig_json(0, {{0.025, 0}})}),
                   json::array({-1, trig_json(0, {{0.025, 0}})})});
  DfPtr df = make_family(spec);
  std::vector<TrigPoly> f{TrigPoly::constant(cd(2.5, 0.5))};
  const CompDerivReport rep = composition_derivative_check(
      *df, f, {1e-2, 1e-3, 1e-4, 1e-5});
  CHECK(rep.slope >= 0.9);
  CHECK(rep.slope <= 1.1);
}
