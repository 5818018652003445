#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "rh/constraints.hpp"
#include "rh/errors.hpp"
#include "rh/hull_mapper.hpp"

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

DfPtr ball_family(json sel, int n = 1) {
  json spec;
  spec["family"] = "shifted_ball";
  spec["n"] = n;
  spec["R"] = 8.0;
  json S = json::array({std::move(sel)});
  for (int j = 1; j < n; ++j) S.push_back(trig_json(0, {{0, 0}}));
  spec["S"] = S;
  return make_family(spec);
}

// fibers |w - (1 + z/2)|: the hull fiber over z0 is the unit circle
// around 1 + z0/2
DfPtr analytic_center_family() {
  return ball_family(trig_json(1, {{0, 0}, {1, 0}, {0.5, 0}}));
}

HullOpts tight() {
  HullOpts o;
  o.radius_tol = 1e-9;
  return o;
}

std::vector<VecC> circle_rays(int count) {
  std::vector<VecC> rays;
  for (int i = 0; i < count; ++i) {
    VecC r(1);
    r[0] = std::polar(1.0, 2.0 * kPi * i / count);
    rays.push_back(r);
  }
  return rays;
}

}  // namespace

TEST_CASE("fiber boundary over the origin is the unit circle") {
  DfPtr df = analytic_center_family();
  const FiberBoundarySample fb = fiber_boundary(df, 0.0, circle_rays(8), tight());
  REQUIRE(fb.center.size() == 1);
  CHECK(std::abs(fb.center[0] - cd(1.0)) < 1e-8);
  REQUIRE(fb.radius.size() == 8);
  for (size_t i = 0; i < fb.radius.size(); ++i) {
    CHECK(std::abs(fb.radius[i] - 1.0) <= 1e-8);
    CHECK(std::abs(fb.boundary[i][0] - (fb.center[0] + fb.rays[i][0])) <= 1e-7);
    CHECK(std::abs(fb.witnesses[i].t - 1.0) <= 1e-6);
  }
}

TEST_CASE("fiber boundary over an interior base point") {
  DfPtr df = analytic_center_family();
  const FiberBoundarySample fb = fiber_boundary(df, 0.5, circle_rays(6), tight());
  CHECK(std::abs(fb.center[0] - cd(1.25)) < 1e-8);
  for (double r : fb.radius) CHECK(std::abs(r - 1.0) <= 1e-8);
}

TEST_CASE("spherical fibers in two dimensions") {
  DfPtr df = ball_family(trig_json(0, {{0, 0}}), 2);
  std::vector<VecC> rays;
  VecC e1 = VecC::Zero(2), e2 = VecC::Zero(2), mix = VecC::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  mix[0] = cd(0.6, 0.0);
  mix[1] = cd(0.0, 0.8);
  rays = {e1, e2, mix};
  const FiberBoundarySample fb = fiber_boundary(df, 0.0, rays, tight());
  CHECK(fb.center.norm() < 1e-8);
  for (double r : fb.radius) CHECK(std::abs(r - 1.0) <= 1e-8);
}

TEST_CASE("membership queries") {
  DfPtr df = analytic_center_family();
  VecC w(1);

  w[0] = cd(1.5);  // P = 0.5, strictly inside
  auto [in1, wit1] = hull_membership(df, 0.0, w);
  CHECK(in1);
  REQUIRE(wit1.has_value());
  CHECK(wit1->t <= 1.0 + 1e-8);

  w[0] = cd(2.5);  // P = 1.5, outside
  auto [in2, wit2] = hull_membership(df, 0.0, w);
  CHECK_FALSE(in2);

  w[0] = cd(2.0);  // P = 1, on the boundary
  auto [in3, wit3] = hull_membership(df, 0.0, w);
  CHECK(in3);
  REQUIRE(wit3.has_value());
  CHECK(wit3->t == doctest::Approx(1.0).epsilon(1e-7));

  // the center itself is inside without needing a disc
  w[0] = cd(1.0);
  auto [in4, wit4] = hull_membership(df, 0.0, w);
  CHECK(in4);
}

TEST_CASE("witness disc stays inside the level set") {
  DfPtr df = analytic_center_family();
  VecC w(1);
  w[0] = cd(1.4, 0.3);
  auto [inside, wit] = hull_membership(df, 0.0, w);
  REQUIRE(inside);
  REQUIRE(wit.has_value());
  // witness coordinates are recentered; the level is the distance to the
  // pulled-back center, which for this point is |w0 - 1 - z0/2| = 0.5
  CHECK(wit->t <= 1.0 + 1e-8);
  CHECK(wit->t == doctest::Approx(std::abs(w[0] - cd(1.0))).epsilon(1e-7));
}

TEST_CASE("Moebius renormalization does not move the boundary") {
  DfPtr df = analytic_center_family();
  HullOpts plain, rotated;
  rotated.mobius_rot = 0.7;
  const FiberBoundarySample a = fiber_boundary(df, 0.3, circle_rays(4), plain);
  const FiberBoundarySample b =
      fiber_boundary(df, 0.3, circle_rays(4), rotated);
  for (size_t i = 0; i < a.radius.size(); ++i)
    CHECK(std::abs(a.radius[i] - b.radius[i]) <= 1e-7);
}

TEST_CASE("base point must be interior") {
  DfPtr df = analytic_center_family();
  CHECK_THROWS_AS(fiber_boundary(df, cd(1.0), circle_rays(2)),
                  InteriorPointExpected);
  VecC w(1);
  w[0] = 1.0;
  CHECK_THROWS_AS(hull_membership(df, cd(0.0, 1.2), w),
                  InteriorPointExpected);
}

TEST_CASE("non-analytic selectors go through the twist") {
  // fibers |w - conj z|: over z0 = 0 the hull fiber is the unit disc at 0
  DfPtr df = ball_family(trig_json(1, {{1, 0}, {0, 0}, {0, 0}}));
  const FiberBoundarySample fb = fiber_boundary(df, 0.0, circle_rays(4), tight());
  // the reported center lives in the twisted coordinates; only the radii
  // are invariant, and for |w - conj z| the hull fiber is the unit disc
  for (double r : fb.radius) CHECK(std::abs(r - 1.0) <= 1e-7);
}

TEST_CASE("serialization") {
  DfPtr df = analytic_center_family();
  const FiberBoundarySample fb = fiber_boundary(df, 0.0, circle_rays(3));
  const json j = fb.to_json();
  CHECK(j.at("z0").is_array());
  CHECK(j.at("samples").size() == 3);
  for (const auto& s : j.at("samples")) {
    CHECK(s.contains("ray"));
    CHECK(s.contains("radius"));
    CHECK(s.contains("boundary"));
    CHECK(s.contains("witness"));
  }
  const std::string csv = fb.to_csv();
  CHECK(csv.rfind("ray,angle,radius\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
