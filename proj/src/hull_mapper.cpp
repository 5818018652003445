#include "rh/hull_mapper.hpp"

#include <cmath>
#include <sstream>

#include "rh/errors.hpp"
#include "rh/hinfty.hpp"
#include "rh/json_io.hpp"

namespace rh {

namespace {

struct FiberProblem {
  DfPtr dfr;   // pulled back and recentered; fibers enclose 0
  VecC c0;     // center value at the base point
};

// Pull the problem back so the base point sits at 0, then shift the
// analytic center to the origin. Non-analytic selectors are twisted first,
// so hull queries then concern the twisted problem.
FiberProblem prepare(DfPtr df, cd z0, double rot) {
  if (std::abs(z0) >= 1.0)
    throw InteriorPointExpected("hull base point must satisfy |z0| < 1");
  std::vector<TrigPoly> S = df->selector_poly();
  bool analytic = true;
  for (const auto& s : S) analytic = analytic && s.is_analytic();
  if (!analytic) {
    const int m = minimal_m(S);
    df = twist(df, m);
    S = df->selector_poly();
  }
  FiberProblem fp;
  const int n = df->dim();
  fp.c0 = VecC(n);
  for (int j = 0; j < n; ++j) fp.c0[j] = eval_interior(S[j], z0);
  if (std::abs(z0) < 1e-14 && rot == 0.0) {
    fp.dfr = recenter(df, S);
  } else {
    DfPtr pulled = mobius_pullback(df, z0, rot);
    auto center = [S, z0, rot](cd zeta) {
      const cd z = mobius_map(zeta, z0, rot);
      VecC c(static_cast<Eigen::Index>(S.size()));
      for (size_t j = 0; j < S.size(); ++j)
        c[static_cast<Eigen::Index>(j)] = S[j].eval_circle(z);
      return c;
    };
    fp.dfr = recenter(pulled, center, fp.c0);
  }
  return fp;
}

StartChart ray_chart(const FiberProblem& fp, const VecC& dir, double s0,
                     const HullOpts& opts) {
  const int n = static_cast<int>(fp.c0.size());
  std::vector<TrigPoly> center(n, TrigPoly(0));
  return make_start_chart(*fp.dfr, center, VecC(s0 * dir), opts.degree,
                          opts.track.solver);
}

}  // namespace

FiberBoundarySample fiber_boundary(DfPtr df, cd z0,
                                   const std::vector<VecC>& rays,
                                   const HullOpts& opts) {
  const FiberProblem fp = prepare(df, z0, opts.mobius_rot);
  FiberBoundarySample out;
  out.z0 = z0;
  out.center = fp.c0;

  for (const VecC& ray : rays) {
    if (ray.norm() < 1e-14)
      throw std::invalid_argument("fiber_boundary: zero ray direction");
    const VecC u = ray / ray.norm();
    const StartChart chart = ray_chart(fp, u, 1.0, opts);
    auto P = [&](double r) {
      return p_value(chart, VecC(r * u), *fp.dfr, opts.track);
    };
    // bracket P = 1
    double r_hi = 1.0, r_lo = 0.0;
    double p_hi = P(r_hi);
    const double cap = 4.0 * std::max(1.0, df->outer_radius());
    if (p_hi < 1.0) {
      r_lo = r_hi;
      while (p_hi < 1.0) {
        r_hi *= 2.0;
        if (r_hi > cap)
          throw RayMissesLevel("P stays below 1 along the ray segment");
        r_lo = r_hi / 2.0;
        p_hi = P(r_hi);
      }
    } else {
      r_lo = 0.5 * r_hi;
      while (P(r_lo) >= 1.0) {
        r_hi = r_lo;
        r_lo *= 0.5;
        if (r_lo < 1e-12)
          throw RayMissesLevel("P exceeds 1 arbitrarily close to the center");
      }
    }
    while (r_hi - r_lo > opts.radius_tol * std::max(1.0, r_hi)) {
      const double mid = 0.5 * (r_lo + r_hi);
      (P(mid) < 1.0 ? r_lo : r_hi) = mid;
    }
    const double r = 0.5 * (r_lo + r_hi);
    const PathResult tr = track(chart, {chart.base_anchor(), VecC(r * u)},
                                *fp.dfr, opts.track);
    if (tr.status != PathStatus::reached)
      throw NoConvergence("fiber_boundary: witness continuation failed");
    out.rays.push_back(u);
    out.radius.push_back(r);
    out.boundary.push_back(fp.c0 + r * u);
    out.witnesses.push_back(tr.terminal());
  }
  return out;
}

std::pair<bool, std::optional<DiscState>> hull_membership(
    DfPtr df, cd z0, const VecC& w0, const HullOpts& opts) {
  const FiberProblem fp = prepare(df, z0, opts.mobius_rot);
  const VecC d = w0 - fp.c0;
  if (d.norm() < 1e-10)
    return {true, std::nullopt};  // the center value itself; P = 0
  const VecC u = d / d.norm();
  const StartChart chart = ray_chart(fp, u, std::max(1.0, 2.0 * d.norm()), opts);
  const PathResult tr =
      track(chart, {chart.base_anchor(), VecC(d)}, *fp.dfr, opts.track);
  if (tr.status == PathStatus::level_collapsed) return {true, std::nullopt};
  if (tr.status != PathStatus::reached)
    throw NoConvergence("hull_membership: continuation failed");
  const double p = tr.terminal().t;
  if (p <= 1.0 + opts.inside_tol) return {true, tr.terminal()};
  return {false, std::nullopt};
}

nlohmann::ordered_json FiberBoundarySample::to_json() const {
  nlohmann::ordered_json j;
  j["z0"] = {z0.real(), z0.imag()};
  auto c = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < center.size(); ++i)
    c.push_back({center[i].real(), center[i].imag()});
  j["center"] = c;
  auto arr = nlohmann::ordered_json::array();
  for (size_t i = 0; i < rays.size(); ++i) {
    nlohmann::ordered_json e;
    auto r = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < rays[i].size(); ++k)
      r.push_back({rays[i][k].real(), rays[i][k].imag()});
    e["ray"] = r;
    e["radius"] = radius[i];
    auto b = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < boundary[i].size(); ++k)
      b.push_back({boundary[i][k].real(), boundary[i][k].imag()});
    e["boundary"] = b;
    e["witness"] = disc_state_to_json(witnesses[i]);
    arr.push_back(e);
  }
  j["samples"] = arr;
  return j;
}

std::string FiberBoundarySample::to_csv() const {
  std::ostringstream os;
  os << "ray,angle,radius\n";
  os.precision(17);
  for (size_t i = 0; i < rays.size(); ++i)
    os << i << "," << std::arg(rays[i][0]) << "," << radius[i] << "\n";
  return os.str();
}

}  // namespace rh
