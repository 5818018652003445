#include "rh/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "rh/errors.hpp"
#include "rh/json_io.hpp"

namespace rh {

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::reached: return "reached";
    case PathStatus::level_collapsed: return "level_collapsed";
    default: return "failed";
  }
}

std::vector<double> PathResult::p_values() const {
  std::vector<double> p;
  p.reserve(samples.size());
  for (const auto& s : samples) p.push_back(s.state.t);
  return p;
}

namespace {

struct PiecewisePath {
  std::vector<VecC> pts;
  std::vector<double> cum;  // cumulative arclength fractions, cum.back() = 1

  explicit PiecewisePath(const std::vector<VecC>& waypoints) : pts(waypoints) {
    if (pts.size() < 2) pts.push_back(pts.back());
    double total = 0.0;
    cum.push_back(0.0);
    for (size_t i = 1; i < pts.size(); ++i) {
      total += (pts[i] - pts[i - 1]).norm();
      cum.push_back(total);
    }
    if (total <= 0.0) total = 1.0;
    for (auto& c : cum) c /= total;
    cum.back() = 1.0;
  }

  VecC at(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    size_t i = 1;
    while (i + 1 < cum.size() && cum[i] < s) ++i;
    const double lo = cum[i - 1], hi = cum[i];
    const double f = hi > lo ? (s - lo) / (hi - lo) : 1.0;
    return pts[i - 1] + f * (pts[i] - pts[i - 1]);
  }
};

DiscState extrapolate(const DiscState& prev, const DiscState& cur,
                      double factor) {
  DiscState pred = cur;
  const int N = cur.degree();
  for (int j = 0; j < cur.dim(); ++j)
    for (int k = 1; k <= N; ++k)
      pred.F[j].set_coeff(
          k, cur.F[j].coeff(k) +
                 factor * (cur.F[j].coeff(k) - prev.F[j].coeff(k)));
  pred.t = cur.t + factor * (cur.t - prev.t);
  return pred;
}

double sup_diff(const std::vector<TrigPoly>& a, const std::vector<TrigPoly>& b) {
  double m = 0.0;
  for (size_t j = 0; j < a.size(); ++j) m = std::max(m, (a[j] - b[j]).sup_norm());
  return m;
}

}  // namespace

PathResult track(const StartChart& chart, const std::vector<VecC>& waypoints,
                 const DefiningFunction& df, const TrackOpts& opts) {
  if (waypoints.empty())
    throw std::invalid_argument("track: empty path");
  const PiecewisePath path(waypoints);
  const double t_floor = opts.t_floor_factor * chart.t0;

  PathResult res;
  DiscState cur = newton_solve(chart.to_state(), path.at(0.0), df, opts.solver);
  res.samples.push_back({0.0, path.at(0.0), cur, 0.0});
  if (cur.t < t_floor) {
    res.status = PathStatus::level_collapsed;
    return res;
  }

  bool have_prev = false;
  DiscState prev;
  double s_prev = 0.0, s_cur = 0.0;
  double step = opts.step_init;
  int easy = 0;

  while (s_cur < 1.0) {
    const double s_next = std::min(1.0, s_cur + step);
    DiscState pred = cur;
    if (have_prev && s_cur > s_prev)
      pred = extrapolate(prev, cur, (s_next - s_cur) / (s_cur - s_prev));
    try {
      DiscState next = newton_solve(pred, path.at(s_next), df, opts.solver);
      prev = cur;
      s_prev = s_cur;
      have_prev = true;
      cur = next;
      s_cur = s_next;
      res.samples.push_back({s_cur, path.at(s_cur), cur, step});
      if (cur.t < t_floor) {
        res.status = PathStatus::level_collapsed;
        return res;
      }
      if (++easy >= 3) {
        step = std::min(2.0 * step, opts.step_max);
        easy = 0;
      }
    } catch (const DomainError& e) {
      ++res.rejected_steps;
      easy = 0;
      if (step <= opts.step_min) {
        // collapse of the level is a legitimate endpoint near the center
        if (cur.t < 1e-2 * chart.t0) {
          res.status = PathStatus::level_collapsed;
          res.detail = e.code();
          return res;
        }
        res.status = PathStatus::failed;
        res.detail = e.code();
        throw StepUnderflow(std::string("continuation step underflow after ") +
                            e.code());
      }
      step = std::max(opts.step_min, 0.5 * step);
    }
  }
  res.status = PathStatus::reached;
  return res;
}

double p_value(const StartChart& chart, const VecC& w_target,
               const DefiningFunction& df, const TrackOpts& opts) {
  const PathResult r =
      track(chart, {chart.base_anchor(), w_target}, df, opts);
  if (r.status != PathStatus::reached)
    throw NoConvergence("p_value: path terminated before the target (" +
                        std::string(to_string(r.status)) + ")");
  return r.terminal().t;
}

PathAgreement path_independence_check(
    const StartChart& chart, const VecC& w_target, const DefiningFunction& df,
    const std::vector<std::vector<VecC>>& paths, const TrackOpts& opts) {
  if (paths.size() < 2)
    throw std::invalid_argument("path_independence_check: need >= 2 paths");
  std::vector<DiscState> terminals;
  for (auto p : paths) {
    p.push_back(w_target);
    const PathResult r = track(chart, p, df, opts);
    if (r.status != PathStatus::reached)
      throw NoConvergence("path_independence_check: path did not reach target");
    terminals.push_back(r.terminal());
  }
  PathAgreement a;
  for (size_t i = 1; i < terminals.size(); ++i) {
    a.max_dF = std::max(a.max_dF, sup_diff(terminals[0].F, terminals[i].F));
    a.max_dG = std::max(a.max_dG, sup_diff(terminals[0].G, terminals[i].G));
    a.max_dP = std::max(a.max_dP, std::abs(terminals[0].t - terminals[i].t));
  }
  a.pass = std::max({a.max_dF, a.max_dG, a.max_dP}) <= opts.agree_tol;
  return a;
}

std::string path_to_json_lines(const PathResult& r) {
  std::ostringstream os;
  for (const auto& s : r.samples) {
    nlohmann::ordered_json j;
    j["s"] = s.s;
    auto w = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < s.w.size(); ++i)
      w.push_back({s.w[i].real(), s.w[i].imag()});
    j["w"] = w;
    j["P"] = s.state.t;
    j["step"] = s.step;
    auto F = nlohmann::ordered_json::array();
    for (const auto& f : s.state.F) F.push_back(trigpoly_to_json(f));
    j["F"] = F;
    os << j.dump() << "\n";
  }
  return os.str();
}

std::string path_to_csv(const PathResult& r) {
  std::ostringstream os;
  const int n = r.samples.empty() ? 0 : static_cast<int>(r.samples[0].w.size());
  os << "s";
  for (int j = 0; j < n; ++j) os << ",re_w" << j + 1 << ",im_w" << j + 1;
  os << ",P\n";
  os.precision(17);
  for (const auto& s : r.samples) {
    os << s.s;
    for (int j = 0; j < n; ++j)
      os << "," << s.w[j].real() << "," << s.w[j].imag();
    os << "," << s.state.t << "\n";
  }
  return os.str();
}

}  // namespace rh
