#include "rh/hinfty.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rh/errors.hpp"
#include "rh/json_io.hpp"
#include "rh/oracles.hpp"

namespace rh {

namespace {

constexpr double kNegTol = 1e-12;

struct Prepared {
  DfPtr df;   // original
  DfPtr dfm;  // twisted by m
  DfPtr dfr;  // twisted and recentered about the reference graph p
  std::vector<TrigPoly> pgraph;  // p = z^m q, analytic reference graph
  VecC c0;                       // p(0)
  double tail = 0.0;             // sup |S - q|, depth of the dropped modes
  int m = 0;
};

// Twist order: the shallowest nonvanishing negative frequency of S. The
// reference graph is p = z^m q with q the truncation of S to modes >= -m;
// deeper selector mass stays in the twisted constraint as a non-analytic
// fiber-center wiggle the disc solver resolves. Using the full selector
// degree instead would make the recentered fibers exactly centered and
// collapse the continuation onto constant discs, which is wrong whenever
// S has more than one negative mode.
Prepared prepare(DfPtr df) {
  Prepared p;
  p.df = df;
  const std::vector<TrigPoly> S = df->selector_poly();
  const int n = df->dim();
  int m = 0;
  const int deepest = minimal_m(S);  // throws AnalyticSelector when analytic
  for (int k = 1; k <= deepest && m == 0; ++k)
    for (int j = 0; j < n; ++j)
      if (std::abs(S[j].coeff(-k)) > kNegTol) {
        m = k;
        break;
      }
  p.m = m;
  p.dfm = twist(df, m);
  p.pgraph.reserve(n);
  p.c0 = VecC(n);
  double tail2 = 0.0;
  for (int j = 0; j < n; ++j) {
    TrigPoly q = S[j];
    TrigPoly dropped(q.degree());
    for (int k = m + 1; k <= q.degree(); ++k) {
      dropped.set_coeff(-k, q.coeff(-k));
      q.set_coeff(-k, 0.0);
    }
    tail2 += dropped.sup_norm() * dropped.sup_norm();
    p.pgraph.push_back(q.frequency_shift(m).analytic_part());
    p.c0[j] = S[j].coeff(-m);
  }
  p.tail = std::sqrt(tail2);
  if (p.c0.norm() < 1e-14)
    throw DegenerateTangency("reference graph vanishes at the origin");
  p.dfr = recenter(p.dfm, p.pgraph);
  return p;
}

StartChart default_chart(const Prepared& p, int degree,
                         const SolveOpts& solver) {
  const int n = p.df->dim();
  const VecC u = -p.c0 / p.c0.norm();
  const double s0 = p.c0.norm() + 2.0 * p.tail + 1.0;
  std::vector<TrigPoly> center(n, TrigPoly(0));
  return make_start_chart(*p.dfr, center, VecC(s0 * u), degree, solver);
}

bool detect_real_symmetry(const DefiningFunction& df, int samples,
                          unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
  const int n = df.dim();
  const double R = df.outer_radius();
  for (int s = 0; s < samples; ++s) {
    const cd z = std::polar(1.0, ud(rng));
    VecC w(n), wc(n);
    for (int j = 0; j < n; ++j) {
      w[j] = 0.4 * R * cd(nd(rng), nd(rng));
      wc[j] = std::conj(w[j]);
    }
    const double a = df.rho(z, w);
    const double b = df.rho(std::conj(z), wc);
    if (std::abs(a - b) > 1e-10 * (1.0 + std::abs(a))) return false;
  }
  return true;
}

Solution finish(const Prepared& p, const DiscState& terminal,
                const HinftyOpts& opts) {
  Solution sol;
  sol.m = p.m;
  sol.gamma = terminal.t;
  // flatness and tangency are invariant under the center shift, so the
  // certificate is taken on the recentered problem the solver ran on
  sol.certificate = certify(terminal, *p.dfr);

  const int n = p.df->dim();
  std::vector<TrigPoly> F0(n);
  double scale2 = 0.0;
  for (int j = 0; j < n; ++j) {
    F0[j] = terminal.F[j] + p.pgraph[j].padded(terminal.degree());
    scale2 += F0[j].l2_norm() * F0[j].l2_norm();
  }
  const double scale = std::max(std::sqrt(scale2), 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < p.m; ++k)
      sol.divisibility_defect =
          std::max(sol.divisibility_defect, std::abs(F0[j].coeff(k)));
  if (sol.divisibility_defect > opts.defect_rel_tol * scale)
    throw DivisibilityDefect("flat disc is not divisible by z^m");

  sol.phi.reserve(n);
  for (int j = 0; j < n; ++j) {
    TrigPoly ph = F0[j].frequency_shift(-p.m).analytic_part();
    sol.phi.push_back(ph.truncated(std::max(0, F0[j].degree() - p.m)));
  }

  if (detect_real_symmetry(*p.df, opts.symmetry_samples, opts.seed)) {
    double im = 0.0;
    for (const auto& ph : sol.phi)
      for (int k = 0; k <= ph.degree(); ++k)
        im = std::max(im, std::abs(ph.coeff(k).imag()));
    sol.real_symmetric = im <= 1e-8;
  }
  return sol;
}

Solution solve_seeded(DfPtr df, const HinftyOpts& opts,
                      const DiscState* warm) {
  const Prepared p = prepare(df);
  StartChart chart;
  if (warm) {
    const DiscState refined =
        newton_solve(*warm, warm->w, *p.dfr, opts.track.solver);
    chart.f = refined.F;
    chart.g = refined.G;
    chart.t0 = refined.t;
    chart.validity_radius = 0.5 * refined.w.norm();
  } else {
    chart = default_chart(p, opts.degree, opts.track.solver);
  }
  const PathResult r =
      track(chart, {chart.base_anchor(), VecC(-p.c0)}, *p.dfr, opts.track);
  if (r.status != PathStatus::reached)
    throw NoConvergence("solve: continuation did not reach the zero anchor");
  return finish(p, r.terminal(), opts);
}

}  // namespace

int minimal_m(const std::vector<TrigPoly>& S) {
  int m = 0;
  for (const auto& s : S)
    for (int k = 1; k <= s.degree(); ++k)
      if (std::abs(s.coeff(-k)) > kNegTol) m = std::max(m, k);
  if (m == 0)
    throw AnalyticSelector("selector is analytic; nothing to deflate");
  return m;
}

Solution solve(DfPtr df, const HinftyOpts& opts) {
  return solve_seeded(df, opts, nullptr);
}

nlohmann::ordered_json Solution::to_json() const {
  nlohmann::ordered_json j;
  j["gamma"] = gamma;
  j["m"] = m;
  auto ph = nlohmann::ordered_json::array();
  for (const auto& f : phi) ph.push_back(trigpoly_to_json(f));
  j["phi"] = ph;
  j["certificate"] = certificate_to_json(certificate);
  j["divisibility_defect"] = divisibility_defect;
  if (real_symmetric)
    j["real_symmetric"] = *real_symmetric;
  else
    j["real_symmetric"] = nullptr;
  return j;
}

Solution solution_from_json(const nlohmann::json& j) {
  Solution s;
  s.gamma = j.at("gamma").get<double>();
  s.m = j.at("m").get<int>();
  for (const auto& f : j.at("phi")) s.phi.push_back(trigpoly_from_json(f));
  s.certificate = certificate_from_json(j.at("certificate"));
  s.divisibility_defect = j.at("divisibility_defect").get<double>();
  if (j.contains("real_symmetric") && !j.at("real_symmetric").is_null())
    s.real_symmetric = j.at("real_symmetric").get<bool>();
  return s;
}

SweepResult sweep(const nlohmann::json& family_spec,
                  const std::vector<double>& tau_grid,
                  const HinftyOpts& opts) {
  if (tau_grid.size() < 2)
    throw std::invalid_argument("sweep: need at least two grid points");
  for (size_t i = 1; i < tau_grid.size(); ++i)
    if (tau_grid[i] <= tau_grid[i - 1])
      throw std::invalid_argument("sweep: tau grid must be increasing");

  SweepResult res;
  res.tau = tau_grid;
  int m0 = -1;
  std::optional<DiscState> warm;
  for (double tau : tau_grid) {
    DfPtr df = make_family_at(family_spec, tau);
    const int m = minimal_m(df->selector_poly());
    if (m0 < 0) m0 = m;
    if (m != m0)
      throw MChangedAcrossGrid("twist order changed along the tau grid");
    Prepared p = prepare(df);
    StartChart chart;
    if (warm) {
      const DiscState refined =
          newton_solve(*warm, warm->w, *p.dfr, opts.track.solver);
      chart.f = refined.F;
      chart.g = refined.G;
      chart.t0 = refined.t;
      chart.validity_radius = 0.5 * refined.w.norm();
    } else {
      chart = default_chart(p, opts.degree, opts.track.solver);
    }
    const PathResult r =
        track(chart, {chart.base_anchor(), VecC(-p.c0)}, *p.dfr, opts.track);
    if (r.status != PathStatus::reached)
      throw NoConvergence("sweep: continuation did not reach the zero anchor");
    warm = r.terminal();
    res.solutions.push_back(finish(p, r.terminal(), opts));
    res.gamma.push_back(res.solutions.back().gamma);
  }

  for (size_t i = 1; i + 1 < tau_grid.size(); ++i) {
    const double dt = res.tau[i + 1] - res.tau[i - 1];
    res.dgamma.push_back((res.gamma[i + 1] - res.gamma[i - 1]) / dt);
    double sup = 0.0;
    const auto& a = res.solutions[i + 1].phi;
    const auto& b = res.solutions[i - 1].phi;
    for (size_t j = 0; j < a.size(); ++j)
      sup = std::max(sup, ((a[j] - b[j]) * (1.0 / dt)).sup_norm());
    res.dphi_sup.push_back(sup);
  }
  return res;
}

std::string SweepResult::to_csv() const {
  std::ostringstream os;
  os << "tau,gamma,dgamma,dphi_sup\n";
  os.precision(17);
  for (size_t i = 0; i < tau.size(); ++i) {
    os << tau[i] << "," << gamma[i] << ",";
    if (i >= 1 && i + 1 < tau.size()) {
      os << dgamma[i - 1] << "," << dphi_sup[i - 1];
    } else {
      os << ",";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace rh
