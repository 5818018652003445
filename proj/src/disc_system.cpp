#include "rh/disc_system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rh/errors.hpp"

namespace rh {

namespace {

constexpr double kPi = std::numbers::pi;

VecC anchor_of(const std::vector<TrigPoly>& F) {
  VecC w(static_cast<Eigen::Index>(F.size()));
  for (size_t j = 0; j < F.size(); ++j) w[static_cast<Eigen::Index>(j)] = F[j].coeff(0);
  return w;
}

// Everything the residual and its linearization need, sampled on the
// 4N+1 grid.
struct GridData {
  int N = 0, M = 0, n = 0;
  std::vector<cd> z;
  std::vector<std::vector<cd>> zpow;  // zpow[i][k], k = 0..N
  std::vector<VecC> F;
  std::vector<double> rho;
  std::vector<VecR> gr;  // realified gradient
  std::vector<VecC> g;   // Wirtinger gradient
  std::vector<MatR> H;
  std::vector<cd> sfn;   // sum_j F_j g_j
  std::vector<VecC> h;   // g / sfn
  double min_sfn = 0.0;
  double g_scale = 0.0;
};

GridData assemble(const DiscState& s, const DefiningFunction& df,
                  bool need_hess) {
  GridData d;
  d.N = s.degree();
  d.n = s.dim();
  d.M = 4 * d.N + 1;
  d.z.resize(d.M);
  d.zpow.resize(d.M);
  d.F.resize(d.M);
  d.rho.resize(d.M);
  d.gr.resize(d.M);
  d.g.resize(d.M);
  if (need_hess) d.H.resize(d.M);
  d.sfn.resize(d.M);
  d.h.resize(d.M);
  d.min_sfn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d.M; ++i) {
    const cd z = std::polar(1.0, 2.0 * kPi * i / d.M);
    d.z[i] = z;
    auto& p = d.zpow[i];
    p.resize(d.N + 1);
    p[0] = 1.0;
    for (int k = 1; k <= d.N; ++k) p[k] = p[k - 1] * z;
    VecC w(d.n);
    for (int j = 0; j < d.n; ++j) w[j] = s.F[j].eval_circle(z);
    d.F[i] = w;
    d.rho[i] = df.rho(z, w);
    d.gr[i] = df.grad_real(z, w);
    VecC g(d.n);
    for (int j = 0; j < d.n; ++j)
      g[j] = 0.5 * cd(d.gr[i][2 * j], -d.gr[i][2 * j + 1]);
    d.g[i] = g;
    if (need_hess) d.H[i] = df.hessian(z, w);
    cd sfn(0.0);
    for (int j = 0; j < d.n; ++j) sfn += w[j] * g[j];
    d.sfn[i] = sfn;
    d.min_sfn = std::min(d.min_sfn, std::abs(sfn));
    d.g_scale = std::max(d.g_scale, g.norm());
    d.h[i] = g / sfn;
  }
  return d;
}

// winding of sum_j F_j g_j around the circle, doubling the grid until the
// phase increments are unambiguous
int sfn_winding(const std::vector<TrigPoly>& F, const DefiningFunction& df,
                int M0, double abs_floor) {
  const int n = static_cast<int>(F.size());
  for (int M = std::max(M0, 16); M <= (1 << 14); M *= 2) {
    double total = 0.0;
    bool coarse = false;
    cd prev(0.0), first(0.0);
    for (int i = 0; i < M; ++i) {
      const cd z = std::polar(1.0, 2.0 * kPi * i / M);
      VecC w(n);
      for (int j = 0; j < n; ++j) w[j] = F[j].eval_circle(z);
      const VecC g = df.grad(z, w);
      cd sfn(0.0);
      for (int j = 0; j < n; ++j) sfn += w[j] * g[j];
      if (std::abs(sfn) < abs_floor)
        throw DegenerateTangency("tangent plane passes through the origin");
      if (i == 0) {
        first = sfn;
      } else {
        const double inc = std::arg(sfn / prev);
        if (std::abs(inc) > 0.5 * kPi) {
          coarse = true;
          break;
        }
        total += inc;
      }
      prev = sfn;
    }
    if (coarse) continue;
    total += std::arg(first / prev);
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
  }
  throw GridTooCoarse("winding of the tangency denominator unresolved");
}

int rows_of(const GridData& d) { return d.M + 2 * d.n * d.N + 2 * d.n; }
int cols_of(const GridData& d) { return 2 * d.n * d.N + 1; }

Eigen::VectorXd residual_from(const GridData& d, const DiscState& s) {
  Eigen::VectorXd r(rows_of(d));
  for (int i = 0; i < d.M; ++i) r[i] = d.rho[i] - s.t;
  // negative Fourier modes of h_j: c_{-k} = (1/M) sum_i h_j(z_i) z_i^k
  for (int j = 0; j < d.n; ++j) {
    for (int k = 1; k <= d.N; ++k) {
      cd c(0.0);
      for (int i = 0; i < d.M; ++i) c += d.h[i][j] * d.zpow[i][k];
      c /= static_cast<double>(d.M);
      const int row = d.M + 2 * (j * d.N + (k - 1));
      r[row] = c.real();
      r[row + 1] = c.imag();
    }
  }
  const int a0 = d.M + 2 * d.n * d.N;
  for (int j = 0; j < d.n; ++j) {
    const cd dw = s.F[j].coeff(0) - s.w[j];
    r[a0 + 2 * j] = dw.real();
    r[a0 + 2 * j + 1] = dw.imag();
  }
  return r;
}

// column order: (j, k, Re/Im) for j = 0..n-1, k = 1..N, then t
Eigen::MatrixXd jacobian_from(const GridData& d) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows_of(d), cols_of(d));
  const int tcol = cols_of(d) - 1;
  for (int i = 0; i < d.M; ++i) J(i, tcol) = -1.0;

  std::vector<cd> dh(static_cast<size_t>(d.n) * d.M);
  for (int j = 0; j < d.n; ++j) {
    for (int k = 1; k <= d.N; ++k) {
      for (int part = 0; part < 2; ++part) {
        const int col = 2 * (j * d.N + (k - 1)) + part;
        for (int i = 0; i < d.M; ++i) {
          const cd dz = part == 0 ? d.zpow[i][k] : cd(0.0, 1.0) * d.zpow[i][k];
          J(i, col) = d.gr[i][2 * j] * dz.real() + d.gr[i][2 * j + 1] * dz.imag();
          const MatR& H = d.H[i];
          cd dsfn = dz * d.g[i][j];
          for (int a = 0; a < d.n; ++a) {
            const cd dg =
                0.5 * ((cd(H(2 * a, 2 * j), -H(2 * a + 1, 2 * j))) * dz.real() +
                       (cd(H(2 * a, 2 * j + 1), -H(2 * a + 1, 2 * j + 1))) *
                           dz.imag());
            dh[static_cast<size_t>(a) * d.M + i] = dg;  // stash dg first
            dsfn += d.F[i][a] * dg;
          }
          for (int a = 0; a < d.n; ++a) {
            cd& slot = dh[static_cast<size_t>(a) * d.M + i];
            slot = (slot - d.h[i][a] * dsfn) / d.sfn[i];
          }
        }
        for (int a = 0; a < d.n; ++a) {
          for (int kk = 1; kk <= d.N; ++kk) {
            cd c(0.0);
            for (int i = 0; i < d.M; ++i)
              c += dh[static_cast<size_t>(a) * d.M + i] * d.zpow[i][kk];
            c /= static_cast<double>(d.M);
            const int row = d.M + 2 * (a * d.N + (kk - 1));
            J(row, col) = c.real();
            J(row + 1, col) = c.imag();
          }
        }
      }
    }
  }
  return J;
}

void apply_step(DiscState& s, const Eigen::VectorXd& step) {
  const int N = s.degree();
  const int n = s.dim();
  for (int j = 0; j < n; ++j)
    for (int k = 1; k <= N; ++k) {
      const int col = 2 * (j * N + (k - 1));
      s.F[j].set_coeff(k, s.F[j].coeff(k) + cd(step[col], step[col + 1]));
    }
  s.t += step[2 * n * N];
}

}  // namespace

VecC StartChart::base_anchor() const { return anchor_of(f); }

DiscState StartChart::to_state() const {
  return DiscState{base_anchor(), f, g, t0};
}

double Certificate::max_resid() const {
  return std::max({flatness_dev, tangency_resid, bilinear_resid});
}

VecC tangency_data(const DefiningFunction& df, cd z, const VecC& w) {
  const VecC g = df.grad(z, w);
  cd denom(0.0);
  for (Eigen::Index j = 0; j < w.size(); ++j) denom += w[j] * g[j];
  if (std::abs(denom) < 1e-12 * std::max(1.0, g.norm() * w.norm()))
    throw DegenerateTangency("tangent plane passes through the origin");
  return g / denom;
}

Eigen::VectorXd residual(const DiscState& state, const DefiningFunction& df) {
  const GridData d = assemble(state, df, false);
  if (d.min_sfn < 1e-12 * std::max(1.0, d.g_scale))
    throw DegenerateTangency("tangent plane passes through the origin");
  return residual_from(d, state);
}

Eigen::MatrixXd jacobian(const DiscState& state, const DefiningFunction& df) {
  const GridData d = assemble(state, df, true);
  if (d.min_sfn < 1e-12 * std::max(1.0, d.g_scale))
    throw DegenerateTangency("tangent plane passes through the origin");
  return jacobian_from(d);
}

DiscState newton_solve(const DiscState& start, const VecC& target_w,
                       const DefiningFunction& df, const SolveOpts& opts) {
  DiscState s = start;
  const int n = df.dim();
  if (s.dim() != n) throw std::invalid_argument("newton_solve: dim mismatch");
  const int N = s.degree();
  if (N < 1) throw std::invalid_argument("newton_solve: degree must be >= 1");
  s.w = target_w;
  for (int j = 0; j < n; ++j) s.F[j].set_coeff(0, target_w[j]);

  bool converged = false;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    GridData d = assemble(s, df, true);
    const double floor_abs = opts.sfn_rel_floor * std::max(1.0, d.g_scale);
    if (d.min_sfn < floor_abs)
      throw DegenerateTangency("tangent plane passes through the origin");
    if (sfn_winding(s.F, df, d.M, 0.1 * floor_abs) != 0)
      throw WindingViolation("tangency denominator winds around zero");

    const Eigen::VectorXd r = residual_from(d, s);
    if (r.lpNorm<Eigen::Infinity>() <= opts.tol) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd J = jacobian_from(d);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(
        J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < opts.rank_tol * sv(0))
      throw RankCollapse("disc-system linearization lost column rank");
    const Eigen::VectorXd step = svd.solve(-r);

    const double rn = r.norm();
    double alpha = 1.0;
    bool moved = false;
    while (alpha >= std::ldexp(1.0, -20)) {
      DiscState trial = s;
      apply_step(trial, Eigen::VectorXd(alpha * step));
      double tn = std::numeric_limits<double>::infinity();
      try {
        const GridData td = assemble(trial, df, false);
        if (td.min_sfn >= 0.1 * floor_abs) tn = residual_from(td, trial).norm();
      } catch (const DomainError&) {
      }
      if (tn < (1.0 - 1e-4 * alpha) * rn) {
        s = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) {
      // truncated h is not exactly band-limited, so the least-squares
      // residual has a floor; a stationary point under it is a solution
      if (r.lpNorm<Eigen::Infinity>() <= opts.stall_tol) {
        converged = true;
        break;
      }
      throw NoConvergence("line search stalled");
    }
  }
  if (!converged) {
    const GridData d = assemble(s, df, false);
    if (residual_from(d, s).lpNorm<Eigen::Infinity>() > opts.stall_tol)
      throw NoConvergence("iteration budget exhausted");
  }

  // recover the dual from the analytic part of h
  const GridData d = assemble(s, df, false);
  s.G.assign(n, TrigPoly(N));
  for (int j = 0; j < n; ++j) {
    std::vector<cd> hv(d.M);
    for (int i = 0; i < d.M; ++i) hv[i] = d.h[i][j];
    s.G[j] = TrigPoly::from_grid(hv, 2 * N).analytic_part().truncated(N);
  }
  return s;
}

Certificate certify(const DiscState& state, const DefiningFunction& df) {
  const int N = state.degree();
  const int n = state.dim();
  const int M = 8 * N + 5;
  Certificate cert;
  double trunc2 = 0.0;
  std::vector<std::vector<cd>> hvals(n, std::vector<cd>(M));
  for (int i = 0; i < M; ++i) {
    const cd z = std::polar(1.0, 2.0 * kPi * i / M);
    VecC w(n);
    for (int j = 0; j < n; ++j) w[j] = state.F[j].eval_circle(z);
    cert.flatness_dev =
        std::max(cert.flatness_dev, std::abs(df.rho(z, w) - state.t));
    const VecC g = df.grad(z, w);
    cd sfn(0.0), bil(0.0);
    for (int j = 0; j < n; ++j) {
      sfn += w[j] * g[j];
      bil += w[j] * state.G[j].eval_circle(z);
    }
    cert.bilinear_resid = std::max(cert.bilinear_resid, std::abs(bil - 1.0));
    for (int j = 0; j < n; ++j) {
      cert.tangency_resid = std::max(
          cert.tangency_resid,
          std::abs(state.G[j].eval_circle(z) * sfn - g[j]));
      hvals[j][i] = g[j] / sfn;
    }
  }
  for (int j = 0; j < n; ++j) {
    double lost = 0.0;
    TrigPoly::from_grid(hvals[j], (M - 1) / 2).truncated(N, &lost);
    trunc2 += lost * lost;
  }
  cert.truncation_loss = std::sqrt(trunc2);
  try {
    cert.winding_ok = sfn_winding(state.F, df, 4 * N + 1, 1e-14) == 0;
  } catch (const DomainError&) {
    cert.winding_ok = false;
  }
  return cert;
}

StartChart make_start_chart(const DefiningFunction& df,
                            const std::vector<TrigPoly>& center,
                            const VecC& offset, int degree,
                            const SolveOpts& opts) {
  const int n = df.dim();
  if (static_cast<int>(center.size()) != n || offset.size() != n)
    throw std::invalid_argument("make_start_chart: dim mismatch");
  DiscState s;
  s.F.reserve(center.size());
  for (int j = 0; j < n; ++j) {
    if (!center[j].is_analytic())
      throw std::invalid_argument("make_start_chart: center must be analytic");
    TrigPoly fj = center[j].padded(degree).truncated(degree);
    fj.set_coeff(0, fj.coeff(0) + offset[j]);
    s.F.push_back(fj);
  }
  s.w = anchor_of(s.F);
  s.G.assign(n, TrigPoly(degree));
  // level guess: mean of rho along the seed disc
  {
    const int M = 4 * degree + 1;
    double acc = 0.0;
    for (int i = 0; i < M; ++i) {
      const cd z = std::polar(1.0, 2.0 * kPi * i / M);
      VecC w(n);
      for (int j = 0; j < n; ++j) w[j] = s.F[j].eval_circle(z);
      acc += df.rho(z, w);
    }
    s.t = acc / M;
  }
  const DiscState refined = newton_solve(s, s.w, df, opts);
  StartChart chart;
  chart.f = refined.F;
  chart.g = refined.G;
  chart.t0 = refined.t;
  chart.validity_radius = 0.5 * offset.norm();
  return chart;
}

// ---------------------------------------------------------------------------
// Normalized chart coordinates
// ---------------------------------------------------------------------------

namespace {

void require_normalized(const StartChart& chart) {
  const int n = static_cast<int>(chart.f.size());
  auto nonconstant = [](const TrigPoly& p) {
    TrigPoly q = p;
    q.set_coeff(0, 0.0);
    return q.sup_norm();
  };
  double scale = std::abs(chart.g[0].coeff(0));
  if (scale < 1e-12)
    throw ChartNotNormalized("dual first component vanishes at the base");
  bool ok = nonconstant(chart.g[0]) < 1e-8 * scale &&
            nonconstant(chart.f[0]) < 1e-8 * std::max(1.0, std::abs(chart.f[0].coeff(0)));
  for (int j = 1; j < n && ok; ++j)
    ok = chart.g[j].sup_norm() < 1e-8 * scale;
  if (!ok)
    throw ChartNotNormalized(
        "chart must have constant f_1 and dual along the first axis");
}

// X(z) = exp(theta~ - i theta), theta the continuous argument of
// drho/dw_1(z, f(z)); then 2 (drho/dw_1) X is positive on the circle.
struct XData {
  int M = 0;
  std::vector<cd> z;
  std::vector<cd> phi;  // drho/dw_1 along the chart
  std::vector<cd> X;
};

XData compute_x(const StartChart& chart, const DefiningFunction& df, int M) {
  const int n = static_cast<int>(chart.f.size());
  XData xd;
  xd.M = M;
  xd.z.resize(M);
  xd.phi.resize(M);
  xd.X.resize(M);
  std::vector<double> theta(M);
  double prev = 0.0;
  for (int i = 0; i < M; ++i) {
    const cd z = std::polar(1.0, 2.0 * kPi * i / M);
    xd.z[i] = z;
    VecC w(n);
    for (int j = 0; j < n; ++j) w[j] = chart.f[j].eval_circle(z);
    const cd phi = df.grad(z, w)[0];
    if (std::abs(phi) < 1e-12)
      throw DegenerateTangency("drho/dw_1 vanishes along the chart");
    xd.phi[i] = phi;
    double th = std::arg(phi);
    if (i > 0) th = prev + std::remainder(th - prev, 2.0 * kPi);
    theta[i] = th;
    prev = th;
  }
  const double closure = std::remainder(std::arg(xd.phi[0]) - prev, 2.0 * kPi);
  if (std::lround((prev + closure - theta[0]) / (2.0 * kPi)) != 0)
    throw WindingViolation("drho/dw_1 winds around zero along the chart");
  const int Nt = (M - 1) / 4;
  std::vector<cd> tv(theta.begin(), theta.end());
  const TrigPoly theta_p = TrigPoly::from_grid(tv, Nt);
  const TrigPoly theta_c = harmonic_conjugate(theta_p);
  for (int i = 0; i < M; ++i)
    xd.X[i] = std::exp(cd(theta_c.eval_circle(xd.z[i]).real(), 0.0) -
                       cd(0.0, theta_p.eval_circle(xd.z[i]).real()));
  return xd;
}

}  // namespace

PhiValue chart_phi(const TrigPoly& u, const TrigPoly& v,
                   const std::vector<TrigPoly>& k,
                   const std::vector<TrigPoly>& l, const VecC& w,
                   const StartChart& chart, const DefiningFunction& df) {
  require_normalized(chart);
  const int n = static_cast<int>(chart.f.size());
  if (static_cast<int>(k.size()) != n || static_cast<int>(l.size()) != n)
    throw std::invalid_argument("chart_phi: dim mismatch");
  if (!u.is_real() || !v.is_real())
    throw NonRealInput("chart_phi: u, v must be real");
  if (k[0].sup_norm() > 1e-12)
    throw std::invalid_argument("chart_phi: k_1 must vanish");

  int Nw = std::max(1, chart.f[0].degree());
  for (const auto& p : chart.f) Nw = std::max(Nw, p.degree());
  for (const auto& p : chart.g) Nw = std::max(Nw, p.degree());
  Nw = std::max({Nw, u.degree(), v.degree()});
  for (const auto& p : k) Nw = std::max(Nw, p.degree());
  for (const auto& p : l) Nw = std::max(Nw, p.degree());
  const int M = 8 * Nw + 1;

  const XData xd = compute_x(chart, df, M);
  const TrigPoly ut = harmonic_conjugate(u);
  const TrigPoly vt = harmonic_conjugate(v);
  const double v0 = v.coeff(0).real();

  std::vector<cd> phi1(M);
  std::vector<std::vector<cd>> phi23(n, std::vector<cd>(M));
  VecC mean = VecC::Zero(n);
  for (int i = 0; i < M; ++i) {
    const cd z = xd.z[i];
    const cd uu = u.eval_circle(z) + cd(0.0, 1.0) * ut.eval_circle(z);
    VecC F(n);
    for (int j = 0; j < n; ++j) {
      const cd fj = chart.f[j].eval_circle(z);
      F[j] = fj + (uu + cd(0.0, v0)) * fj * xd.X[i] + k[j].eval_circle(z);
    }
    mean += F;
    phi1[i] = df.rho(z, F);
    const VecC g = df.grad(z, F);
    cd denom(0.0);
    for (int j = 0; j < n; ++j) denom += std::conj(F[j]) * std::conj(g[j]);
    const cd num = 1.0 + v.eval_circle(z) + cd(0.0, 1.0) * vt.eval_circle(z);
    for (int j = 0; j < n; ++j) {
      const cd p2 = num * std::conj(g[j]) / denom;
      const cd p3 =
          std::conj(chart.g[j].eval_circle(z) + l[j].eval_circle(z));
      phi23[j][i] = p2 - p3;
    }
  }
  mean /= static_cast<double>(M);

  PhiValue out;
  out.phi1 = TrigPoly::from_grid(phi1, 2 * Nw);
  out.phi1.set_coeff(0, 0.0);  // values modulo real constants
  out.phi2m3.reserve(n);
  for (int j = 0; j < n; ++j)
    out.phi2m3.push_back(TrigPoly::from_grid(phi23[j], 2 * Nw));
  out.phi4 = mean - w;
  return out;
}

TrigPoly chart_phi_weight(const StartChart& chart,
                                   const DefiningFunction& df) {
  require_normalized(chart);
  int Nw = std::max(1, chart.f[0].degree());
  for (const auto& p : chart.f) Nw = std::max(Nw, p.degree());
  const int M = 8 * Nw + 1;
  const XData xd = compute_x(chart, df, M);
  std::vector<cd> vals(M);
  for (int i = 0; i < M; ++i) vals[i] = 2.0 * xd.phi[i] * xd.X[i];
  return TrigPoly::from_grid(vals, 2 * Nw);
}

}  // namespace rh
