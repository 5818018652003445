#include "rh/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rh/errors.hpp"

namespace rh {

namespace {
constexpr double kPi = std::numbers::pi;
}

NehariResult nehari(const TrigPoly& c) {
  NehariResult res;
  int d = 0;
  for (int k = 1; k <= c.degree(); ++k)
    if (std::abs(c.coeff(-k)) > 1e-14) d = k;
  res.hankel_dim = d;
  if (d == 0) return res;  // analytic symbol: distance 0
  Eigen::MatrixXcd H(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) H(j, k) = c.coeff(-(j + k + 1));
  res.hankel = H;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  res.gamma = svd.singularValues()(0);
  res.schmidt_u = svd.matrixU().col(0);
  res.schmidt_v = svd.matrixV().col(0);
  return res;
}

// ---------------------------------------------------------------------------
// Smoothed minimax
// ---------------------------------------------------------------------------

namespace {

struct MinimaxGrid {
  std::vector<cd> z;
  std::vector<VecC> powers;  // powers[k][j] = z_k^j, j = 0..D
};

MinimaxGrid make_grid(int M, int D) {
  MinimaxGrid g;
  g.z.resize(M);
  g.powers.resize(M);
  for (int k = 0; k < M; ++k) {
    g.z[k] = std::polar(1.0, 2.0 * kPi * k / M);
    VecC p(D + 1);
    p[0] = 1.0;
    for (int j = 1; j <= D; ++j) p[j] = p[j - 1] * g.z[k];
    g.powers[k] = p;
  }
  return g;
}

cd eval_poly(const VecR& x, const VecC& powers) {
  cd acc(0.0);
  const int D = static_cast<int>(powers.size()) - 1;
  for (int j = 0; j <= D; ++j)
    acc += cd(x[2 * j], x[2 * j + 1]) * powers[j];
  return acc;
}

// d(realified w)/dx at grid point: 2 x 2(D+1)
MatR point_basis(const VecC& powers) {
  const int D = static_cast<int>(powers.size()) - 1;
  MatR B(2, 2 * (D + 1));
  for (int j = 0; j <= D; ++j) {
    B(0, 2 * j) = powers[j].real();
    B(1, 2 * j) = powers[j].imag();
    B(0, 2 * j + 1) = -powers[j].imag();
    B(1, 2 * j + 1) = powers[j].real();
  }
  return B;
}

double grid_max(const DefiningFunction& df, const VecR& x,
                const MinimaxGrid& g) {
  double m = 0.0;
  for (size_t k = 0; k < g.z.size(); ++k) {
    VecC w(1);
    w[0] = eval_poly(x, g.powers[k]);
    m = std::max(m, df.rho(g.z[k], w));
  }
  return m;
}

}  // namespace

MinimaxResult convex_minimax(const DefiningFunction& df, int degree,
                             const MinimaxOpts& opts) {
  if (df.dim() != 1)
    throw std::invalid_argument("convex_minimax: n = 1 families only");

  const int D = degree;
  const int M = opts.grid > 0 ? opts.grid : 4 * D + 1;
  const MinimaxGrid grid = make_grid(M, D);

  // convexity screen: full Hessian of rho(z, .) must be PSD on samples
  {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int s = 0; s < 60; ++s) {
      const cd z = std::polar(1.0, 2.0 * kPi * s / 60.0);
      const cd u = cd(nd(rng), nd(rng));
      VecC w(1);
      w[0] = df.selector(z)[0] +
             (0.2 + 0.1 * (s % 7)) * u / std::abs(u);
      const double r = df.rho(z, w);
      if (r <= 0.0 || r > df.outer_radius()) continue;
      Eigen::SelfAdjointEigenSolver<MatR> es(df.hessian(z, w));
      if (es.eigenvalues().minCoeff() < -1e-8)
        throw NonConvexFiber("convex_minimax: fiber Hessian indefinite");
    }
  }

  const int nx = 2 * (D + 1);

  // least-squares init: fit f to the selector on the grid
  VecR x = VecR::Zero(nx);
  {
    Eigen::MatrixXd A(2 * M, nx);
    VecR b(2 * M);
    for (int k = 0; k < M; ++k) {
      A.block(2 * k, 0, 2, nx) = point_basis(grid.powers[k]);
      const cd s = df.selector(grid.z[k])[0];
      b[2 * k] = s.real();
      b[2 * k + 1] = s.imag();
    }
    x = A.colPivHouseholderQr().solve(b);
  }

  MinimaxResult res;
  res.gamma_upper = grid_max(df, x, grid);
  if (res.gamma_upper <= 1e-12) {
    // selector itself is analytic of degree <= D; nothing to optimize
  } else {
    int total_iters = 0;
    for (double p = 16.0; p <= opts.p_max; p *= 8.0) {
      for (int it = 0; it < opts.max_newton; ++it) {
        // softmax-smoothed max and derivatives
        std::vector<double> rho_k(M);
        double rmax = 0.0;
        bool near_zero = false;
        for (int k = 0; k < M; ++k) {
          VecC w(1);
          w[0] = eval_poly(x, grid.powers[k]);
          rho_k[k] = df.rho(grid.z[k], w);
          if (rho_k[k] < 1e-12) near_zero = true;
          rmax = std::max(rmax, rho_k[k]);
        }
        if (near_zero) break;  // nonsmooth corner; current x is the answer
        VecR gF = VecR::Zero(nx);
        MatR HF = MatR::Zero(nx, nx);
        MatR outer = MatR::Zero(nx, nx);
        double Z = 0.0;
        std::vector<double> s_k(M);
        for (int k = 0; k < M; ++k) {
          s_k[k] = std::exp(p * (rho_k[k] - rmax));
          Z += s_k[k];
        }
        for (int k = 0; k < M; ++k) {
          const double s = s_k[k] / Z;
          if (s < 1e-300) continue;
          VecC w(1);
          w[0] = eval_poly(x, grid.powers[k]);
          const MatR B = point_basis(grid.powers[k]);
          const VecR gk = B.transpose() * df.grad_real(grid.z[k], w);
          const MatR Hk = B.transpose() * df.hessian(grid.z[k], w) * B;
          gF += s * gk;
          HF += s * Hk;
          outer += s * (gk * gk.transpose());
        }
        HF += p * (outer - gF * gF.transpose());
        if (gF.norm() < opts.grad_tol) break;
        // Levenberg-style regularization + backtracking on F_p
        double mu = 1e-12 * (1.0 + HF.trace() / nx);
        VecR step;
        for (;;) {
          Eigen::LDLT<MatR> ldlt(HF + mu * MatR::Identity(nx, nx));
          step = ldlt.solve(-gF);
          if (ldlt.info() == Eigen::Success && step.allFinite()) break;
          mu *= 10.0;
          if (mu > 1e6) break;
        }
        auto Fp = [&](const VecR& xc) {
          double mx = 0.0;
          std::vector<double> r(M);
          for (int k = 0; k < M; ++k) {
            VecC w(1);
            w[0] = eval_poly(xc, grid.powers[k]);
            r[k] = df.rho(grid.z[k], w);
            mx = std::max(mx, r[k]);
          }
          double acc = 0.0;
          for (int k = 0; k < M; ++k) acc += std::exp(p * (r[k] - mx));
          return mx + std::log(acc) / p;
        };
        const double f0 = Fp(x);
        double alpha = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
          const VecR xn = x + alpha * step;
          if (Fp(xn) < f0 - 1e-16) {
            x = xn;
            moved = true;
            break;
          }
          alpha *= 0.5;
        }
        ++total_iters;
        if (!moved) break;
      }
    }
    res.iterations = total_iters;
  }

  // candidate screen keeps separate calls at nested degrees monotone:
  // the zero polynomial and the LS fit are always feasible
  const VecR zero = VecR::Zero(nx);
  if (grid_max(df, zero, grid) < grid_max(df, x, grid)) x = zero;

  // refined-grid value (doubling check from the design notes)
  const MinimaxGrid fine = make_grid(2 * M + 1, D);
  res.gamma_upper = std::max(grid_max(df, x, grid), grid_max(df, x, fine));

  TrigPoly f(D);
  for (int j = 0; j <= D; ++j) f.set_coeff(j, cd(x[2 * j], x[2 * j + 1]));
  res.f_opt = f;
  return res;
}

// ---------------------------------------------------------------------------
// Composition-operator derivative check
// ---------------------------------------------------------------------------

CompDerivReport composition_derivative_check(
    const DefiningFunction& p, const std::vector<TrigPoly>& f,
    const std::vector<double>& h_scales, unsigned seed) {
  const int n = p.dim();
  if (static_cast<int>(f.size()) != n)
    throw std::invalid_argument("composition_derivative_check: dim mismatch");

  int N = 1;
  for (const auto& fj : f) N = std::max(N, fj.degree());
  const int M = 8 * N + 1;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<TrigPoly> h(n, TrigPoly(N));
  for (int j = 0; j < n; ++j)
    for (int k = -N; k <= N; ++k)
      h[j].set_coeff(k, cd(nd(rng), nd(rng)) / (1.0 + k * k));
  double hnorm = 0.0;
  for (const auto& hj : h) hnorm += std::pow(w12_norm(hj), 2);
  hnorm = std::sqrt(hnorm);

  CompDerivReport rep;
  for (double s : h_scales) {
    std::vector<cd> Rvals(M);
    for (int i = 0; i < M; ++i) {
      const cd z = std::polar(1.0, 2.0 * kPi * i / M);
      VecC w(n), dw(n);
      for (int j = 0; j < n; ++j) {
        w[j] = f[j].eval_circle(z);
        dw[j] = s * h[j].eval_circle(z);
      }
      const double base = p.rho(z, w);
      const double pert = p.rho(z, VecC(w + dw));
      const VecR g = p.grad_real(z, w);
      const double lin = g.dot(realify(dw));
      Rvals[i] = pert - base - lin;
    }
    const TrigPoly R = TrigPoly::from_grid(Rvals, 2 * N);
    rep.scales.push_back(s);
    rep.ratios.push_back(w12_norm(R) / (s * hnorm));
  }

  // log-log slope of ratio vs scale
  const int m = static_cast<int>(rep.scales.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    const double lx = std::log(rep.scales[i]);
    const double ly = std::log(std::max(rep.ratios[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.pass = rep.slope >= 0.9;
  return rep;
}

}  // namespace rh
