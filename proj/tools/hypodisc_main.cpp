// batch front door: audit | disc | solve | hull | sweep | certify | oracle

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "json.hpp"
#include "rh/constraints.hpp"
#include "rh/continuation.hpp"
#include "rh/disc_system.hpp"
#include "rh/errors.hpp"
#include "rh/hinfty.hpp"
#include "rh/hull_mapper.hpp"
#include "rh/json_io.hpp"
#include "rh/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Cli {
  std::string config_path;
  std::string out_dir = ".";
  int seed = -1;
  int degree = -1;
  double tol = -1.0;
  bool with_oracle = false;
};

json load_config(const Cli& cli) {
  if (cli.config_path.empty())
    throw rh::ConfigError("missing --config");
  std::ifstream in(cli.config_path);
  if (!in) throw rh::ConfigError("cannot open config: " + cli.config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw rh::ConfigError(std::string("config parse failure: ") + e.what());
  }
  if (cli.seed >= 0) cfg["seed"] = cli.seed;
  if (cli.degree >= 0) cfg["degree"] = cli.degree;
  if (cli.tol > 0) cfg["tol"] = cli.tol;
  const int N = cfg.value("degree", 24);
  if (N < 4) throw rh::ConfigError("degree must be >= 4");
  return cfg;
}

void write_file(const Cli& cli, const std::string& name,
                const std::string& content) {
  fs::create_directories(cli.out_dir);
  std::ofstream out(fs::path(cli.out_dir) / name);
  out << content;
}

void write_json(const Cli& cli, const std::string& name,
                const ordered_json& j) {
  write_file(cli, name, j.dump(2) + "\n");
}

rh::DfPtr family_of(const json& cfg) {
  if (!cfg.contains("family"))
    throw rh::ConfigError("config missing \"family\"");
  return rh::make_family(cfg.at("family"));
}

rh::VecC vec_from_json(const json& j) {
  rh::VecC v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        rh::cd(j[i].at(0).get<double>(), j[i].at(1).get<double>());
  return v;
}

rh::HinftyOpts hinfty_opts(const json& cfg) {
  rh::HinftyOpts o;
  o.degree = cfg.value("degree", 24);
  o.seed = cfg.value("seed", 7u);
  if (cfg.contains("tol")) o.track.solver.tol = cfg.at("tol").get<double>();
  return o;
}

int cmd_audit(const Cli& cli, const json& cfg) {
  rh::DfPtr df = family_of(cfg);
  const unsigned seed = cfg.value("seed", 7u);
  std::vector<double> levels;
  if (cfg.contains("levels")) {
    levels = cfg.at("levels").get<std::vector<double>>();
  } else {
    const double R = df->outer_radius();
    for (double l : {0.1, 0.25, 0.5, 0.75, 1.0})
      levels.push_back(0.1 + (R - 0.1) * (l - 0.1) / 0.9);
  }
  const rh::AuditReport hyp =
      rh::hypoconvexity_audit(*df, levels, cfg.value("samples", 40), seed);
  const rh::AuditReport assume = rh::assumption_audit(*df, 32, 6, seed);
  ordered_json out;
  out["hypoconvexity"] = hyp.to_json();
  out["assumptions"] = assume.to_json();
  out["pass"] = hyp.pass && assume.pass;
  write_json(cli, "audit.json", out);
  return (hyp.pass && assume.pass) ? 0 : 1;
}

int cmd_disc(const Cli& cli, const json& cfg) {
  rh::DfPtr df = family_of(cfg);
  const int N = cfg.value("degree", 24);
  const auto S = df->selector_poly();
  for (const auto& s : S)
    if (!s.is_analytic())
      throw rh::AnalyticSelector(
          "disc command needs an analytic-center family; use solve instead");
  const json& dc = cfg.value("disc", json::object());
  rh::VecC offset;
  if (dc.contains("offset")) {
    offset = vec_from_json(dc.at("offset"));
  } else {
    offset = rh::VecC::Zero(df->dim());
    offset[0] = 1.0;
  }
  rh::SolveOpts sopts;
  if (cfg.contains("tol")) sopts.tol = cfg.at("tol").get<double>();
  const rh::StartChart chart = rh::make_start_chart(*df, S, offset, N, sopts);
  rh::DiscState state = chart.to_state();
  if (dc.contains("target")) {
    const rh::TrackOpts topts{sopts};
    const rh::PathResult r = rh::track(
        chart, {chart.base_anchor(), vec_from_json(dc.at("target"))}, *df,
        topts);
    state = r.terminal();
    write_file(cli, "path.csv", rh::path_to_csv(r));
    write_file(cli, "path.jsonl", rh::path_to_json_lines(r));
  }
  write_json(cli, "result.json", rh::disc_state_to_json(state));
  write_json(cli, "certificate.json",
             rh::certificate_to_json(rh::certify(state, *df)));
  return 0;
}

int cmd_solve(const Cli& cli, const json& cfg) {
  rh::DfPtr df = family_of(cfg);
  const rh::Solution sol = rh::solve(df, hinfty_opts(cfg));
  ordered_json out = sol.to_json();
  if (cli.with_oracle && df->dim() == 1) {
    const rh::NehariResult nr = rh::nehari(df->selector_poly()[0]);
    out["oracle_gamma"] = nr.gamma;
    out["oracle_discrepancy"] = std::abs(nr.gamma - sol.gamma);
  }
  write_json(cli, "result.json", out);
  write_json(cli, "certificate.json",
             rh::certificate_to_json(sol.certificate));
  return 0;
}

int cmd_hull(const Cli& cli, const json& cfg) {
  rh::DfPtr df = family_of(cfg);
  const json& hc = cfg.value("hull", json::object());
  rh::cd z0(0.0);
  if (hc.contains("z0"))
    z0 = rh::cd(hc.at("z0").at(0).get<double>(), hc.at("z0").at(1).get<double>());
  const int nrays = hc.value("rays", 32);
  std::vector<rh::VecC> rays;
  for (int k = 0; k < nrays; ++k) {
    rh::VecC u = rh::VecC::Zero(df->dim());
    u[0] = std::polar(1.0, 2.0 * std::numbers::pi * k / nrays);
    rays.push_back(u);
  }
  rh::HullOpts opts;
  opts.degree = cfg.value("degree", 24);
  if (hc.contains("radius_tol"))
    opts.radius_tol = hc.at("radius_tol").get<double>();
  const rh::FiberBoundarySample fb = rh::fiber_boundary(df, z0, rays, opts);
  write_json(cli, "result.json", fb.to_json());
  write_file(cli, "hull.csv", fb.to_csv());
  return 0;
}

int cmd_sweep(const Cli& cli, const json& cfg) {
  if (!cfg.contains("family")) throw rh::ConfigError("config missing \"family\"");
  const json& sc = cfg.value("sweep", json::object());
  if (!sc.contains("tau_grid"))
    throw rh::ConfigError("config missing \"sweep.tau_grid\"");
  const auto grid = sc.at("tau_grid").get<std::vector<double>>();
  const rh::SweepResult sw = rh::sweep(cfg.at("family"), grid, hinfty_opts(cfg));
  write_file(cli, "sweep.csv", sw.to_csv());
  ordered_json out;
  out["tau"] = sw.tau;
  out["gamma"] = sw.gamma;
  auto sols = ordered_json::array();
  for (const auto& s : sw.solutions) sols.push_back(s.to_json());
  out["solutions"] = sols;
  write_json(cli, "result.json", out);
  return 0;
}

int cmd_certify(const Cli& cli, const json& cfg) {
  rh::DfPtr df = family_of(cfg);
  if (!cfg.contains("solution_file"))
    throw rh::ConfigError("config missing \"solution_file\"");
  std::ifstream in(cfg.at("solution_file").get<std::string>());
  if (!in) throw rh::ConfigError("cannot open solution file");
  json sj;
  in >> sj;
  const rh::Solution sol = rh::solution_from_json(sj);
  // re-check flat performance of the claimed controller without re-solving
  const int M = 8 * cfg.value("degree", 24) + 1;
  double dev = 0.0, mean = 0.0;
  std::vector<double> vals(M);
  for (int i = 0; i < M; ++i) {
    const rh::cd z = std::polar(1.0, 2.0 * std::numbers::pi * i / M);
    rh::VecC w(df->dim());
    for (int j = 0; j < df->dim(); ++j) w[j] = sol.phi[j].eval_circle(z);
    vals[i] = df->rho(z, w);
    mean += vals[i];
  }
  mean /= M;
  for (double v : vals) dev = std::max(dev, std::abs(v - sol.gamma));
  const double tol =
      cfg.contains("tol") ? cfg.at("tol").get<double>()
                          : std::max(1e-8, 1e-6 * sol.gamma);
  ordered_json out;
  out["gamma_claimed"] = sol.gamma;
  out["performance_mean"] = mean;
  out["flatness_dev"] = dev;
  out["tolerance"] = tol;
  out["pass"] = dev <= tol;
  write_json(cli, "certificate.json", out);
  return dev <= tol ? 0 : 1;
}

int cmd_oracle(const Cli& cli, const json& cfg) {
  rh::DfPtr df = family_of(cfg);
  const json& oc = cfg.value("oracle", json::object());
  ordered_json out;
  if (df->dim() == 1) {
    const rh::NehariResult nr = rh::nehari(df->selector_poly()[0]);
    out["nehari_gamma"] = nr.gamma;
    out["hankel_dim"] = nr.hankel_dim;
    if (oc.value("minimax", true)) {
      const int D = oc.value("degree", cfg.value("degree", 24));
      const rh::MinimaxResult mm = rh::convex_minimax(*df, D);
      out["minimax_gamma_upper"] = mm.gamma_upper;
      out["minimax_degree"] = D;
    }
  } else {
    throw rh::ConfigError("oracle command supports n = 1 families only");
  }
  write_json(cli, "result.json", out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flat analytic discs, hull fibers, and minimax control"};
  app.require_subcommand(1);
  app.fallthrough();
  Cli cli;
  app.add_option("--config", cli.config_path, "JSON run configuration");
  app.add_option("--out", cli.out_dir, "output directory");
  app.add_option("--seed", cli.seed, "seed override");
  app.add_option("--degree", cli.degree, "discretization degree override");
  app.add_option("--tol", cli.tol, "tolerance override");
  app.add_flag("--oracle", cli.with_oracle, "include oracle cross-check");

  for (const char* name :
       {"audit", "disc", "solve", "hull", "sweep", "certify", "oracle"})
    app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const json cfg = load_config(cli);
    if (cmd == "audit") return cmd_audit(cli, cfg);
    if (cmd == "disc") return cmd_disc(cli, cfg);
    if (cmd == "solve") return cmd_solve(cli, cfg);
    if (cmd == "hull") return cmd_hull(cli, cfg);
    if (cmd == "sweep") return cmd_sweep(cli, cfg);
    if (cmd == "certify") return cmd_certify(cli, cfg);
    if (cmd == "oracle") return cmd_oracle(cli, cfg);
    return 2;
  } catch (const rh::ConfigError& e) {
    ordered_json err{{"error", e.code()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    write_json(cli, "result.json", err);
    return 2;
  } catch (const rh::DomainError& e) {
    ordered_json err{{"error", e.code()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    write_json(cli, "result.json", err);
    return 1;
  } catch (const std::exception& e) {
    ordered_json err{{"error", "Internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    write_json(cli, "result.json", err);
    return 1;
  }
}
