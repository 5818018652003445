#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path dir;
  Scratch(const std::string& tag) {
    dir = fs::temp_directory_path() / ("hypodisc_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const json& j) const {
    const fs::path p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }
  std::string slurp(const std::string& name) const {
    std::ifstream in(dir / name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  json load(const std::string& name) const { return json::parse(slurp(name)); }
};

int run(const std::string& args) {
  const std::string cmd =
      std::string(HYPODISC_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

json trig_json(int degree, std::vector<std::pair<double, double>> coeffs) {
  json j;
  j["degree"] = degree;
  json arr = json::array();
  for (auto [re, im] : coeffs) arr.push_back({re, im});
  j["coeffs"] = arr;
  return j;
}

json ball_family(json sel) {
  json f;
  f["family"] = "shifted_ball";
  f["n"] = 1;
  f["R"] = 8.0;
  f["S"] = json::array({std::move(sel)});
  return f;
}

json conj_z_cfg() {
  json cfg;
  cfg["family"] = ball_family(trig_json(1, {{1, 0}, {0, 0}, {0, 0}}));
  return cfg;
}

}  // namespace

TEST_CASE("missing or broken config exits 2") {
  Scratch s("cfg");
  CHECK(run("solve --out " + s.dir.string()) == 2);
  const fs::path bad = s.dir / "bad.json";
  std::ofstream(bad) << "{not json";
  CHECK(run("solve --config " + bad.string() + " --out " + s.dir.string()) ==
        2);
  CHECK(run("frobnicate --config " + bad.string()) == 2);

  // degree below the floor is a config error
  const fs::path p = s.write("low.json", conj_z_cfg());
  CHECK(run("solve --config " + p.string() + " --degree 2 --out " +
            s.dir.string()) == 2);
}

TEST_CASE("solve writes gamma and the oracle cross-check") {
  Scratch s("solve");
  const fs::path p = s.write("cfg.json", conj_z_cfg());
  CHECK(run("solve --config " + p.string() + " --oracle --out " +
            s.dir.string()) == 0);
  const json r = s.load("result.json");
  CHECK(std::abs(r.at("gamma").get<double>() - 1.0) <= 1e-6);
  CHECK(r.at("m") == 1);
  CHECK(std::abs(r.at("oracle_gamma").get<double>() - 1.0) <= 1e-12);
  CHECK(r.at("oracle_discrepancy").get<double>() <= 1e-6);
  const json c = s.load("certificate.json");
  CHECK(c.at("winding_ok") == true);
}

TEST_CASE("solve rejects analytic selectors with a domain error") {
  Scratch s("an");
  json cfg;
  cfg["family"] = ball_family(trig_json(1, {{0, 0}, {1, 0}, {0.5, 0}}));
  const fs::path p = s.write("cfg.json", cfg);
  CHECK(run("solve --config " + p.string() + " --out " + s.dir.string()) == 1);
  const json r = s.load("result.json");
  CHECK(r.at("error") == "AnalyticSelector");
}

TEST_CASE("audit pass and fail exit codes") {
  Scratch s("audit");
  json good;
  good["family"]["family"] = "convex_perturbed_ball";
  good["family"]["n"] = 2;
  good["family"]["R"] = 4.0;
  good["family"]["S"] = json::array(
      {trig_json(1, {{0.5, 0}, {0, 0}, {0, 0}}), trig_json(0, {{0, 0}})});
  good["family"]["params"]["A"] = json::array(
      {json::array({trig_json(0, {{0.05, 0}}), trig_json(0, {{0, 0}})}),
       json::array({trig_json(0, {{0, 0}}), trig_json(0, {{0.05, 0}})})});
  const fs::path pg = s.write("good.json", good);
  CHECK(run("audit --config " + pg.string() + " --out " + s.dir.string()) == 0);
  CHECK(s.load("audit.json").at("pass") == true);

  json bad;
  bad["family"]["family"] = "indefinite_test";
  bad["family"]["n"] = 2;
  bad["family"]["R"] = 4.0;
  const fs::path pb = s.write("bad.json", bad);
  CHECK(run("audit --config " + pb.string() + " --out " + s.dir.string()) == 1);
  const json a = s.load("audit.json");
  CHECK(a.at("pass") == false);
  CHECK(a.at("hypoconvexity").at("violations").size() > 0);
}

TEST_CASE("hull radii land on the unit circle") {
  Scratch s("hull");
  json cfg;
  cfg["family"] = ball_family(trig_json(1, {{0, 0}, {1, 0}, {0.5, 0}}));
  cfg["hull"]["z0"] = {0.0, 0.0};
  cfg["hull"]["rays"] = 8;
  cfg["hull"]["radius_tol"] = 1e-9;
  const fs::path p = s.write("cfg.json", cfg);
  CHECK(run("hull --config " + p.string() + " --out " + s.dir.string()) == 0);
  std::istringstream csv(s.slurp("hull.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "ray,angle,radius");
  int rows = 0;
  while (std::getline(csv, line)) {
    const double r = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(std::abs(r - 1.0) <= 1e-8);
    ++rows;
  }
  CHECK(rows == 8);
}

TEST_CASE("sweep csv reproduces the scaling family") {
  Scratch s("sweep");
  json cfg;
  cfg["family"]["family"] = "parametric";
  cfg["family"]["left"] = ball_family(trig_json(1, {{1, 0}, {0, 0}, {0, 0}}));
  cfg["family"]["right"] = ball_family(trig_json(1, {{2, 0}, {0, 0}, {0, 0}}));
  cfg["sweep"]["tau_grid"] = {0.0, 0.5, 1.0};
  cfg["degree"] = 8;
  const fs::path p = s.write("cfg.json", cfg);
  CHECK(run("sweep --config " + p.string() + " --out " + s.dir.string()) == 0);
  const json r = s.load("result.json");
  REQUIRE(r.at("gamma").size() == 3);
  for (size_t i = 0; i < 3; ++i)
    CHECK(std::abs(r.at("gamma")[i].get<double>() -
                   (1.0 + r.at("tau")[i].get<double>())) <= 1e-6);
  std::istringstream csv(s.slurp("sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "tau,gamma,dgamma,dphi_sup");
}

TEST_CASE("certify accepts the solver output and rejects a tampered one") {
  Scratch s("cert");
  const fs::path p = s.write("cfg.json", conj_z_cfg());
  REQUIRE(run("solve --config " + p.string() + " --out " + s.dir.string()) ==
          0);
  json cfg = conj_z_cfg();
  cfg["solution_file"] = (s.dir / "result.json").string();
  const fs::path pc = s.write("cert.json", cfg);
  CHECK(run("certify --config " + pc.string() + " --out " +
            (s.dir / "ok").string()) == 0);

  json sol = s.load("result.json");
  sol["gamma"] = sol["gamma"].get<double>() + 0.01;
  std::ofstream(s.dir / "tampered.json") << sol.dump(2);
  cfg["solution_file"] = (s.dir / "tampered.json").string();
  const fs::path pt = s.write("cert2.json", cfg);
  CHECK(run("certify --config " + pt.string() + " --out " +
            (s.dir / "no").string()) == 1);
  std::ifstream in(s.dir / "no" / "certificate.json");
  json c;
  in >> c;
  CHECK(c.at("pass") == false);
}

TEST_CASE("oracle command reports both bounds") {
  Scratch s("oracle");
  json cfg = conj_z_cfg();
  cfg["oracle"]["degree"] = 8;
  const fs::path p = s.write("cfg.json", cfg);
  CHECK(run("oracle --config " + p.string() + " --out " + s.dir.string()) == 0);
  const json r = s.load("result.json");
  CHECK(std::abs(r.at("nehari_gamma").get<double>() - 1.0) <= 1e-12);
  CHECK(r.at("hankel_dim") == 1);
  CHECK(r.at("minimax_gamma_upper").get<double>() >= 1.0 - 1e-9);
}

TEST_CASE("repeated runs are byte identical") {
  Scratch s("det");
  const fs::path p = s.write("cfg.json", conj_z_cfg());
  REQUIRE(run("solve --config " + p.string() + " --out " +
              (s.dir / "a").string()) == 0);
  REQUIRE(run("solve --config " + p.string() + " --out " +
              (s.dir / "b").string()) == 0);
  CHECK(s.slurp("a/result.json") == s.slurp("b/result.json"));
  CHECK(s.slurp("a/certificate.json") == s.slurp("b/certificate.json"));
}
