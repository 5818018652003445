#include "rh/json_io.hpp"

#include "rh/errors.hpp"

namespace rh {

nlohmann::ordered_json trigpoly_to_json(const TrigPoly& p) {
  nlohmann::ordered_json j;
  j["degree"] = p.degree();
  auto coeffs = nlohmann::ordered_json::array();
  for (int k = -p.degree(); k <= p.degree(); ++k)
    coeffs.push_back({p.coeff(k).real(), p.coeff(k).imag()});
  j["coeffs"] = coeffs;
  return j;
}

TrigPoly trigpoly_from_json(const nlohmann::json& j) {
  if (!j.contains("degree") || !j.contains("coeffs"))
    throw ConfigError("TrigPoly JSON: missing \"degree\" or \"coeffs\"");
  const int N = j.at("degree").get<int>();
  const auto& coeffs = j.at("coeffs");
  if (static_cast<int>(coeffs.size()) != 2 * N + 1)
    throw ConfigError("TrigPoly JSON: coefficient count mismatch");
  TrigPoly p(N);
  int k = -N;
  for (const auto& c : coeffs) {
    p.set_coeff(k, cd(c.at(0).get<double>(), c.at(1).get<double>()));
    ++k;
  }
  return p;
}

nlohmann::ordered_json certificate_to_json(const Certificate& c) {
  nlohmann::ordered_json j;
  j["flatness_dev"] = c.flatness_dev;
  j["tangency_resid"] = c.tangency_resid;
  j["bilinear_resid"] = c.bilinear_resid;
  j["winding_ok"] = c.winding_ok;
  j["truncation_loss"] = c.truncation_loss;
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  Certificate c;
  c.flatness_dev = j.at("flatness_dev").get<double>();
  c.tangency_resid = j.at("tangency_resid").get<double>();
  c.bilinear_resid = j.at("bilinear_resid").get<double>();
  c.winding_ok = j.at("winding_ok").get<bool>();
  c.truncation_loss = j.at("truncation_loss").get<double>();
  return c;
}

nlohmann::ordered_json disc_state_to_json(const DiscState& s) {
  nlohmann::ordered_json j;
  auto w = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < s.w.size(); ++i)
    w.push_back({s.w[i].real(), s.w[i].imag()});
  j["w"] = w;
  auto F = nlohmann::ordered_json::array();
  for (const auto& f : s.F) F.push_back(trigpoly_to_json(f));
  j["F"] = F;
  auto G = nlohmann::ordered_json::array();
  for (const auto& g : s.G) G.push_back(trigpoly_to_json(g));
  j["G"] = G;
  j["t"] = s.t;
  return j;
}

DiscState disc_state_from_json(const nlohmann::json& j) {
  DiscState s;
  const auto& w = j.at("w");
  s.w = VecC(w.size());
  for (size_t i = 0; i < w.size(); ++i)
    s.w[static_cast<Eigen::Index>(i)] =
        cd(w[i].at(0).get<double>(), w[i].at(1).get<double>());
  for (const auto& f : j.at("F")) s.F.push_back(trigpoly_from_json(f));
  for (const auto& g : j.at("G")) s.G.push_back(trigpoly_from_json(g));
  s.t = j.at("t").get<double>();
  if (s.F.size() != s.G.size() ||
      static_cast<Eigen::Index>(s.F.size()) != s.w.size())
    throw ConfigError("DiscState JSON: inconsistent dimensions");
  return s;
}

}  // namespace rh
