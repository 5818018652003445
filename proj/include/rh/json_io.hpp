#pragma once

#include "json.hpp"
#include "rh/disc_system.hpp"
#include "rh/trigpoly.hpp"

namespace rh {

// {"degree": N, "coeffs": [[re,im], ...]} with index order -N..N.
nlohmann::ordered_json trigpoly_to_json(const TrigPoly& p);
TrigPoly trigpoly_from_json(const nlohmann::json& j);

nlohmann::ordered_json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

nlohmann::ordered_json disc_state_to_json(const DiscState& s);
DiscState disc_state_from_json(const nlohmann::json& j);

}  // namespace rh
