#pragma once

#include <json.hpp>

#include "pwl/models.hpp"

// JSON model descriptors, shared by the CLI and the round-trip tests.
// Shapes:
//   {"kind":"two-region","m":..,"k":..,"epsilon":..}
//   {"kind":"three-region","rho":..,"mu":..,"m":..,"k":..,"epsilon":..}
//   {"kind":"buffer","a":..,"m":..,"k":..,"epsilon":..}
//   {"kind":"dk","a":..,"eta":..,"b":..,"I":..,"epsilon":..}
//   {"kind":"modified-dk",...,"s":..,"rho":..[,"eta1":..]}

namespace pwl {

PwlSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const PwlSystem& sys);

}  // namespace pwl
