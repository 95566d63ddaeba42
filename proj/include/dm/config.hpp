/**
 * config.hpp — scenario configuration loading. One JSON file declares the
 * topology, UE profiles, alarm schedule, radio/handover/oracle/policy
 * parameters and cell dynamics; units are embedded in key names. The full
 * schema is documented in the README.
 */

#pragma once

#include <string>

#include "dm/sim.hpp"

namespace dm::cfg {

/// Parse and validate a scenario file. Throws ConfigError with the file
/// name and offending key on any problem.
sim::Scenario load_scenario(const std::string& path);

}  // namespace dm::cfg
