#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrvin/metrics.hpp"
#include "hrvin/sca.hpp"
#include "hrvin/scenario.hpp"

namespace hrvin {

enum class SweepAxis { None, Bandwidth, Power, HapsCapability, RsuCapability, Speed };

std::string axis_label(SweepAxis axis);
SweepAxis axis_from_label(const std::string& label);  // throws ConfigError

// Optional experiment section of the config file (flags may override).
struct ExperimentConfig {
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;            // MHz, dBm, Gcycles/s, or m/s
  std::vector<std::string> schemes = {"HRVIN"};
  std::vector<ObjectiveMode> modes = {ObjectiveMode::Sum};
  bool enforce_handoff = true;
  int seed_count = 20;
  std::uint64_t seed_base = 1;
  int slots = 1;
  int threads = 0;  // 0 = hardware concurrency
};

struct SimConfig {
  ScenarioConfig scenario;
  std::uint64_t seed = 1;
  double dt = 1.0;  // slot duration, seconds
  ScaOptions sca;
  ExperimentConfig experiment;
};

// Defaults matching the stock two-RSU, ten-ICV setup.
SimConfig default_config();

// Strict JSON loader: unknown keys anywhere are rejected with ConfigError;
// missing keys fall back to defaults. Unit suffixes in key names (mhz, dbm,
// dbi, kbits, gcycles) are converted to SI once, here.
SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& json_text);

}  // namespace hrvin
