#pragma once

#include <cstdint>
#include <vector>

#include "hrvin/errors.hpp"

namespace hrvin {

// One-way road covered by consecutive RSU segments plus a quasi-stationary
// HAPS overhead. RSU m (0-based) covers [m*D, (m+1)*D) and sits at the
// segment center; road_length is always num_rsus * D.
struct RoadConfig {
  double rsu_coverage = 160.0;                 // D, meters
  std::vector<double> rsu_positions = {80.0, 240.0};  // meters, increasing
  double road_length = 320.0;                  // meters
  double haps_altitude = 20000.0;        // meters
  double haps_horizontal = 160.0;        // meters along the road axis
};

struct IcvState {
  int id = 0;
  double position = 0.0;  // l, meters from road start
  double speed = 30.0;    // v, m/s
};

struct TaskSpec {
  double input_bits = 0.0;  // task input size (bits)
  double density = 0.0;     // cycles per bit
};

struct ComputeCaps {
  double icv = 2e9;     // cycles/s, onboard
  double rsu = 3.2e10;  // cycles/s, per RSU server
  double haps = 1e11;   // cycles/s, HAPS server
};

// Radio-side parameters, all in linear SI units. Unit conversion happens
// once, at config load.
struct RadioParams {
  double bandwidth = 2e7;             // Hz
  double tx_power = 0.1995262315;     // W (23 dBm)
  double noise_density = 3.9810717055349695e-21;  // W/Hz (-174 dBm/Hz)
  double pathloss_exponent = 3.7;     // NLoS exponent
  double beta0 = 1.4248e-4;           // NLoS reference loss at 1 m
  double rician_k = 10.0;             // linear Rician factor (10 dB)
  double haps_antenna_gain = 50.11872336272722;  // linear (17 dBi)
  double carrier_freq = 2e9;          // Hz
};

struct ScenarioConfig {
  RoadConfig road;
  int num_icvs = 10;
  double speed = 30.0;                   // m/s, common fleet speed
  std::vector<double> task_bits = {1e5, 3e5, 5e5, 7e5, 9e5};
  std::vector<double> task_density = {500, 1000, 1500, 2000, 2500};
  ComputeCaps compute;
  RadioParams radio;
};

// Immutable world snapshot for one decision slot.
struct Scenario {
  RoadConfig road;
  std::vector<IcvState> icvs;
  std::vector<TaskSpec> tasks;                  // one per ICV
  std::vector<std::vector<int>> association;    // per-RSU ICV index sets
  ComputeCaps compute;
  RadioParams radio;
  std::vector<double> task_bits_set;            // draw sets for slot advances
  std::vector<double> task_density_set;

  int num_icvs() const { return static_cast<int>(icvs.size()); }
  int num_rsus() const { return static_cast<int>(road.rsu_positions.size()); }
  // Segment index (0-based) containing position l.
  int rsu_of(double position) const;
};

// Throws ConfigError when the configuration violates its invariants
// (empty RSU list, non-positive capacities, off-center RSUs, ...).
void validate(const ScenarioConfig& config);

// Uniform ICV placement on [0, road_length), task draws uniform over the
// configured discrete sets. Deterministic in the seed.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

// Time until the ICV crosses out of its current RSU segment:
// (D - (l mod D)) / v. Equals D/v when l is an exact multiple of D.
double handoff_time(const IcvState& icv, double coverage);

// Advances every ICV by speed*dt, wrapping at road end (fleet size is
// preserved), recomputes the association sets, and redraws tasks.
Scenario advance_slot(const Scenario& scenario, double dt, std::uint64_t seed);

}  // namespace hrvin
