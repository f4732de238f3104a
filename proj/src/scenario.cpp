#include "hrvin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrvin/rng.hpp"

namespace hrvin {

namespace {

constexpr std::uint64_t kPositionTag = 0x706f736974ULL;
constexpr std::uint64_t kTaskTag = 0x7461736bULL;

double draw_from_set(const std::vector<double>& values, Rng& rng) {
  const auto k = static_cast<std::size_t>(rng.uniform() * values.size());
  return values[std::min(k, values.size() - 1)];
}

std::vector<TaskSpec> draw_tasks(const std::vector<double>& bits_set,
                                 const std::vector<double>& density_set,
                                 int count, Rng& rng) {
  std::vector<TaskSpec> tasks(count);
  for (auto& task : tasks) {
    task.input_bits = draw_from_set(bits_set, rng);
    task.density = draw_from_set(density_set, rng);
  }
  return tasks;
}

std::vector<std::vector<int>> build_association(const Scenario& scenario) {
  std::vector<std::vector<int>> assoc(scenario.num_rsus());
  for (int n = 0; n < scenario.num_icvs(); ++n) {
    assoc[scenario.rsu_of(scenario.icvs[n].position)].push_back(n);
  }
  return assoc;
}

}  // namespace

int Scenario::rsu_of(double position) const {
  const int m = static_cast<int>(std::floor(position / road.rsu_coverage));
  return std::clamp(m, 0, num_rsus() - 1);
}

void validate(const ScenarioConfig& config) {
  const auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (config.road.rsu_positions.empty()) fail("no RSU positions configured");
  if (config.road.rsu_coverage <= 0) fail("RSU coverage must be positive");
  if (config.road.haps_altitude <= 0) fail("HAPS altitude must be positive");
  const double d = config.road.rsu_coverage;
  const int m = static_cast<int>(config.road.rsu_positions.size());
  for (int i = 0; i < m; ++i) {
    const double expected = (i + 0.5) * d;
    if (std::abs(config.road.rsu_positions[i] - expected) > 1e-6 * d) {
      fail("RSU positions must be the centers of contiguous segments");
    }
  }
  if (std::abs(config.road.road_length - m * d) > 1e-6 * d) {
    fail("road length must equal num_rsus * coverage");
  }
  if (config.num_icvs < 0) fail("negative fleet size");
  if (config.speed <= 0) fail("ICV speed must be positive");
  if (config.task_bits.empty() || config.task_density.empty()) {
    fail("task draw sets must be non-empty");
  }
  for (double v : config.task_bits) {
    if (v <= 0) fail("task input sizes must be positive");
  }
  for (double v : config.task_density) {
    if (v <= 0) fail("task densities must be positive");
  }
  if (config.compute.icv <= 0 || config.compute.rsu <= 0 ||
      config.compute.haps <= 0) {
    fail("compute capacities must be positive");
  }
  const auto& r = config.radio;
  if (r.bandwidth <= 0 || r.tx_power <= 0 || r.noise_density <= 0 ||
      r.beta0 <= 0 || r.carrier_freq <= 0 || r.haps_antenna_gain <= 0 ||
      r.pathloss_exponent <= 0 || r.rician_k < 0) {
    fail("radio parameters must be positive");
  }
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  validate(config);
  Scenario scenario;
  scenario.road = config.road;
  scenario.compute = config.compute;
  scenario.radio = config.radio;
  scenario.task_bits_set = config.task_bits;
  scenario.task_density_set = config.task_density;

  Rng pos_rng(substream_seed(seed, kPositionTag));
  scenario.icvs.resize(config.num_icvs);
  for (int n = 0; n < config.num_icvs; ++n) {
    scenario.icvs[n].id = n;
    scenario.icvs[n].position = pos_rng.uniform() * config.road.road_length;
    scenario.icvs[n].speed = config.speed;
  }

  Rng task_rng(substream_seed(seed, kTaskTag));
  scenario.tasks = draw_tasks(config.task_bits, config.task_density,
                              config.num_icvs, task_rng);
  scenario.association = build_association(scenario);
  return scenario;
}

double handoff_time(const IcvState& icv, double coverage) {
  const double into_segment = std::fmod(icv.position, coverage);
  return (coverage - into_segment) / icv.speed;
}

Scenario advance_slot(const Scenario& scenario, double dt, std::uint64_t seed) {
  Scenario next = scenario;
  const double road_length = scenario.road.road_length;
  for (auto& icv : next.icvs) {
    icv.position = std::fmod(icv.position + icv.speed * dt, road_length);
  }
  Rng task_rng(substream_seed(seed, kTaskTag));
  next.tasks = draw_tasks(scenario.task_bits_set, scenario.task_density_set,
                          scenario.num_icvs(), task_rng);
  next.association = build_association(next);
  return next;
}

}  // namespace hrvin
