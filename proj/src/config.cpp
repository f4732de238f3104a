#include "hrvin/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hrvin/errors.hpp"
#include "hrvin/units.hpp"

namespace hrvin {

namespace {

using nlohmann::json;

// Strict accessor: every consumed key is recorded; unknown keys fail the
// whole load.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path)
      : object_(j), path_(std::move(path)) {
    if (!object_.is_object()) {
      throw ConfigError("expected object at " + path_);
    }
  }

  ~StrictObject() = default;

  bool has(const std::string& key) {
    consumed_.insert(key);
    return object_.contains(key);
  }

  const json& at(const std::string& key) {
    consumed_.insert(key);
    return object_.at(key);
  }

  template <typename T>
  void load(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("bad value type for " + path_ + "." + key);
    }
  }

  void check_consumed() const {
    for (const auto& [key, value] : object_.items()) {
      if (!consumed_.count(key)) {
        throw ConfigError("unknown key " + path_ + "." + key);
      }
    }
  }

  const json& raw() const { return object_; }
  const std::string& path() const { return path_; }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> consumed_;
};

ObjectiveMode mode_from_label(const std::string& label) {
  if (label == "sum") return ObjectiveMode::Sum;
  if (label == "max") return ObjectiveMode::Max;
  throw ConfigError("unknown objective mode: " + label);
}

}  // namespace

std::string axis_label(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::Bandwidth: return "bandwidth";
    case SweepAxis::Power: return "power";
    case SweepAxis::HapsCapability: return "haps_capability";
    case SweepAxis::RsuCapability: return "rsu_capability";
    case SweepAxis::Speed: return "speed";
  }
  return "none";
}

SweepAxis axis_from_label(const std::string& label) {
  if (label == "none") return SweepAxis::None;
  if (label == "bandwidth") return SweepAxis::Bandwidth;
  if (label == "power") return SweepAxis::Power;
  if (label == "haps_capability") return SweepAxis::HapsCapability;
  if (label == "rsu_capability") return SweepAxis::RsuCapability;
  if (label == "speed") return SweepAxis::Speed;
  throw ConfigError("unknown sweep axis: " + label);
}

SimConfig default_config() {
  SimConfig config;
  config.scenario.radio.beta0 =
      units::reference_pathloss(config.scenario.radio.carrier_freq);
  return config;
}

SimConfig parse_config(const std::string& json_text) {
  json root_json;
  try {
    root_json = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  SimConfig config = default_config();
  auto& scen = config.scenario;
  StrictObject root(root_json, "config");

  if (root.has("road")) {
    StrictObject road(root.at("road"), "road");
    road.load("rsu_positions_m", scen.road.rsu_positions);
    road.load("rsu_coverage_m", scen.road.rsu_coverage);
    road.load("haps_altitude_m", scen.road.haps_altitude);
    bool have_horizontal = road.has("haps_horizontal_m");
    if (have_horizontal) {
      scen.road.haps_horizontal = road.at("haps_horizontal_m").get<double>();
    }
    road.check_consumed();
    scen.road.road_length =
        scen.road.rsu_coverage * scen.road.rsu_positions.size();
    if (!have_horizontal) {
      scen.road.haps_horizontal = scen.road.road_length / 2.0;
    }
  }

  if (root.has("fleet")) {
    StrictObject fleet(root.at("fleet"), "fleet");
    fleet.load("num_icvs", scen.num_icvs);
    fleet.load("speed_mps", scen.speed);
    fleet.check_consumed();
  }

  if (root.has("tasks")) {
    StrictObject tasks(root.at("tasks"), "tasks");
    if (tasks.has("input_kbits")) {
      std::vector<double> kbits = tasks.at("input_kbits").get<std::vector<double>>();
      scen.task_bits.clear();
      for (double v : kbits) scen.task_bits.push_back(units::kbit_to_bit(v));
    }
    tasks.load("density_cycles_per_bit", scen.task_density);
    tasks.check_consumed();
  }

  if (root.has("compute")) {
    StrictObject compute(root.at("compute"), "compute");
    double icv = scen.compute.icv / 1e9;
    double rsu = scen.compute.rsu / 1e9;
    double haps = scen.compute.haps / 1e9;
    compute.load("icv_gcycles_per_s", icv);
    compute.load("rsu_gcycles_per_s", rsu);
    compute.load("haps_gcycles_per_s", haps);
    compute.check_consumed();
    scen.compute.icv = units::gcycles_to_cycles(icv);
    scen.compute.rsu = units::gcycles_to_cycles(rsu);
    scen.compute.haps = units::gcycles_to_cycles(haps);
  }

  if (root.has("radio")) {
    StrictObject radio(root.at("radio"), "radio");
    double bandwidth_mhz = scen.radio.bandwidth / 1e6;
    double power_dbm = 23.0;
    double noise_dbm = -174.0;
    double gain_dbi = 17.0;
    double rician_db = 10.0;
    double carrier_ghz = scen.radio.carrier_freq / 1e9;
    radio.load("bandwidth_mhz", bandwidth_mhz);
    radio.load("tx_power_dbm", power_dbm);
    radio.load("noise_dbm_per_hz", noise_dbm);
    radio.load("pathloss_exponent", scen.radio.pathloss_exponent);
    radio.load("rician_k_db", rician_db);
    radio.load("haps_antenna_gain_dbi", gain_dbi);
    radio.load("carrier_ghz", carrier_ghz);
    const bool beta0_override = radio.has("beta0");
    double beta0 = 0.0;
    if (beta0_override) beta0 = radio.at("beta0").get<double>();
    radio.check_consumed();
    scen.radio.bandwidth = units::mhz_to_hz(bandwidth_mhz);
    scen.radio.tx_power = units::dbm_to_watt(power_dbm);
    scen.radio.noise_density = units::dbm_to_watt(noise_dbm);
    scen.radio.haps_antenna_gain = units::dbi_to_linear(gain_dbi);
    scen.radio.rician_k = units::db_to_linear(rician_db);
    scen.radio.carrier_freq = units::ghz_to_hz(carrier_ghz);
    scen.radio.beta0 = beta0_override
                           ? beta0
                           : units::reference_pathloss(scen.radio.carrier_freq);
  }

  if (root.has("sim")) {
    StrictObject sim(root.at("sim"), "sim");
    sim.load("seed", config.seed);
    sim.load("slot_duration_s", config.dt);
    sim.check_consumed();
    if (config.dt <= 0) throw ConfigError("slot duration must be positive");
  }

  if (root.has("solver")) {
    StrictObject solver(root.at("solver"), "solver");
    solver.load("zeta", config.sca.zeta);
    solver.load("max_sca_iterations", config.sca.max_iterations);
    solver.check_consumed();
    if (config.sca.zeta <= 0 || config.sca.max_iterations < 1) {
      throw ConfigError("invalid solver settings");
    }
  }

  if (root.has("experiment")) {
    StrictObject exp(root.at("experiment"), "experiment");
    auto& e = config.experiment;
    if (exp.has("axis")) {
      e.axis = axis_from_label(exp.at("axis").get<std::string>());
    }
    exp.load("values", e.values);
    exp.load("schemes", e.schemes);
    if (exp.has("modes")) {
      e.modes.clear();
      for (const auto& label : exp.at("modes")) {
        e.modes.push_back(mode_from_label(label.get<std::string>()));
      }
    }
    exp.load("enforce_handoff", e.enforce_handoff);
    exp.load("seed_count", e.seed_count);
    exp.load("seed_base", e.seed_base);
    exp.load("slots", e.slots);
    exp.load("threads", e.threads);
    exp.check_consumed();
  }

  root.check_consumed();
  validate(scen);
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace hrvin
