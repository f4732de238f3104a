#include "hrvin/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hrvin/errors.hpp"
#include "hrvin/rng.hpp"
#include "hrvin/units.hpp"

namespace hrvin {

namespace {

constexpr std::uint64_t kScenarioTag = 0x7363656eULL;
constexpr std::uint64_t kSlotTag = 0x736c6f74ULL;
constexpr std::uint64_t kChannelTag = 0x6368616eULL;

ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis,
                          double value) {
  ScenarioConfig config = base;
  switch (axis) {
    case SweepAxis::None:
      break;
    case SweepAxis::Bandwidth:
      config.radio.bandwidth = units::mhz_to_hz(value);
      break;
    case SweepAxis::Power:
      config.radio.tx_power = units::dbm_to_watt(value);
      break;
    case SweepAxis::HapsCapability:
      config.compute.haps = units::gcycles_to_cycles(value);
      break;
    case SweepAxis::RsuCapability:
      config.compute.rsu = units::gcycles_to_cycles(value);
      break;
    case SweepAxis::Speed:
      config.speed = value;
      break;
  }
  return config;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void validate(const ExperimentPlan& plan) {
  if (plan.schemes.empty()) throw ConfigError("plan has no schemes");
  if (plan.seeds.empty()) throw ConfigError("plan has no seeds");
  if (plan.slots < 1) throw ConfigError("plan needs at least one slot");
  if (plan.axis != SweepAxis::None) {
    if (plan.values.empty()) throw ConfigError("sweep axis without values");
    for (std::size_t i = 1; i < plan.values.size(); ++i) {
      if (plan.values[i] <= plan.values[i - 1]) {
        throw ConfigError("sweep values must be strictly increasing");
      }
    }
  }
  validate(plan.base.scenario);
}

ExperimentPlan plan_from_config(const SimConfig& config) {
  ExperimentPlan plan;
  plan.base = config;
  const auto& e = config.experiment;
  plan.axis = e.axis;
  plan.values = e.values;
  if (plan.axis == SweepAxis::None) plan.values.clear();
  for (const auto& label : e.schemes) {
    for (ObjectiveMode mode : e.modes) {
      SchemeConfig scheme = scheme_from_label(label);
      scheme.enforce_handoff = e.enforce_handoff;
      scheme.mode = mode;
      plan.schemes.push_back(scheme);
    }
  }
  for (int i = 0; i < e.seed_count; ++i) {
    plan.seeds.push_back(e.seed_base + static_cast<std::uint64_t>(i));
  }
  plan.slots = e.slots;
  plan.threads = e.threads;
  validate(plan);
  return plan;
}

std::vector<RunRecord> run_experiment(const ExperimentPlan& plan) {
  validate(plan);
  const std::vector<double> axis_values =
      plan.axis == SweepAxis::None ? std::vector<double>{0.0} : plan.values;

  struct Unit {
    int axis_index;
    int scheme_index;
    int seed_index;
  };
  std::vector<Unit> units;
  for (int a = 0; a < static_cast<int>(axis_values.size()); ++a) {
    for (int c = 0; c < static_cast<int>(plan.schemes.size()); ++c) {
      for (int s = 0; s < static_cast<int>(plan.seeds.size()); ++s) {
        units.push_back({a, c, s});
      }
    }
  }

  std::vector<std::vector<RunRecord>> results(units.size());
  std::atomic<std::size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t u = cursor.fetch_add(1);
      if (u >= units.size()) return;
      const Unit unit = units[u];
      try {
        const double axis_value = axis_values[unit.axis_index];
        const ScenarioConfig config =
            apply_axis(plan.base.scenario, plan.axis, axis_value);
        const SchemeConfig scheme = plan.schemes[unit.scheme_index];
        const std::uint64_t seed = plan.seeds[unit.seed_index];

        ScaOptions sca = plan.base.sca;
        apply_scheme(sca.assembly, scheme);

        // The slot chain (positions, tasks, fading) is derived purely from
        // (seed, slot); schemes and most axes see identical draws.
        Scenario scenario =
            generate_scenario(config, substream_seed(seed, kScenarioTag));
        std::vector<RunRecord>& rows = results[u];
        rows.reserve(plan.slots);
        for (int slot = 0; slot < plan.slots; ++slot) {
          if (slot > 0) {
            scenario = advance_slot(scenario, plan.base.dt,
                                    substream_seed(seed, kSlotTag, slot));
          }
          const ChannelRealization channels = realize_channels(
              scenario, substream_seed(seed, kChannelTag, slot));

          const ScaTrace trace =
              sca_solve(scenario, channels, scheme.mode, sca);

          RunRecord record;
          record.axis_value = axis_value;
          record.axis_index = unit.axis_index;
          record.scheme_index = unit.scheme_index;
          record.scheme = scheme_label(scheme);
          record.mode = scheme.mode;
          record.seed = seed;
          record.slot = slot;
          record.metrics = slot_metrics(trace.allocation, scenario, channels);
          record.sca_iterations = trace.subproblems();
          record.converged = trace.converged;
          record.warning = trace.warning || trace.failed;

          const int n_icvs = scenario.num_icvs();
          record.icv_delay.resize(n_icvs);
          record.icv_x_rsu.resize(n_icvs);
          record.icv_x_haps.resize(n_icvs);
          record.icv_deadline.resize(n_icvs);
          record.icv_rsu_service.resize(n_icvs);
          record.icv_rsu_slack.resize(n_icvs);
          double checksum = 0.0;
          for (int n = 0; n < n_icvs; ++n) {
            const auto& a = trace.allocation.icvs[n];
            record.icv_delay[n] =
                icv_delay(trace.allocation, channels, scenario, n);
            record.icv_x_rsu[n] = a.x_rsu;
            record.icv_x_haps[n] = a.x_haps;
            record.icv_deadline[n] =
                handoff_time(scenario.icvs[n], scenario.road.rsu_coverage);
            double service = 0.0;
            double slack = record.icv_deadline[n];
            if (a.rsu_on) {
              const double branch =
                  rsu_branch_delay(trace.allocation, channels, scenario, n);
              service = branch - channels.prop_rsu[n];
              slack = record.icv_deadline[n] - branch;
            }
            record.icv_rsu_service[n] = service;
            record.icv_rsu_slack[n] = slack;
            checksum += channels.gain_rsu[n] + channels.gain_haps[n];
          }
          record.channel_checksum = checksum;
          rows.push_back(std::move(record));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int n_threads = plan.threads > 0
                      ? plan.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp<int>(n_threads, 1,
                              static_cast<int>(std::max<std::size_t>(
                                  1, units.size())));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  // Merge in deterministic (axis, scheme, seed, slot) order regardless of
  // worker completion order.
  std::vector<RunRecord> merged;
  for (auto& rows : results) {
    for (auto& row : rows) merged.push_back(std::move(row));
  }
  std::sort(merged.begin(), merged.end(),
            [](const RunRecord& a, const RunRecord& b) {
              return std::tie(a.axis_index, a.scheme_index, a.seed, a.slot) <
                     std::tie(b.axis_index, b.scheme_index, b.seed, b.slot);
            });
  return merged;
}

void write_csv(const std::vector<RunRecord>& records, std::ostream& os) {
  os << "axis_value,scheme,mode,seed,slot,avg_delay,max_delay,jain,"
        "failed_workload,share_local,share_rsu,share_haps,sca_iters\r\n";
  for (const auto& r : records) {
    os << format_double(r.axis_value) << ',' << csv_escape(r.scheme) << ','
       << (r.mode == ObjectiveMode::Sum ? "sum" : "max") << ',' << r.seed
       << ',' << r.slot << ',' << format_double(r.metrics.avg_delay) << ','
       << format_double(r.metrics.max_delay) << ','
       << format_double(r.metrics.jain) << ','
       << format_double(r.metrics.failed_workload) << ','
       << format_double(r.metrics.share_local) << ','
       << format_double(r.metrics.share_rsu) << ','
       << format_double(r.metrics.share_haps) << ',' << r.sca_iterations
       << "\r\n";
  }
}

void write_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  write_csv(records, out);
  if (!out.good()) throw IoError("write failed: " + path);
}

void write_json(const std::vector<RunRecord>& records, std::ostream& os) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : records) {
    j.push_back({{"axis_value", r.axis_value},
                 {"scheme", r.scheme},
                 {"mode", r.mode == ObjectiveMode::Sum ? "sum" : "max"},
                 {"seed", r.seed},
                 {"slot", r.slot},
                 {"avg_delay", r.metrics.avg_delay},
                 {"max_delay", r.metrics.max_delay},
                 {"jain", r.metrics.jain},
                 {"failed_workload", r.metrics.failed_workload},
                 {"share_local", r.metrics.share_local},
                 {"share_rsu", r.metrics.share_rsu},
                 {"share_haps", r.metrics.share_haps},
                 {"sca_iters", r.sca_iterations}});
  }
  os << j.dump(2) << "\n";
}

void write_json(const std::vector<RunRecord>& records,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  write_json(records, out);
  if (!out.good()) throw IoError("write failed: " + path);
}

int warning_count(const std::vector<RunRecord>& records) {
  int count = 0;
  for (const auto& r : records) count += r.warning || !r.converged ? 1 : 0;
  return count;
}

std::pair<ScaTrace, ScaTrace> emit_convergence_trace(const SimConfig& config,
                                                     std::uint64_t seed,
                                                     const std::string& path) {
  const Scenario scenario = generate_scenario(
      config.scenario, substream_seed(seed, kScenarioTag));
  const ChannelRealization channels =
      realize_channels(scenario, substream_seed(seed, kChannelTag, 0));

  const ScaTrace sum_trace =
      sca_solve(scenario, channels, ObjectiveMode::Sum, config.sca);
  const ScaTrace max_trace =
      sca_solve(scenario, channels, ObjectiveMode::Max, config.sca);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open trace file: " + path);
  out << "mode,iter,objective,newton_steps,max_violation\r\n";
  auto emit = [&out](const char* mode, const ScaTrace& trace) {
    int i = 0;
    for (const auto& it : trace.iterations) {
      out << mode << ',' << i++ << ',' << format_double(it.objective) << ','
          << it.newton_steps << ',' << format_double(it.max_violation)
          << "\r\n";
    }
  };
  emit("sum", sum_trace);
  emit("max", max_trace);
  if (!out.good()) throw IoError("write failed: " + path);
  return {sum_trace, max_trace};
}

}  // namespace hrvin
