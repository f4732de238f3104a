// Command-line front end: batch experiments, convergence traces, the
// single-ICV grid oracle, and the numerical validation suite.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrvin/config.hpp"
#include "hrvin/diagnostics.hpp"
#include "hrvin/experiment.hpp"
#include "hrvin/oracle.hpp"
#include "hrvin/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

hrvin::SimConfig load_or_default(const std::string& path) {
  return path.empty() ? hrvin::default_config() : hrvin::load_config(path);
}

struct RunArgs {
  std::string config_path;
  std::string out_path = "results.csv";
  std::string json_path;
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> schemes;
  std::vector<std::string> modes;
  int seeds = -1;
  std::uint64_t seed_base = 0;
  bool seed_base_set = false;
  int slots = -1;
  int threads = -1;
  bool no_handoff = false;
};

int do_run(const RunArgs& args) {
  hrvin::SimConfig config = load_or_default(args.config_path);
  auto& e = config.experiment;
  if (!args.axis.empty()) e.axis = hrvin::axis_from_label(args.axis);
  if (!args.values.empty()) e.values = args.values;
  if (!args.schemes.empty()) e.schemes = args.schemes;
  if (!args.modes.empty()) {
    e.modes.clear();
    for (const auto& label : args.modes) {
      if (label == "sum") {
        e.modes.push_back(hrvin::ObjectiveMode::Sum);
      } else if (label == "max") {
        e.modes.push_back(hrvin::ObjectiveMode::Max);
      } else {
        throw hrvin::ConfigError("unknown mode: " + label);
      }
    }
  }
  if (args.seeds > 0) e.seed_count = args.seeds;
  if (args.seed_base_set) e.seed_base = args.seed_base;
  if (args.slots > 0) e.slots = args.slots;
  if (args.threads >= 0) e.threads = args.threads;
  if (args.no_handoff) e.enforce_handoff = false;

  const hrvin::ExperimentPlan plan = hrvin::plan_from_config(config);
  const std::vector<hrvin::RunRecord> records = hrvin::run_experiment(plan);
  hrvin::write_csv(records, args.out_path);
  if (!args.json_path.empty()) hrvin::write_json(records, args.json_path);

  const int warnings = hrvin::warning_count(records);
  std::cout << records.size() << " rows -> " << args.out_path;
  if (warnings > 0) std::cout << " (" << warnings << " rows flagged)";
  std::cout << "\n";
  return kExitOk;
}

int do_trace(const std::string& config_path, std::uint64_t seed,
             const std::string& out_path, const std::string& dump_path) {
  hrvin::SimConfig config = load_or_default(config_path);
  if (!dump_path.empty()) {
    const hrvin::Scenario scenario = hrvin::generate_scenario(
        config.scenario, hrvin::substream_seed(seed, 0x7363656eULL));
    const hrvin::ChannelRealization channels = hrvin::realize_channels(
        scenario, hrvin::substream_seed(seed, 0x6368616eULL, 0));
    const hrvin::LocalPoint lp = hrvin::init_local_point(scenario, channels);
    const hrvin::ConvexSubproblem sp = hrvin::assemble_subproblem(
        scenario, channels, lp, hrvin::ObjectiveMode::Sum);
    std::ofstream out(dump_path);
    if (!out) throw hrvin::IoError("cannot open dump file: " + dump_path);
    sp.dump(out);
  }
  const auto [sum_trace, max_trace] =
      hrvin::emit_convergence_trace(config, seed, out_path);
  std::cout << "sum: " << sum_trace.subproblems() << " iterations, objective "
            << sum_trace.objective << "\n"
            << "max: " << max_trace.subproblems() << " iterations, objective "
            << max_trace.objective << "\n";
  return kExitOk;
}

int do_oracle(const std::string& config_path, std::uint64_t seed,
              int resolution) {
  hrvin::SimConfig config = load_or_default(config_path);
  config.scenario.num_icvs = 1;
  const hrvin::Scenario scenario = hrvin::generate_scenario(
      config.scenario, hrvin::substream_seed(seed, 0x7363656eULL));
  const hrvin::ChannelRealization channels = hrvin::realize_channels(
      scenario, hrvin::substream_seed(seed, 0x6368616eULL, 0));

  const hrvin::OracleResult oracle =
      hrvin::grid_search_single_icv(scenario, channels, resolution);
  const hrvin::ScaTrace trace = hrvin::sca_solve(
      scenario, channels, hrvin::ObjectiveMode::Sum, config.sca);

  std::cout << "grid best delay:   " << oracle.best_delay << " s (x_r "
            << oracle.x_rsu << ", x_h " << oracle.x_haps << ", band "
            << oracle.band_split << ", power " << oracle.power_split << ", "
            << oracle.evaluations << " cells)\n";
  std::cout << "solver objective:  " << trace.objective << " s ("
            << trace.subproblems() << " iterations)\n";
  const double gap = (trace.objective - oracle.best_delay) /
                     std::max(1e-12, oracle.best_delay);
  std::cout << "relative gap:      " << gap << "\n";
  return kExitOk;
}

int do_validate(const std::string& config_path) {
  const hrvin::SimConfig config = load_or_default(config_path);
  const int failures = hrvin::run_validation(config, std::cout);
  std::cout << (failures == 0 ? "validation passed\n" : "validation FAILED\n");
  return failures == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Handoff-aware three-layer task offloading simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run an experiment plan");
  run->add_option("--config", run_args.config_path, "JSON config file");
  run->add_option("--out", run_args.out_path, "CSV output path");
  run->add_option("--json-out", run_args.json_path, "optional JSON mirror");
  run->add_option("--axis", run_args.axis,
                  "sweep axis: none|bandwidth|power|haps_capability|"
                  "rsu_capability|speed");
  run->add_option("--values", run_args.values, "sweep values (natural units)");
  run->add_option("--schemes", run_args.schemes,
                  "schemes: HRVIN, woRSU, woHAPS, localOnly");
  run->add_option("--modes", run_args.modes, "objectives: sum, max");
  run->add_option("--seeds", run_args.seeds, "number of consecutive seeds");
  auto* base_opt =
      run->add_option("--seed-base", run_args.seed_base, "first seed");
  run->add_option("--slots", run_args.slots, "slots per seed");
  run->add_option("--threads", run_args.threads, "worker threads (0 = auto)");
  run->add_flag("--no-handoff", run_args.no_handoff,
                "drop the handoff constraint (failed-workload ablation)");

  std::string trace_config, trace_out = "trace.csv", dump_path;
  std::uint64_t trace_seed = 1;
  auto* trace = app.add_subcommand("trace", "emit SCA convergence traces");
  trace->add_option("--config", trace_config, "JSON config file");
  trace->add_option("--seed", trace_seed, "seed");
  trace->add_option("--out", trace_out, "trace CSV path");
  trace->add_option("--dump-subproblem", dump_path,
                    "write the assembled subproblem as JSON");

  std::string oracle_config;
  std::uint64_t oracle_seed = 1;
  int resolution = 200;
  auto* oracle = app.add_subcommand(
      "oracle", "grid brute-force check on a single-ICV instance");
  oracle->add_option("--config", oracle_config, "JSON config file");
  oracle->add_option("--seed", oracle_seed, "seed");
  oracle->add_option("--resolution", resolution, "grid points per axis");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "numerical hygiene suite");
  validate->add_option("--config", validate_config, "JSON config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      run_args.seed_base_set = base_opt->count() > 0;
      return do_run(run_args);
    }
    if (trace->parsed()) {
      return do_trace(trace_config, trace_seed, trace_out, dump_path);
    }
    if (oracle->parsed()) {
      return do_oracle(oracle_config, oracle_seed, resolution);
    }
    if (validate->parsed()) {
      return do_validate(validate_config);
    }
  } catch (const hrvin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hrvin::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
