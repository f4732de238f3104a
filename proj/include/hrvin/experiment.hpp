#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hrvin/config.hpp"
#include "hrvin/metrics.hpp"
#include "hrvin/sca.hpp"

namespace hrvin {

struct ExperimentPlan {
  SimConfig base;
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;  // natural units (MHz, dBm, Gcycles/s, m/s)
  std::vector<SchemeConfig> schemes;
  std::vector<std::uint64_t> seeds;
  int slots = 1;
  int threads = 0;  // 0 = hardware concurrency
};

// Throws ConfigError on an invalid plan (no seeds, no schemes,
// non-increasing sweep values, ...).
void validate(const ExperimentPlan& plan);
ExperimentPlan plan_from_config(const SimConfig& config);

// One solved (axis value, scheme, seed, slot) cell, with per-ICV detail kept
// for downstream analysis.
struct RunRecord {
  double axis_value = 0.0;
  int axis_index = 0;
  int scheme_index = 0;
  std::string scheme;
  ObjectiveMode mode = ObjectiveMode::Sum;
  std::uint64_t seed = 0;
  int slot = 0;
  MetricsRecord metrics;
  int sca_iterations = 0;
  bool converged = false;
  bool warning = false;
  std::vector<double> icv_delay;
  std::vector<double> icv_x_rsu;
  std::vector<double> icv_x_haps;
  std::vector<double> icv_deadline;     // seconds
  std::vector<double> icv_rsu_service;  // offload + compute time, seconds
  std::vector<double> icv_rsu_slack;    // deadline minus RSU branch delay
  double channel_checksum = 0.0;        // fingerprint of the channel draw
};

// Runs the full (axis x scheme x seed x slot) matrix on a worker pool.
// Schemes compared at the same (seed, slot) see identical channel
// realizations and task draws; rows come back in deterministic order.
std::vector<RunRecord> run_experiment(const ExperimentPlan& plan);

// CSV with columns: axis_value, scheme, mode, seed, slot, avg_delay,
// max_delay, jain, failed_workload, share_local, share_rsu, share_haps,
// sca_iters. RFC-4180 quoting.
void write_csv(const std::vector<RunRecord>& records, std::ostream& os);
void write_csv(const std::vector<RunRecord>& records, const std::string& path);
void write_json(const std::vector<RunRecord>& records, std::ostream& os);
void write_json(const std::vector<RunRecord>& records, const std::string& path);

// Number of records flagged warning or non-converged.
int warning_count(const std::vector<RunRecord>& records);

// Convergence traces for both objectives on the slot-0 scenario of `seed`,
// written as CSV columns (mode, iter, objective, newton_steps,
// max_violation). Returns the two traces (sum first).
std::pair<ScaTrace, ScaTrace> emit_convergence_trace(const SimConfig& config,
                                                     std::uint64_t seed,
                                                     const std::string& path);

}  // namespace hrvin
