#pragma once

#include <string>
#include <vector>

#include "hrvin/convex_core.hpp"
#include "hrvin/delay_model.hpp"

namespace hrvin {

// Baseline schemes: HRVIN keeps all three routes, woRSU drops RSU computing,
// woHAPS drops HAPS computing. The handoff constraint can be lifted for the
// failed-workload ablation.
struct SchemeConfig {
  bool use_rsu = true;
  bool use_haps = true;
  bool enforce_handoff = true;
  ObjectiveMode mode = ObjectiveMode::Sum;
};

std::string scheme_label(const SchemeConfig& scheme);
// Parses "HRVIN" / "woRSU" / "woHAPS" (route flags only). Throws ConfigError.
SchemeConfig scheme_from_label(const std::string& label);

// Applies the scheme's route/handoff flags onto an assembly.
void apply_scheme(AssemblyOptions& options, const SchemeConfig& scheme);

// Jain index (sum y)^2 / (N sum y^2), in [1/N, 1]. Throws
// std::invalid_argument for empty or all-zero input.
double jain_fairness(const std::vector<double>& delays);

std::vector<double> per_icv_delays(const Allocation& alloc,
                                   const ChannelRealization& channels,
                                   const Scenario& scenario);

// Cycles of RSU-assigned work whose branch delay misses the handoff
// deadline: sum over late ICVs of x_r * eps * lambda. Zero whenever the
// allocation was produced with the handoff rows active.
double failed_workload(const Allocation& alloc, const Scenario& scenario,
                       const ChannelRealization& channels);

struct MetricsRecord {
  double avg_delay = 0.0;
  double max_delay = 0.0;
  double jain = 0.0;
  double failed_workload = 0.0;  // cycles
  double share_local = 0.0;
  double share_rsu = 0.0;
  double share_haps = 0.0;
};

// Per-slot metrics from one solved allocation. Split shares are unweighted
// means of (1 - x_r - x_h, x_r, x_h) across ICVs.
MetricsRecord slot_metrics(const Allocation& alloc, const Scenario& scenario,
                           const ChannelRealization& channels);

// Field-wise means across records (per-ICV means were already taken).
MetricsRecord summarize(const std::vector<MetricsRecord>& records);

}  // namespace hrvin
