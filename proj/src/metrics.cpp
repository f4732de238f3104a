#include "hrvin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hrvin/errors.hpp"

namespace hrvin {

std::string scheme_label(const SchemeConfig& scheme) {
  if (scheme.use_rsu && scheme.use_haps) return "HRVIN";
  if (!scheme.use_rsu && scheme.use_haps) return "woRSU";
  if (scheme.use_rsu && !scheme.use_haps) return "woHAPS";
  return "localOnly";
}

SchemeConfig scheme_from_label(const std::string& label) {
  SchemeConfig scheme;
  if (label == "HRVIN") {
    return scheme;
  }
  if (label == "woRSU") {
    scheme.use_rsu = false;
    return scheme;
  }
  if (label == "woHAPS") {
    scheme.use_haps = false;
    return scheme;
  }
  if (label == "localOnly") {
    scheme.use_rsu = false;
    scheme.use_haps = false;
    return scheme;
  }
  throw ConfigError("unknown scheme label: " + label);
}

void apply_scheme(AssemblyOptions& options, const SchemeConfig& scheme) {
  options.use_rsu = scheme.use_rsu;
  options.use_haps = scheme.use_haps;
  options.enforce_handoff = scheme.enforce_handoff;
}

double jain_fairness(const std::vector<double>& delays) {
  if (delays.empty()) {
    throw std::invalid_argument("jain_fairness: empty input");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double y : delays) {
    if (y < 0.0) throw std::invalid_argument("jain_fairness: negative delay");
    sum += y;
    sum_sq += y * y;
  }
  if (sum_sq == 0.0) {
    throw std::invalid_argument("jain_fairness: all-zero input");
  }
  return sum * sum / (delays.size() * sum_sq);
}

std::vector<double> per_icv_delays(const Allocation& alloc,
                                   const ChannelRealization& channels,
                                   const Scenario& scenario) {
  std::vector<double> delays(alloc.num_icvs());
  for (int n = 0; n < alloc.num_icvs(); ++n) {
    delays[n] = icv_delay(alloc, channels, scenario, n);
  }
  return delays;
}

double failed_workload(const Allocation& alloc, const Scenario& scenario,
                       const ChannelRealization& channels) {
  double cycles = 0.0;
  for (int n = 0; n < alloc.num_icvs(); ++n) {
    const auto& a = alloc.icvs[n];
    if (!a.rsu_on) continue;
    const HandoffCheck check = handoff_feasible(alloc, channels, scenario, n);
    if (!check.feasible) {
      cycles += a.x_rsu * scenario.tasks[n].input_bits *
                scenario.tasks[n].density;
    }
  }
  return cycles;
}

MetricsRecord slot_metrics(const Allocation& alloc, const Scenario& scenario,
                           const ChannelRealization& channels) {
  MetricsRecord record;
  const int n_icvs = alloc.num_icvs();
  if (n_icvs == 0) return record;

  const std::vector<double> delays = per_icv_delays(alloc, channels, scenario);
  double sum = 0.0;
  for (int n = 0; n < n_icvs; ++n) {
    sum += delays[n];
    record.max_delay = std::max(record.max_delay, delays[n]);
    record.share_rsu += alloc.icvs[n].x_rsu;
    record.share_haps += alloc.icvs[n].x_haps;
    record.share_local +=
        std::max(0.0, 1.0 - alloc.icvs[n].x_rsu - alloc.icvs[n].x_haps);
  }
  record.avg_delay = sum / n_icvs;
  record.jain = jain_fairness(delays);
  record.failed_workload = failed_workload(alloc, scenario, channels);
  record.share_rsu /= n_icvs;
  record.share_haps /= n_icvs;
  record.share_local /= n_icvs;
  return record;
}

MetricsRecord summarize(const std::vector<MetricsRecord>& records) {
  MetricsRecord out;
  if (records.empty()) return out;
  for (const auto& r : records) {
    out.avg_delay += r.avg_delay;
    out.max_delay += r.max_delay;
    out.jain += r.jain;
    out.failed_workload += r.failed_workload;
    out.share_local += r.share_local;
    out.share_rsu += r.share_rsu;
    out.share_haps += r.share_haps;
  }
  const double k = static_cast<double>(records.size());
  out.avg_delay /= k;
  out.max_delay /= k;
  out.jain /= k;
  out.failed_workload /= k;
  out.share_local /= k;
  out.share_rsu /= k;
  out.share_haps /= k;
  return out;
}

}  // namespace hrvin
