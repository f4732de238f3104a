#include "hrvin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hrvin {

namespace {

// Sentinel cost-per-bit for dead links (zero bandwidth or power). Finite so
// that 0 bits * kDeadLink = 0 exactly, while any positive split is rejected.
constexpr double kDeadLink = 1e30;

}  // namespace

OracleResult grid_search_single_icv(const Scenario& scenario,
                                    const ChannelRealization& channels,
                                    int resolution, bool enforce_handoff) {
  if (scenario.num_icvs() != 1) {
    throw std::invalid_argument("grid oracle handles single-ICV instances");
  }
  if (resolution < 2) {
    throw std::invalid_argument("grid oracle needs resolution >= 2");
  }

  const auto& radio = scenario.radio;
  const auto& task = scenario.tasks[0];
  const double eps = task.input_bits;
  const double work = eps * task.density;
  const double prop_r = channels.prop_rsu[0];
  const double prop_h = channels.prop_haps[0];
  const double deadline =
      handoff_time(scenario.icvs[0], scenario.road.rsu_coverage);
  // Mirrors the solver's route-disable rule for deadlines at the
  // propagation floor.
  const bool rsu_usable = !enforce_handoff || deadline > prop_r + 1e-6;

  const int r = resolution;
  const int k = r + 1;

  // Cost per unit split, seconds: offload + compute with f = 1.
  // c_rsu[s*k + q] for bandwidth split s/r to the RSU link and power split
  // q/r to the RSU link.
  std::vector<double> cost_rsu(k * k), cost_haps(k * k);
  for (int s = 0; s <= r; ++s) {
    const double b_r = static_cast<double>(s) / r;
    const double b_h = 1.0 - b_r;
    for (int q = 0; q <= r; ++q) {
      const double p_r = static_cast<double>(q) / r;
      const double p_h = 1.0 - p_r;
      double cr = kDeadLink;
      if (b_r > 0.0 && p_r > 0.0) {
        const double rate = link_rate(b_r, radio.bandwidth, p_r,
                                      radio.tx_power, channels.gain_rsu[0],
                                      radio.noise_density);
        if (rate > 0.0) cr = eps / rate + work / scenario.compute.rsu;
      }
      double chp = kDeadLink;
      if (b_h > 0.0 && p_h > 0.0) {
        const double rate = link_rate(b_h, radio.bandwidth, p_h,
                                      radio.tx_power, channels.gain_haps[0],
                                      radio.noise_density);
        if (rate > 0.0) chp = eps / rate + work / scenario.compute.haps;
      }
      cost_rsu[s * k + q] = cr;
      cost_haps[s * k + q] = chp;
    }
  }

  // Local-delay table indexed by the split pair.
  const double local_coef = work / scenario.compute.icv;
  std::vector<double> xs(k);
  for (int i = 0; i <= r; ++i) xs[i] = static_cast<double>(i) / r;

  OracleResult best;
  best.best_delay = std::numeric_limits<double>::infinity();

  for (int s = 0; s <= r; ++s) {
    for (int q = 0; q <= r; ++q) {
      const double cr = cost_rsu[s * k + q];
      const double ch = cost_haps[s * k + q];
      const double xr_cap =
          (enforce_handoff && rsu_usable) ? (deadline - prop_r) / cr : 2.0;
      for (int i = 0; i <= r; ++i) {
        const double xr = rsu_usable ? xs[i] : 0.0;
        const double t_rsu = rsu_usable ? prop_r + xr * cr : 0.0;
        if (rsu_usable) {
          if (xr > xr_cap) break;  // handoff-infeasible; larger xr only worse
          if (t_rsu >= best.best_delay) break;
        }
        for (int j = 0; j + i <= r; ++j) {
          const double xh = xs[j];
          const double t_haps = prop_h + xh * ch;
          if (t_haps >= best.best_delay) break;  // monotone in xh
          const double t_local = local_coef * (1.0 - xr - xh);
          const double delay = std::max({t_local, t_rsu, t_haps});
          ++best.evaluations;
          if (delay < best.best_delay) {
            best.best_delay = delay;
            best.x_rsu = xr;
            best.x_haps = xh;
            best.band_split = static_cast<double>(s) / r;
            best.power_split = static_cast<double>(q) / r;
          }
        }
        if (!rsu_usable) break;  // xr pinned at zero
      }
    }
  }
  return best;
}

}  // namespace hrvin
