#include "hrvin/delay_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace hrvin {

double local_delay(const TaskSpec& task, double x_rsu, double x_haps,
                   double local_cap) {
  if (x_rsu + x_haps > 1.0 + 1e-12) {
    throw std::domain_error("local_delay: split ratios exceed 1");
  }
  const double local_part = std::max(0.0, 1.0 - x_rsu - x_haps);
  return local_part * task.input_bits * task.density / local_cap;
}

double rsu_delay(const TaskSpec& task, double x_rsu, double rate,
                 double prop_delay, double f_rsu, double rsu_cap) {
  if (rate <= 0) throw std::domain_error("rsu_delay: rate must be positive");
  if (f_rsu <= 0) {
    throw std::domain_error("rsu_delay: compute ratio must be positive");
  }
  return prop_delay + x_rsu * task.input_bits / rate +
         x_rsu * task.input_bits * task.density / (f_rsu * rsu_cap);
}

double haps_delay(const TaskSpec& task, double x_haps, double rate,
                  double prop_delay, double f_haps, double haps_cap) {
  if (rate <= 0) throw std::domain_error("haps_delay: rate must be positive");
  if (f_haps <= 0) {
    throw std::domain_error("haps_delay: compute ratio must be positive");
  }
  return prop_delay + x_haps * task.input_bits / rate +
         x_haps * task.input_bits * task.density / (f_haps * haps_cap);
}

double local_branch_delay(const Allocation& alloc, const Scenario& scenario,
                          int n) {
  const auto& a = alloc.icvs[n];
  return local_delay(scenario.tasks[n], a.x_rsu, a.x_haps,
                     scenario.compute.icv);
}

double rsu_branch_delay(const Allocation& alloc, const ChannelRealization& ch,
                        const Scenario& scenario, int n) {
  const auto& a = alloc.icvs[n];
  if (!a.rsu_on) return 0.0;
  const double rate =
      link_rate(a.b_rsu, scenario.radio.bandwidth, a.p_rsu,
                scenario.radio.tx_power, ch.gain_rsu[n],
                scenario.radio.noise_density);
  return rsu_delay(scenario.tasks[n], a.x_rsu, rate, ch.prop_rsu[n], a.f_rsu,
                   scenario.compute.rsu);
}

double haps_branch_delay(const Allocation& alloc, const ChannelRealization& ch,
                         const Scenario& scenario, int n) {
  const auto& a = alloc.icvs[n];
  if (!a.haps_on) return 0.0;
  const double rate =
      link_rate(a.b_haps, scenario.radio.bandwidth, a.p_haps,
                scenario.radio.tx_power, ch.gain_haps[n],
                scenario.radio.noise_density);
  return haps_delay(scenario.tasks[n], a.x_haps, rate, ch.prop_haps[n],
                    a.f_haps, scenario.compute.haps);
}

double icv_delay(const Allocation& alloc, const ChannelRealization& ch,
                 const Scenario& scenario, int n) {
  const auto& a = alloc.icvs[n];
  double delay = local_branch_delay(alloc, scenario, n);
  if (a.rsu_on) {
    delay = std::max(delay, rsu_branch_delay(alloc, ch, scenario, n));
  }
  if (a.haps_on) {
    delay = std::max(delay, haps_branch_delay(alloc, ch, scenario, n));
  }
  return delay;
}

HandoffCheck handoff_feasible(const Allocation& alloc,
                              const ChannelRealization& ch,
                              const Scenario& scenario, int n) {
  const double deadline =
      handoff_time(scenario.icvs[n], scenario.road.rsu_coverage);
  const double branch = alloc.icvs[n].rsu_on
                            ? rsu_branch_delay(alloc, ch, scenario, n)
                            : 0.0;
  HandoffCheck check;
  check.slack = deadline - branch;
  check.feasible = check.slack >= 0.0;
  return check;
}

}  // namespace hrvin
