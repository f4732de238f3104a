#pragma once

#include <vector>

#include "hrvin/channel.hpp"
#include "hrvin/scenario.hpp"

namespace hrvin {

// Full decision vector for one ICV, in physical space. Ratios are strictly
// positive; disabled routes are pinned at their floors and flagged off so
// delay evaluation skips them.
struct AllocationEntry {
  double x_rsu = 0.0, x_haps = 0.0;      // task split ratios
  double b_rsu = 0.0, b_haps = 0.0;      // bandwidth ratios
  double p_rsu = 0.0, p_haps = 0.0;      // power ratios
  double f_rsu = 0.0, f_haps = 0.0;      // compute ratios
  double delay_bound = 0.0;              // T, seconds
  double tau_rsu = 0.0, tau_haps = 0.0;  // offload-delay auxiliaries, seconds
  bool rsu_on = true;
  bool haps_on = true;
};

struct Allocation {
  std::vector<AllocationEntry> icvs;
  int num_icvs() const { return static_cast<int>(icvs.size()); }
};

// (1 - x_r - x_h) * eps * lambda / F_local. Throws when x_r + x_h > 1.
double local_delay(const TaskSpec& task, double x_rsu, double x_haps,
                   double local_cap);

// prop + x*eps/rate + x*eps*lambda/(f*cap). Throws for rate/f <= 0.
double rsu_delay(const TaskSpec& task, double x_rsu, double rate,
                 double prop_delay, double f_rsu, double rsu_cap);
double haps_delay(const TaskSpec& task, double x_haps, double rate,
                  double prop_delay, double f_haps, double haps_cap);

// Branch delays evaluated from an allocation's own rates. Disabled routes
// return 0 and are excluded from the max.
double rsu_branch_delay(const Allocation& alloc, const ChannelRealization& ch,
                        const Scenario& scenario, int n);
double haps_branch_delay(const Allocation& alloc, const ChannelRealization& ch,
                         const Scenario& scenario, int n);
double local_branch_delay(const Allocation& alloc, const Scenario& scenario,
                          int n);

// Per-ICV delay: max over the enabled branches.
double icv_delay(const Allocation& alloc, const ChannelRealization& ch,
                 const Scenario& scenario, int n);

struct HandoffCheck {
  bool feasible = true;
  double slack = 0.0;  // handoff deadline minus RSU branch delay, seconds
};

// Non-strict: slack == 0 counts as feasible.
HandoffCheck handoff_feasible(const Allocation& alloc,
                              const ChannelRealization& ch,
                              const Scenario& scenario, int n);

}  // namespace hrvin
