#pragma once

#include "hrvin/channel.hpp"
#include "hrvin/scenario.hpp"

namespace hrvin {

// Brute-force reference for single-ICV instances: exhaustive grid over the
// two split ratios, the bandwidth split, and the power split, with both
// compute ratios fixed at 1. Entirely independent of the transformed-solver
// path; it evaluates the original delay expressions directly.
struct OracleResult {
  double best_delay = 0.0;
  double x_rsu = 0.0;
  double x_haps = 0.0;
  double band_split = 0.0;   // fraction of bandwidth on the RSU link
  double power_split = 0.0;  // fraction of power on the RSU link
  long long evaluations = 0;
};

// resolution r means each axis runs over {0, 1/r, ..., 1}. Throws
// std::invalid_argument unless the scenario holds exactly one ICV.
OracleResult grid_search_single_icv(const Scenario& scenario,
                                    const ChannelRealization& channels,
                                    int resolution = 200,
                                    bool enforce_handoff = true);

}  // namespace hrvin
