#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "hrvin/convex_core.hpp"
#include "hrvin/delay_model.hpp"

namespace hrvin {

struct ScaOptions {
  int max_iterations = 50;
  double zeta = 1e-6;  // stop when the objective improves by less than this
  AssemblyOptions assembly;
  SolveOptions solver;
};

struct ScaIterationStat {
  double objective = 0.0;
  int newton_steps = 0;
  double max_violation = 0.0;
};

struct ScaTrace {
  std::vector<ScaIterationStat> iterations;
  bool converged = false;
  bool warning = false;  // converged while an inner solve hit its cap
  bool failed = false;   // inner solver failure; allocation is last good
  std::string message;
  Allocation allocation;
  Eigen::VectorXd solution;
  double objective = 0.0;
  int subproblems() const { return static_cast<int>(iterations.size()); }
};

// First-order upper bound of g = 1 - exp(xbar_r) - exp(xbar_h) at the
// expansion point (xhat_r, xhat_h). Tangent at the expansion point and >= g
// everywhere (g is concave).
double taylor_local_bound(double xhat_r, double xhat_h, double xbar_r,
                          double xbar_h);

// Initial linearization point: log(0.1) per route, with the RSU side shrunk
// by the same handoff-slack rule as the feasible start.
LocalPoint init_local_point(const Scenario& scenario,
                            const ChannelRealization& channels,
                            const AssemblyOptions& options = {});

// Exponentiates the split/offload/compute coordinates back to physical space
// and checks the allocation budgets. Throws std::logic_error when a budget is
// violated beyond feasibility tolerance.
Allocation to_physical(const ConvexSubproblem& sp, const Eigen::VectorXd& z);

// Outer successive-convex-approximation loop: assemble around the current
// local point, solve, adopt the new split ratios as the next local point,
// stop when the objective improvement drops below zeta. The recorded
// objective sequence is non-increasing: an iterate is only adopted when it
// does not regress (the previous iterate stays feasible for the next
// subproblem, so keeping it is always valid).
ScaTrace sca_solve(const Scenario& scenario, const ChannelRealization& channels,
                   ObjectiveMode mode, const ScaOptions& options = {});

}  // namespace hrvin
