#include "hrvin/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hrvin {

double taylor_local_bound(double xhat_r, double xhat_h, double xbar_r,
                          double xbar_h) {
  const double er = std::exp(xhat_r);
  const double eh = std::exp(xhat_h);
  return 1.0 - er - er * (xbar_r - xhat_r) - eh - eh * (xbar_h - xhat_h);
}

LocalPoint init_local_point(const Scenario& scenario,
                            const ChannelRealization& channels,
                            const AssemblyOptions& options) {
  const auto splits = start_splits(scenario, channels, options);
  LocalPoint lp;
  lp.xbar_rsu.reserve(splits.size());
  lp.xbar_haps.reserve(splits.size());
  for (const auto& [xr, xh] : splits) {
    lp.xbar_rsu.push_back(std::log(xr));
    lp.xbar_haps.push_back(std::log(xh));
  }
  return lp;
}

Allocation to_physical(const ConvexSubproblem& sp, const Eigen::VectorXd& z) {
  const auto& L = sp.layout;
  const double tol = 1e-9;
  Allocation alloc;
  alloc.icvs.resize(L.num_icvs);

  double band_sum = 0.0;
  double haps_compute_sum = 0.0;
  for (int n = 0; n < L.num_icvs; ++n) {
    auto& a = alloc.icvs[n];
    a.x_rsu = std::exp(z[L.index(n, L.kXr)]);
    a.x_haps = std::exp(z[L.index(n, L.kXh)]);
    a.b_rsu = z[L.index(n, L.kBr)];
    a.b_haps = z[L.index(n, L.kBh)];
    a.p_rsu = z[L.index(n, L.kPr)];
    a.p_haps = z[L.index(n, L.kPh)];
    a.tau_rsu = std::exp(z[L.index(n, L.kTaur)]);
    a.tau_haps = std::exp(z[L.index(n, L.kTauh)]);
    a.f_rsu = std::exp(z[L.index(n, L.kFr)]);
    a.f_haps = std::exp(z[L.index(n, L.kFh)]);
    a.delay_bound = z[L.index(n, L.kT)];
    a.rsu_on = sp.rsu_route[n] != 0;
    a.haps_on = sp.haps_route[n] != 0;

    if (a.x_rsu + a.x_haps > 1.0 + tol) {
      throw std::logic_error("split budget violated after transform");
    }
    if (a.p_rsu + a.p_haps > 1.0 + tol) {
      throw std::logic_error("power budget violated after transform");
    }
    band_sum += a.b_rsu + a.b_haps;
    haps_compute_sum += a.f_haps;
  }
  if (band_sum > 1.0 + tol) {
    throw std::logic_error("bandwidth budget violated after transform");
  }
  if (haps_compute_sum > 1.0 + tol) {
    throw std::logic_error("HAPS compute budget violated after transform");
  }
  return alloc;
}

namespace {

// Bookkeeping for the route-pruning trials. A split coordinate whose optimal
// share is (near) zero approaches it only geometrically: each
// relinearization licenses a bounded multiplicative decrease, which stalls
// the stopping rule for tens of iterations. Such routes are pinned at their
// floor in an extra convex solve that is adopted only when it beats the
// unpinned iterate, so the recorded objective sequence stays a descent.
class RoutePruner {
 public:
  RoutePruner(int n_icvs, double split_floor)
      : n_icvs_(n_icvs), floor_log_(std::log(split_floor)) {
    last_dx_.assign(2 * n_icvs, 0.0);
    rejected_share_.assign(2 * n_icvs, -1.0);
  }

  // Distinguishes sliding routes from settling ones: a settler's log-drift
  // decays geometrically fast while a slider keeps drifting at a near
  // constant rate.
  std::vector<int> flag_routes(const ConvexSubproblem& sp,
                               const Eigen::VectorXd& z, const LocalPoint& lp,
                               const AssemblyOptions& base,
                               bool endgame) {
    const auto& L = sp.layout;
    std::vector<int> flags;
    for (int n = 0; n < n_icvs_; ++n) {
      int candidate = -1;
      double candidate_share = 2.0;
      for (int r = 0; r < 2; ++r) {
        const bool is_rsu = r == 0;
        const bool active = is_rsu ? sp.rsu_route[n] : sp.haps_route[n];
        const bool masked =
            is_rsu ? (!base.rsu_mask.empty() && !base.rsu_mask[n])
                   : (!base.haps_mask.empty() && !base.haps_mask[n]);
        if (!active || masked) continue;
        const double xb = z[L.index(n, is_rsu ? L.kXr : L.kXh)];
        const double xhat = is_rsu ? lp.xbar_rsu[n] : lp.xbar_haps[n];
        const double share = std::exp(xb);
        const double dx = xb - xhat;
        const double prev_dx = last_dx_[key(n, is_rsu)];
        last_dx_[key(n, is_rsu)] = dx;

        const bool steady =
            dx < -0.015 && prev_dx < 0.0 && dx <= 0.6 * prev_dx;
        const bool tiny = share < 0.02;
        const bool endgame_small = endgame && share < 0.05;
        if (!steady && !tiny && !endgame_small) continue;
        if (share >= 0.5) continue;
        const double rejected = rejected_share_[key(n, is_rsu)];
        if (rejected >= 0.0 && share > 0.7 * rejected) continue;
        if (share < candidate_share) {
          candidate = key(n, is_rsu);
          candidate_share = share;
        }
      }
      // One route per ICV per trial; an ICV can still end up all-local over
      // several iterations when that genuinely wins the objective tests.
      if (candidate >= 0) flags.push_back(candidate);
    }
    return flags;
  }

  void mark_rejected(const std::vector<int>& flags,
                     const ConvexSubproblem& sp, const Eigen::VectorXd& z) {
    const auto& L = sp.layout;
    for (int k : flags) {
      const int n = k / 2;
      const bool is_rsu = (k % 2) == 0;
      rejected_share_[k] =
          std::exp(z[L.index(n, is_rsu ? L.kXr : L.kXh)]);
    }
  }

  void apply(const std::vector<int>& flags, AssemblyOptions& base,
             LocalPoint& lp) const {
    for (int k : flags) {
      const int n = k / 2;
      if (k % 2 == 0) {
        base.rsu_mask[n] = 0;
        lp.xbar_rsu[n] = floor_log_;
      } else {
        base.haps_mask[n] = 0;
        lp.xbar_haps[n] = floor_log_;
      }
    }
  }

  static int key(int n, bool is_rsu) { return 2 * n + (is_rsu ? 0 : 1); }

 private:
  int n_icvs_;
  double floor_log_;
  std::vector<double> last_dx_;
  std::vector<double> rejected_share_;
};

}  // namespace

ScaTrace sca_solve(const Scenario& scenario, const ChannelRealization& channels,
                   ObjectiveMode mode, const ScaOptions& options) {
  ScaTrace trace;
  const int n_icvs = scenario.num_icvs();
  if (n_icvs == 0) {
    trace.converged = true;
    trace.objective = 0.0;
    trace.message = "empty fleet";
    return trace;
  }

  AssemblyOptions base = options.assembly;
  if (base.rsu_mask.empty()) base.rsu_mask.assign(n_icvs, 1);
  if (base.haps_mask.empty()) base.haps_mask.assign(n_icvs, 1);

  LocalPoint lp = init_local_point(scenario, channels, base);
  RoutePruner pruner(n_icvs, base.split_floor);

  ConvexSubproblem sp =
      assemble_subproblem(scenario, channels, lp, mode, base);
  Eigen::VectorXd best = sp.start;
  double best_objective = std::numeric_limits<double>::infinity();
  double last_improvement = std::numeric_limits<double>::infinity();
  bool have_iterate = false;

  for (int i = 0; i < options.max_iterations; ++i) {
    if (i > 0) {
      sp = assemble_subproblem(scenario, channels, lp, mode, base);
      // The previous iterate stays strictly feasible for the new
      // linearization (the tangent touches the concave term at the new
      // expansion point), so it warm-starts the barrier.
      if (have_iterate && sp.strictly_feasible(best)) {
        sp.start = best;
      }
    }
    SolveReport report = solve(sp, options.solver);
    bool usable = sp.strictly_feasible(report.solution);
    if (!usable && !have_iterate) {
      trace.failed = true;
      trace.message =
          "inner solve failed on first iteration: " + report.message;
      trace.allocation = to_physical(sp, sp.start);
      trace.solution = sp.start;
      trace.objective = sp.objective.dot(sp.start);
      trace.iterations.push_back(
          {trace.objective, report.newton_steps, report.max_violation});
      return trace;
    }

    double objective = usable
                           ? report.objective
                           : std::numeric_limits<double>::infinity();
    Eigen::VectorXd iterate = usable ? report.solution : best;
    int newton_steps = report.newton_steps;
    double violation = report.max_violation;
    bool inner_ok = report.success;

    if (usable && i >= 2) {
      const bool endgame = last_improvement < 1e-4 * (1.0 + objective);
      std::vector<int> flags =
          pruner.flag_routes(sp, iterate, lp, base, endgame);
      // Smallest shares first; each candidate is tried individually so one
      // mis-flagged route cannot poison the others, and accepted pins stack
      // within the iteration.
      std::sort(flags.begin(), flags.end(), [&](int a, int b) {
        const auto& L = sp.layout;
        auto share = [&](int k) {
          return iterate[L.index(k / 2, k % 2 == 0 ? L.kXr : L.kXh)];
        };
        return share(a) < share(b);
      });
      int trials = 0;
      for (int k : flags) {
        if (trials >= 4) break;
        ++trials;
        AssemblyOptions pruned = base;
        LocalPoint lp_pruned = lp;
        pruner.apply({k}, pruned, lp_pruned);
        ConvexSubproblem sp_pruned = assemble_subproblem(
            scenario, channels, lp_pruned, mode, pruned);
        SolveReport trial = solve(sp_pruned, options.solver);
        newton_steps += trial.newton_steps;
        if (sp_pruned.strictly_feasible(trial.solution) &&
            trial.objective <= objective) {
          base = std::move(pruned);
          lp = std::move(lp_pruned);
          sp = std::move(sp_pruned);
          iterate = trial.solution;
          objective = trial.objective;
          violation = trial.max_violation;
          inner_ok = trial.success;
        } else {
          pruner.mark_rejected({k}, sp, iterate);
        }
      }
    }

    const bool regressed = have_iterate && objective > best_objective;
    if (!usable || regressed) {
      // Keep the previous iterate; it is feasible for this subproblem and no
      // worse. An unusable inner result also lands here.
      objective = best_objective;
      iterate = best;
    }
    trace.iterations.push_back({objective, newton_steps, violation});
    trace.warning |= !inner_ok;

    last_improvement = best_objective - objective;
    const bool converged = have_iterate && last_improvement <= options.zeta;
    best = iterate;
    best_objective = objective;
    have_iterate = true;

    // Adopt the solved split ratios as the next expansion point.
    const auto& L = sp.layout;
    for (int n = 0; n < n_icvs; ++n) {
      lp.xbar_rsu[n] = best[L.index(n, L.kXr)];
      lp.xbar_haps[n] = best[L.index(n, L.kXh)];
    }

    // The tangent bound never undercuts the true local-computing term, so
    // the accepted iterate must satisfy the original constraint too.
    for (int n = 0; n < n_icvs; ++n) {
      const auto& task = scenario.tasks[n];
      const double local = (1.0 - std::exp(best[L.index(n, L.kXr)]) -
                            std::exp(best[L.index(n, L.kXh)])) *
                           task.input_bits * task.density /
                           scenario.compute.icv;
      if (local > best[L.index(n, L.kT)] + 1e-9) {
        throw std::logic_error("local-delay bound violated at SCA iterate");
      }
    }

    if (converged) {
      trace.converged = true;
      break;
    }
  }

  trace.allocation = to_physical(sp, best);
  trace.solution = best;
  trace.objective = best_objective;
  trace.message = trace.converged ? "converged" : "iteration cap reached";
  return trace;
}

}  // namespace hrvin
