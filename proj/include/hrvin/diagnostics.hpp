#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "hrvin/config.hpp"
#include "hrvin/convex_core.hpp"

namespace hrvin {

struct CheckResult {
  bool pass = false;
  double worst = 0.0;
  std::string detail;
};

// Analytic gradients vs central finite differences at random strictly
// feasible points (jittered around the start point). worst = max relative
// mismatch across rows and points.
CheckResult check_constraint_gradients(const ConvexSubproblem& sp, int points,
                                       std::uint64_t seed, double tol = 1e-5);

// Analytic Hessian-vector products vs differenced gradients.
CheckResult check_constraint_hessians(const ConvexSubproblem& sp, int points,
                                      std::uint64_t seed, double tol = 1e-5);

// Midpoint convexity g((a+b)/2) <= (g(a)+g(b))/2 + tol on random feasible
// pairs, for every row.
CheckResult check_constraint_convexity(const ConvexSubproblem& sp, int pairs,
                                       std::uint64_t seed, double tol = 1e-12);

// Midpoint concavity of the normalized rate b log2(1 + kappa p / b) on
// random triples (kappa, endpoints).
CheckResult check_rate_concavity(int triples, std::uint64_t seed,
                                 double tol = 1e-12);

// Monte Carlo means of |h|^2 for both fading kinds against unit power.
CheckResult check_fading_means(int draws, double rician_k, std::uint64_t seed,
                               double tol = 0.01);

// Runs the full numerical-hygiene suite, printing one pass/fail line per
// check. Returns the number of failures.
int run_validation(const SimConfig& config, std::ostream& os);

}  // namespace hrvin
