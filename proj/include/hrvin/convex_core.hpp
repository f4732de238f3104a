#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hrvin/channel.hpp"
#include "hrvin/scenario.hpp"

namespace hrvin {

enum class ObjectiveMode { Sum, Max };

enum class RowKind { Linear, ExpSum, Rate };

// Row bookkeeping. Core collects the bandwidth budget, the HAPS compute
// budget, the per-RSU compute budgets, and the four per-ICV delay/rate rows
// (2 + M + 4N rows in total); the remaining families are counted separately.
enum class RowCategory {
  Core,
  LinearizedLocal,
  Handoff,
  PowerBudget,
  SplitBudget,
  Box,
  Epigraph,
};

struct LinTerm {
  int index = -1;
  double coef = 0.0;
};

// weight * exp(z[pos] - z[neg]); either index may be -1 (term absent from
// the exponent).
struct ExpTerm {
  double weight = 0.0;
  int pos = -1;
  int neg = -1;
};

// One smooth convex inequality g(z) <= 0 with analytic first and second
// derivatives. Three shapes cover every row of the transformed subproblem:
//   Linear:  a'z + d
//   ExpSum:  sum_k w_k exp(z_a - z_b) + a'z + d
//   Rate:    ExpSum part minus coef * b * log2(1 + kappa p / b)
// The rate term is the perspective of log2(1 + kappa p), jointly concave in
// (b, p), so its negation keeps the row convex. Rate rows are stored
// normalized by the system bandwidth so all rows have O(1) magnitude.
class SmoothConstraint {
 public:
  RowKind kind = RowKind::Linear;
  RowCategory category = RowCategory::Core;
  std::string tag;

  std::vector<LinTerm> lin;
  std::vector<ExpTerm> exps;
  double constant = 0.0;

  int rate_b = -1;
  int rate_p = -1;
  double rate_kappa = 0.0;  // p P G / (b B N0) numerator coefficient
  double rate_coef = 0.0;   // row subtracts rate_coef * b * log2(1 + kappa p/b)

  // Returns +infinity outside the domain (b <= 0 on rate rows, overflow).
  double value(const Eigen::VectorXd& z) const;
  void add_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) const;
  void add_hessian(const Eigen::VectorXd& z, Eigen::MatrixXd& hess) const;
  // Accumulates w_grad * grad(g) into grad and
  // w_outer * grad(g) grad(g)' + w_hess * hess(g) into hess.
  void add_barrier_terms(const Eigen::VectorXd& z, double w_grad,
                         double w_outer, double w_hess, Eigen::VectorXd& grad,
                         Eigen::MatrixXd& hess) const;

  const std::vector<int>& support() const { return support_; }
  void finalize();  // builds the support index list

 private:
  std::vector<int> support_;
};

// Flat variable layout: one 11-slot block per ICV
// [T, xbar_r, xbar_h, b_r, b_h, p_r, p_h, taubar_r, taubar_h, fbar_r, fbar_h]
// plus one trailing epigraph scalar in Max mode. Split, offload-delay, and
// compute ratios live in log space; bandwidth and power ratios stay linear.
struct VariableLayout {
  int num_icvs = 0;
  bool has_epigraph = false;

  static constexpr int kT = 0;
  static constexpr int kXr = 1;
  static constexpr int kXh = 2;
  static constexpr int kBr = 3;
  static constexpr int kBh = 4;
  static constexpr int kPr = 5;
  static constexpr int kPh = 6;
  static constexpr int kTaur = 7;
  static constexpr int kTauh = 8;
  static constexpr int kFr = 9;
  static constexpr int kFh = 10;
  static constexpr int kBlock = 11;

  int dim() const { return kBlock * num_icvs + (has_epigraph ? 1 : 0); }
  int index(int n, int field) const { return kBlock * n + field; }
  int epigraph_index() const { return kBlock * num_icvs; }
  std::string name(int index) const;
};

struct AssemblyOptions {
  bool use_rsu = true;
  bool use_haps = true;
  bool enforce_handoff = true;
  // Optional per-ICV overrides (empty = available everywhere). A route is
  // active only when the global flag and the per-ICV entry both allow it.
  std::vector<std::uint8_t> rsu_mask;
  std::vector<std::uint8_t> haps_mask;
  double split_floor = 1e-9;     // x ratios
  double ratio_floor = 1e-9;     // bandwidth and power ratios
  double compute_floor = 1e-9;   // f ratios
  double offload_floor = 1e-12;  // tau, seconds
  // An ICV whose handoff deadline is within this margin of the bare
  // propagation delay gets its RSU route disabled outright.
  double disable_margin = 1e-6;
};

// Linearization point for the local-computing term, in log space.
struct LocalPoint {
  std::vector<double> xbar_rsu;
  std::vector<double> xbar_haps;
};

struct ConvexSubproblem {
  VariableLayout layout;
  ObjectiveMode mode = ObjectiveMode::Sum;
  AssemblyOptions options;
  int num_rsus = 0;

  Eigen::VectorXd objective;  // linear objective coefficients
  std::vector<SmoothConstraint> rows;
  Eigen::VectorXd start;         // strictly feasible start point
  std::vector<std::uint8_t> frozen;  // pinned coordinates (disabled routes)
  std::vector<std::uint8_t> rsu_route;   // per-ICV effective availability
  std::vector<std::uint8_t> haps_route;
  std::vector<std::string> notes;  // e.g. disabled-route reports

  int count(RowCategory category) const;
  int free_dimension() const;
  bool strictly_feasible(const Eigen::VectorXd& z) const;
  double max_violation(const Eigen::VectorXd& z) const;
  // Debug dump (variable layout, constraint tags, start point) as JSON.
  void dump(std::ostream& os) const;
};

// Builds the transformed convex subproblem around the given local point.
// Disabled routes (scheme flags or deadline below the propagation floor)
// have their coordinates pinned and their rows dropped; the start point is
// constructed and verified strictly feasible.
ConvexSubproblem assemble_subproblem(const Scenario& scenario,
                                     const ChannelRealization& channels,
                                     const LocalPoint& local_point,
                                     ObjectiveMode mode,
                                     const AssemblyOptions& options = {});

// Constructive interior point: x = 0.1 (RSU side shrunk until the handoff
// row has slack), even bandwidth/power/compute shares at 90% of budget,
// tau at twice the implied offload delay, T at twice the worst branch.
Eigen::VectorXd feasible_start(const ConvexSubproblem& sp,
                               const Scenario& scenario,
                               const ChannelRealization& channels);

// Start splits (x_rsu, x_haps) per ICV after the handoff-slack shrink rule;
// shared by feasible_start and the SCA local-point initialization.
std::vector<std::pair<double, double>> start_splits(
    const Scenario& scenario, const ChannelRealization& channels,
    const AssemblyOptions& options);

struct SolveOptions {
  double barrier_t0 = 1.0;
  double barrier_growth = 10.0;
  double newton_tol = 1e-8;        // Newton decrement^2 / 2 per stage
  double armijo_slope = 0.25;
  double backtrack = 0.5;
  double boundary_fraction = 0.99;
  double tol_feas = 1e-9;
  double tol_kkt = 1e-6;
  double gap_target = 1e-8;        // m / t duality-gap stop
  int max_newton = 4000;           // total Newton step budget
  int max_stage_newton = 200;
};

struct SolveReport {
  Eigen::VectorXd solution;
  double objective = 0.0;
  int barrier_stages = 0;
  int newton_steps = 0;
  double max_violation = 0.0;  // max(0, max_i g_i) at the solution
  double kkt_residual = 0.0;
  double gap = 0.0;            // rows / t at exit
  bool success = false;
  std::string message;
  std::vector<double> stage_objectives;
};

// Log-barrier interior point with damped Newton steps. On failure the report
// carries the best iterate reached.
SolveReport solve(const ConvexSubproblem& sp, const SolveOptions& options = {});
SolveReport solve(const ConvexSubproblem& sp, double tol_kkt, int max_newton);

}  // namespace hrvin
