#include "hrvin/diagnostics.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "hrvin/channel.hpp"
#include "hrvin/rng.hpp"

namespace hrvin {

namespace {

// Random strictly feasible points near the start: jitter free coordinates
// and keep the draw only if every row retains slack.
std::vector<Eigen::VectorXd> sample_feasible_points(const ConvexSubproblem& sp,
                                                    int count,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> points;
  points.reserve(count);
  double radius = 0.05;
  int rejected = 0;
  while (static_cast<int>(points.size()) < count) {
    Eigen::VectorXd z = sp.start;
    for (int i = 0; i < sp.layout.dim(); ++i) {
      if (sp.frozen[i]) continue;
      z[i] += radius * (2.0 * rng.uniform() - 1.0) *
              std::max(1.0, std::abs(sp.start[i]));
    }
    bool interior = true;
    for (const auto& row : sp.rows) {
      if (!(row.value(z) < -1e-12)) {
        interior = false;
        break;
      }
    }
    if (interior) {
      points.push_back(std::move(z));
      rejected = 0;
    } else if (++rejected > 50) {
      radius *= 0.5;  // tighten the jitter if the region is narrow
      rejected = 0;
    }
  }
  return points;
}

}  // namespace

CheckResult check_constraint_gradients(const ConvexSubproblem& sp, int points,
                                       std::uint64_t seed, double tol) {
  CheckResult result;
  const auto samples = sample_feasible_points(sp, points, seed);
  const int dim = sp.layout.dim();
  Eigen::VectorXd grad(dim);
  for (const auto& z : samples) {
    for (const auto& row : sp.rows) {
      grad.setZero();
      row.add_gradient(z, grad);
      double scale = 1e-8;
      for (int idx : row.support()) {
        scale = std::max(scale, std::abs(grad[idx]));
      }
      for (int idx : row.support()) {
        if (sp.frozen[idx]) continue;
        const double h = 1e-6 * std::max(1.0, std::abs(z[idx]));
        Eigen::VectorXd zp = z, zm = z;
        zp[idx] += h;
        zm[idx] -= h;
        const double fd = (row.value(zp) - row.value(zm)) / (2.0 * h);
        const double rel = std::abs(fd - grad[idx]) / scale;
        if (rel > result.worst) {
          result.worst = rel;
          result.detail = row.tag;
        }
      }
    }
  }
  result.pass = result.worst <= tol;
  return result;
}

CheckResult check_constraint_hessians(const ConvexSubproblem& sp, int points,
                                      std::uint64_t seed, double tol) {
  CheckResult result;
  const auto samples = sample_feasible_points(sp, points, seed);
  const int dim = sp.layout.dim();
  Rng rng(seed ^ 0x48455353ULL);
  Eigen::MatrixXd hess(dim, dim);
  Eigen::VectorXd gp(dim), gm(dim);
  for (const auto& z : samples) {
    for (const auto& row : sp.rows) {
      if (row.kind == RowKind::Linear) continue;
      hess.setZero();
      row.add_hessian(z, hess);
      // Random direction over the row support.
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      double norm = 0.0;
      for (int idx : row.support()) {
        v[idx] = 2.0 * rng.uniform() - 1.0;
        norm += v[idx] * v[idx];
      }
      if (norm == 0.0) continue;
      v /= std::sqrt(norm);
      const double h = 1e-6;
      gp.setZero();
      gm.setZero();
      row.add_gradient(z + h * v, gp);
      row.add_gradient(z - h * v, gm);
      double scale = 1e-8;
      for (int idx : row.support()) {
        scale = std::max(scale, std::abs((hess * v)[idx]));
      }
      const Eigen::VectorXd hv = hess * v;
      for (int idx : row.support()) {
        const double fd = (gp[idx] - gm[idx]) / (2.0 * h);
        const double rel = std::abs(fd - hv[idx]) / scale;
        if (rel > result.worst) {
          result.worst = rel;
          result.detail = row.tag;
        }
      }
    }
  }
  result.pass = result.worst <= tol;
  return result;
}

CheckResult check_constraint_convexity(const ConvexSubproblem& sp, int pairs,
                                       std::uint64_t seed, double tol) {
  CheckResult result;
  const auto samples = sample_feasible_points(sp, 2 * pairs, seed);
  for (int k = 0; k + 1 < static_cast<int>(samples.size()); k += 2) {
    const Eigen::VectorXd mid = 0.5 * (samples[k] + samples[k + 1]);
    for (const auto& row : sp.rows) {
      const double lhs = row.value(mid);
      const double rhs = 0.5 * (row.value(samples[k]) +
                                row.value(samples[k + 1]));
      const double violation = lhs - rhs;
      if (violation > result.worst) {
        result.worst = violation;
        result.detail = row.tag;
      }
    }
  }
  result.pass = result.worst <= tol;
  return result;
}

CheckResult check_rate_concavity(int triples, std::uint64_t seed, double tol) {
  CheckResult result;
  Rng rng(seed);
  for (int k = 0; k < triples; ++k) {
    // Normalized rate b log2(1 + kappa p / b) with O(1) magnitudes so the
    // 1e-12 witness is meaningful at double precision.
    const double kappa = std::pow(10.0, 3.0 * rng.uniform());
    const double b1 = 0.01 + rng.uniform();
    const double p1 = 0.01 + rng.uniform();
    const double b2 = 0.01 + rng.uniform();
    const double p2 = 0.01 + rng.uniform();
    auto rate = [kappa](double b, double p) {
      return b * std::log2(1.0 + kappa * p / b);
    };
    const double mid = rate(0.5 * (b1 + b2), 0.5 * (p1 + p2));
    const double chord = 0.5 * (rate(b1, p1) + rate(b2, p2));
    const double violation = chord - mid;  // concave: mid >= chord
    if (violation > result.worst) result.worst = violation;
  }
  result.pass = result.worst <= tol;
  return result;
}

CheckResult check_fading_means(int draws, double rician_k, std::uint64_t seed,
                               double tol) {
  CheckResult result;
  Rng rng(seed);
  double sum_rayleigh = 0.0;
  double sum_rician = 0.0;
  for (int k = 0; k < draws; ++k) {
    sum_rayleigh += sample_fading_sq(FadingKind::Rayleigh, 0.0, rng);
    sum_rician += sample_fading_sq(FadingKind::Rician, rician_k, rng);
  }
  const double mean_rayleigh = sum_rayleigh / draws;
  const double mean_rician = sum_rician / draws;
  result.worst = std::max(std::abs(mean_rayleigh - 1.0),
                          std::abs(mean_rician - 1.0));
  std::ostringstream detail;
  detail << "rayleigh mean " << mean_rayleigh << ", rician mean "
         << mean_rician;
  result.detail = detail.str();
  result.pass = result.worst <= tol;
  return result;
}

int run_validation(const SimConfig& config, std::ostream& os) {
  const Scenario scenario = generate_scenario(config.scenario, config.seed);
  const ChannelRealization channels = realize_channels(scenario, config.seed);
  const LocalPoint lp = init_local_point(scenario, channels);
  const ConvexSubproblem sp =
      assemble_subproblem(scenario, channels, lp, ObjectiveMode::Sum);

  int failures = 0;
  auto report = [&](const char* name, const CheckResult& r) {
    os << (r.pass ? "[PASS] " : "[FAIL] ") << name << " (worst " << r.worst;
    if (!r.detail.empty()) os << ", " << r.detail;
    os << ")\n";
    failures += r.pass ? 0 : 1;
  };

  report("gradient finite-difference agreement",
         check_constraint_gradients(sp, 100, config.seed));
  report("hessian finite-difference agreement",
         check_constraint_hessians(sp, 100, config.seed));
  report("constraint midpoint convexity",
         check_constraint_convexity(sp, 200, config.seed));
  report("rate midpoint concavity", check_rate_concavity(10000, config.seed));
  report("fading unit mean power",
         check_fading_means(1000000, scenario.radio.rician_k, config.seed));
  return failures;
}

}  // namespace hrvin
