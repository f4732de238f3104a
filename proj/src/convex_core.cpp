#include "hrvin/convex_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hrvin/delay_model.hpp"

namespace hrvin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

thread_local std::vector<double> t_local_grad;
thread_local std::vector<double> t_local_hess;

double pinned_value(int field, const AssemblyOptions& o) {
  switch (field) {
    case VariableLayout::kXr:
    case VariableLayout::kXh:
      return std::log(o.split_floor);
    case VariableLayout::kBr:
    case VariableLayout::kBh:
    case VariableLayout::kPr:
    case VariableLayout::kPh:
      return o.ratio_floor;
    case VariableLayout::kTaur:
    case VariableLayout::kTauh:
      return std::log(o.offload_floor);
    case VariableLayout::kFr:
    case VariableLayout::kFh:
      return std::log(o.compute_floor);
    default:
      return 0.0;
  }
}

struct RouteFlags {
  std::vector<std::uint8_t> rsu;
  std::vector<std::uint8_t> haps;
  std::vector<std::string> notes;
};

RouteFlags effective_routes(const Scenario& scenario,
                            const ChannelRealization& channels,
                            const AssemblyOptions& options) {
  const int n_icvs = scenario.num_icvs();
  RouteFlags flags;
  flags.rsu.assign(n_icvs, options.use_rsu ? 1 : 0);
  flags.haps.assign(n_icvs, options.use_haps ? 1 : 0);
  for (int n = 0; n < n_icvs; ++n) {
    if (!options.rsu_mask.empty() && !options.rsu_mask[n]) flags.rsu[n] = 0;
    if (!options.haps_mask.empty() && !options.haps_mask[n]) flags.haps[n] = 0;
  }
  for (int n = 0; n < n_icvs; ++n) {
    if (!flags.rsu[n] || !options.enforce_handoff) continue;
    const double deadline =
        handoff_time(scenario.icvs[n], scenario.road.rsu_coverage);
    if (deadline <= channels.prop_rsu[n] + options.disable_margin) {
      flags.rsu[n] = 0;
      std::ostringstream note;
      note << "RSU route disabled for ICV " << n << ": handoff deadline "
           << deadline << " s within margin of propagation floor "
           << channels.prop_rsu[n] << " s";
      flags.notes.push_back(note.str());
    }
  }
  return flags;
}

double start_offload_delay(double x, double input_bits, double rate,
                           double floor) {
  return std::max(2.0 * x * input_bits / rate, 2.0 * floor);
}

}  // namespace

// ---------------------------------------------------------------------------
// SmoothConstraint

double SmoothConstraint::value(const Eigen::VectorXd& z) const {
  double v = constant;
  for (const auto& t : lin) v += t.coef * z[t.index];
  for (const auto& t : exps) {
    double e = t.pos >= 0 ? z[t.pos] : 0.0;
    if (t.neg >= 0) e -= z[t.neg];
    v += t.weight * std::exp(e);
  }
  if (kind == RowKind::Rate) {
    const double b = z[rate_b];
    const double p = z[rate_p];
    if (b <= 0.0) return kInf;
    const double u = rate_kappa * p / b;
    if (u <= -1.0) return kInf;
    v -= rate_coef * b * std::log1p(u) / kLn2;
  }
  return v;
}

void SmoothConstraint::finalize() {
  support_.clear();
  auto push = [this](int idx) {
    if (idx >= 0) support_.push_back(idx);
  };
  for (const auto& t : lin) push(t.index);
  for (const auto& t : exps) {
    push(t.pos);
    push(t.neg);
  }
  push(rate_b);
  push(rate_p);
  std::sort(support_.begin(), support_.end());
  support_.erase(std::unique(support_.begin(), support_.end()),
                 support_.end());
}

namespace {

int local_index(const std::vector<int>& support, int global) {
  return static_cast<int>(
      std::lower_bound(support.begin(), support.end(), global) -
      support.begin());
}

}  // namespace

// Computes gradient and (optionally) Hessian in the support-local frame.
// Returns false when the point is outside the row's domain.
static bool local_derivatives(const SmoothConstraint& row,
                              const Eigen::VectorXd& z,
                              const std::vector<int>& sup,
                              std::vector<double>& grad,
                              std::vector<double>* hess) {
  const int s = static_cast<int>(sup.size());
  grad.assign(s, 0.0);
  if (hess != nullptr) hess->assign(s * s, 0.0);

  for (const auto& t : row.lin) {
    grad[local_index(sup, t.index)] += t.coef;
  }
  for (const auto& t : row.exps) {
    double e = t.pos >= 0 ? z[t.pos] : 0.0;
    if (t.neg >= 0) e -= z[t.neg];
    const double w = t.weight * std::exp(e);
    const int ip = t.pos >= 0 ? local_index(sup, t.pos) : -1;
    const int in = t.neg >= 0 ? local_index(sup, t.neg) : -1;
    if (ip >= 0) grad[ip] += w;
    if (in >= 0) grad[in] -= w;
    if (hess != nullptr) {
      auto& h = *hess;
      if (ip >= 0) h[ip * s + ip] += w;
      if (in >= 0) h[in * s + in] += w;
      if (ip >= 0 && in >= 0) {
        h[ip * s + in] -= w;
        h[in * s + ip] -= w;
      }
    }
  }
  if (row.kind == RowKind::Rate) {
    const double b = z[row.rate_b];
    const double p = z[row.rate_p];
    if (b <= 0.0) return false;
    const double u = row.rate_kappa * p / b;
    if (u <= -1.0) return false;
    const int ib = local_index(sup, row.rate_b);
    const int ip = local_index(sup, row.rate_p);
    grad[ib] -= row.rate_coef * (std::log1p(u) - u / (1.0 + u)) / kLn2;
    grad[ip] -= row.rate_coef * row.rate_kappa / ((1.0 + u) * kLn2);
    if (hess != nullptr) {
      auto& h = *hess;
      const double w =
          row.rate_coef / (kLn2 * b * (1.0 + u) * (1.0 + u));
      h[ib * s + ib] += w * u * u;
      h[ip * s + ip] += w * row.rate_kappa * row.rate_kappa;
      h[ib * s + ip] -= w * row.rate_kappa * u;
      h[ip * s + ib] -= w * row.rate_kappa * u;
    }
  }
  return true;
}

void SmoothConstraint::add_gradient(const Eigen::VectorXd& z,
                                    Eigen::VectorXd& grad) const {
  auto& gl = t_local_grad;
  if (!local_derivatives(*this, z, support_, gl, nullptr)) {
    throw std::domain_error("constraint gradient outside domain: " + tag);
  }
  for (std::size_t a = 0; a < support_.size(); ++a) {
    grad[support_[a]] += gl[a];
  }
}

void SmoothConstraint::add_hessian(const Eigen::VectorXd& z,
                                   Eigen::MatrixXd& hess) const {
  auto& gl = t_local_grad;
  auto& hl = t_local_hess;
  if (!local_derivatives(*this, z, support_, gl, &hl)) {
    throw std::domain_error("constraint hessian outside domain: " + tag);
  }
  const int s = static_cast<int>(support_.size());
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) {
      hess(support_[a], support_[b]) += hl[a * s + b];
    }
  }
}

void SmoothConstraint::add_barrier_terms(const Eigen::VectorXd& z,
                                         double w_grad, double w_outer,
                                         double w_hess, Eigen::VectorXd& grad,
                                         Eigen::MatrixXd& hess) const {
  auto& gl = t_local_grad;
  auto& hl = t_local_hess;
  if (!local_derivatives(*this, z, support_, gl, &hl)) {
    throw std::domain_error("barrier term outside domain: " + tag);
  }
  const int s = static_cast<int>(support_.size());
  for (int a = 0; a < s; ++a) {
    const int ia = support_[a];
    grad[ia] += w_grad * gl[a];
    for (int b = 0; b < s; ++b) {
      hess(ia, support_[b]) += w_outer * gl[a] * gl[b] + w_hess * hl[a * s + b];
    }
  }
}

// ---------------------------------------------------------------------------
// VariableLayout / ConvexSubproblem

std::string VariableLayout::name(int index) const {
  if (has_epigraph && index == epigraph_index()) return "T_max";
  const int n = index / kBlock;
  static const char* kFields[] = {"T",     "xbar_r", "xbar_h", "b_r",
                                  "b_h",   "p_r",    "p_h",    "taubar_r",
                                  "taubar_h", "fbar_r", "fbar_h"};
  return std::string(kFields[index % kBlock]) + "[" + std::to_string(n) + "]";
}

int ConvexSubproblem::count(RowCategory category) const {
  int c = 0;
  for (const auto& row : rows) c += row.category == category ? 1 : 0;
  return c;
}

int ConvexSubproblem::free_dimension() const {
  int c = 0;
  for (auto f : frozen) c += f ? 0 : 1;
  return c;
}

bool ConvexSubproblem::strictly_feasible(const Eigen::VectorXd& z) const {
  for (const auto& row : rows) {
    const double g = row.value(z);
    if (!(g < 0.0)) return false;
  }
  return true;
}

double ConvexSubproblem::max_violation(const Eigen::VectorXd& z) const {
  double worst = -kInf;
  for (const auto& row : rows) worst = std::max(worst, row.value(z));
  return worst;
}

void ConvexSubproblem::dump(std::ostream& os) const {
  nlohmann::json j;
  j["mode"] = mode == ObjectiveMode::Sum ? "sum" : "max";
  j["num_icvs"] = layout.num_icvs;
  j["num_rsus"] = num_rsus;
  auto& vars = j["variables"] = nlohmann::json::array();
  for (int i = 0; i < layout.dim(); ++i) {
    vars.push_back({{"name", layout.name(i)},
                    {"start", start[i]},
                    {"frozen", frozen[i] != 0},
                    {"objective", objective[i]}});
  }
  auto& rws = j["constraints"] = nlohmann::json::array();
  for (const auto& row : rows) rws.push_back(row.tag);
  j["notes"] = notes;
  os << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Assembly

std::vector<std::pair<double, double>> start_splits(
    const Scenario& scenario, const ChannelRealization& channels,
    const AssemblyOptions& options) {
  const int n_icvs = scenario.num_icvs();
  const RouteFlags routes = effective_routes(scenario, channels, options);
  std::vector<std::pair<double, double>> splits(n_icvs);
  for (int n = 0; n < n_icvs; ++n) {
    double xr = routes.rsu[n] ? 0.1 : options.split_floor;
    const double xh = routes.haps[n] ? 0.1 : options.split_floor;
    if (routes.rsu[n] && options.enforce_handoff) {
      const auto& radio = scenario.radio;
      const auto& task = scenario.tasks[n];
      const int m = scenario.rsu_of(scenario.icvs[n].position);
      const double b0 = 0.9 / (2.0 * n_icvs);
      const double p0 = 0.45;
      const double f0 = 0.9 / scenario.association[m].size();
      const double rate = link_rate(b0, radio.bandwidth, p0, radio.tx_power,
                                    channels.gain_rsu[n],
                                    radio.noise_density);
      const double deadline =
          handoff_time(scenario.icvs[n], scenario.road.rsu_coverage);
      auto row_value = [&](double x) {
        return channels.prop_rsu[n] +
               start_offload_delay(x, task.input_bits, rate,
                                   options.offload_floor) +
               x * task.input_bits * task.density /
                   (f0 * scenario.compute.rsu);
      };
      while (row_value(xr) >= deadline && xr > 2.0 * options.split_floor) {
        xr *= 0.5;
      }
      xr = std::max(xr, options.split_floor);
    }
    splits[n] = {xr, xh};
  }
  return splits;
}

ConvexSubproblem assemble_subproblem(const Scenario& scenario,
                                     const ChannelRealization& channels,
                                     const LocalPoint& local_point,
                                     ObjectiveMode mode,
                                     const AssemblyOptions& options) {
  const int n_icvs = scenario.num_icvs();
  if (static_cast<int>(local_point.xbar_rsu.size()) != n_icvs ||
      static_cast<int>(local_point.xbar_haps.size()) != n_icvs) {
    throw std::invalid_argument("local point size does not match fleet");
  }

  ConvexSubproblem sp;
  sp.layout.num_icvs = n_icvs;
  sp.layout.has_epigraph = mode == ObjectiveMode::Max;
  sp.mode = mode;
  sp.options = options;
  sp.num_rsus = scenario.num_rsus();

  const int dim = sp.layout.dim();
  const auto& L = sp.layout;
  sp.objective = Eigen::VectorXd::Zero(dim);
  sp.frozen.assign(dim, 0);

  const RouteFlags routes = effective_routes(scenario, channels, options);
  sp.rsu_route = routes.rsu;
  sp.haps_route = routes.haps;
  sp.notes = routes.notes;

  // Pin the coordinates of disabled routes at their floors.
  Eigen::VectorXd pinned = Eigen::VectorXd::Zero(dim);
  for (int n = 0; n < n_icvs; ++n) {
    auto freeze = [&](int field) {
      const int idx = L.index(n, field);
      sp.frozen[idx] = 1;
      pinned[idx] = pinned_value(field, options);
    };
    if (!routes.rsu[n]) {
      freeze(VariableLayout::kXr);
      freeze(VariableLayout::kBr);
      freeze(VariableLayout::kPr);
      freeze(VariableLayout::kTaur);
      freeze(VariableLayout::kFr);
    }
    if (!routes.haps[n]) {
      freeze(VariableLayout::kXh);
      freeze(VariableLayout::kBh);
      freeze(VariableLayout::kPh);
      freeze(VariableLayout::kTauh);
      freeze(VariableLayout::kFh);
    }
  }

  if (mode == ObjectiveMode::Sum) {
    for (int n = 0; n < n_icvs; ++n) sp.objective[L.index(n, L.kT)] = 1.0;
  } else {
    sp.objective[L.epigraph_index()] = 1.0;
  }

  const auto& radio = scenario.radio;
  // Rows whose support is entirely pinned reduce to constants; they are
  // dropped after checking that the pinned values satisfy them.
  auto add_row = [&sp, &pinned](SmoothConstraint&& row) {
    row.finalize();
    bool has_free = false;
    for (int idx : row.support()) has_free |= !sp.frozen[idx];
    if (has_free) {
      sp.rows.push_back(std::move(row));
    } else if (!(row.value(pinned) < 0.0)) {
      throw std::logic_error("pinned values violate constant row: " + row.tag);
    }
  };

  for (int n = 0; n < n_icvs; ++n) {
    const auto& task = scenario.tasks[n];
    const double eps = task.input_bits;
    const double work = eps * task.density;
    const std::string id = std::to_string(n);
    const double deadline =
        handoff_time(scenario.icvs[n], scenario.road.rsu_coverage);

    // Linearized local-computing bound: the concave term
    // 1 - exp(xbar_r) - exp(xbar_h) replaced by its tangent at the local
    // point, which upper-bounds it everywhere.
    {
      const double coef = work / scenario.compute.icv;
      const double er = std::exp(local_point.xbar_rsu[n]);
      const double eh = std::exp(local_point.xbar_haps[n]);
      SmoothConstraint row;
      row.kind = RowKind::Linear;
      row.category = RowCategory::LinearizedLocal;
      row.tag = "local-delay-lin[" + id + "]";
      row.lin = {{L.index(n, L.kXr), -coef * er},
                 {L.index(n, L.kXh), -coef * eh},
                 {L.index(n, L.kT), -1.0}};
      row.constant =
          coef * (1.0 - er * (1.0 - local_point.xbar_rsu[n]) -
                  eh * (1.0 - local_point.xbar_haps[n]));
      add_row(std::move(row));
    }

    if (routes.rsu[n]) {
      const double kappa = radio.tx_power * channels.gain_rsu[n] /
                           (radio.bandwidth * radio.noise_density);
      {
        SmoothConstraint row;
        row.kind = RowKind::ExpSum;
        row.category = RowCategory::Core;
        row.tag = "delay-rsu[" + id + "]";
        row.exps = {{1.0, L.index(n, L.kTaur), -1},
                    {work / scenario.compute.rsu, L.index(n, L.kXr),
                     L.index(n, L.kFr)}};
        row.lin = {{L.index(n, L.kT), -1.0}};
        row.constant = channels.prop_rsu[n];
        add_row(std::move(row));
      }
      {
        // Offload throughput must cover eps * x / tau; normalized by the
        // system bandwidth so the row has O(1) magnitude.
        SmoothConstraint row;
        row.kind = RowKind::Rate;
        row.category = RowCategory::Core;
        row.tag = "rate-rsu[" + id + "]";
        row.exps = {{eps / radio.bandwidth, L.index(n, L.kXr),
                     L.index(n, L.kTaur)}};
        row.rate_b = L.index(n, L.kBr);
        row.rate_p = L.index(n, L.kPr);
        row.rate_kappa = kappa;
        row.rate_coef = 1.0;
        add_row(std::move(row));
      }
      if (options.enforce_handoff) {
        SmoothConstraint row;
        row.kind = RowKind::ExpSum;
        row.category = RowCategory::Handoff;
        row.tag = "handoff[" + id + "]";
        row.exps = {{1.0, L.index(n, L.kTaur), -1},
                    {work / scenario.compute.rsu, L.index(n, L.kXr),
                     L.index(n, L.kFr)}};
        row.constant = channels.prop_rsu[n] - deadline;
        add_row(std::move(row));
      }
    }

    if (routes.haps[n]) {
      const double kappa = radio.tx_power * channels.gain_haps[n] /
                           (radio.bandwidth * radio.noise_density);
      {
        SmoothConstraint row;
        row.kind = RowKind::ExpSum;
        row.category = RowCategory::Core;
        row.tag = "delay-haps[" + id + "]";
        row.exps = {{1.0, L.index(n, L.kTauh), -1},
                    {work / scenario.compute.haps, L.index(n, L.kXh),
                     L.index(n, L.kFh)}};
        row.lin = {{L.index(n, L.kT), -1.0}};
        row.constant = channels.prop_haps[n];
        add_row(std::move(row));
      }
      {
        SmoothConstraint row;
        row.kind = RowKind::Rate;
        row.category = RowCategory::Core;
        row.tag = "rate-haps[" + id + "]";
        row.exps = {{eps / radio.bandwidth, L.index(n, L.kXh),
                     L.index(n, L.kTauh)}};
        row.rate_b = L.index(n, L.kBh);
        row.rate_p = L.index(n, L.kPh);
        row.rate_kappa = kappa;
        row.rate_coef = 1.0;
        add_row(std::move(row));
      }
    }

    {
      SmoothConstraint row;
      row.kind = RowKind::Linear;
      row.category = RowCategory::PowerBudget;
      row.tag = "power[" + id + "]";
      row.lin = {{L.index(n, L.kPr), 1.0}, {L.index(n, L.kPh), 1.0}};
      row.constant = -1.0;
      add_row(std::move(row));
    }
    {
      SmoothConstraint row;
      row.kind = RowKind::ExpSum;
      row.category = RowCategory::SplitBudget;
      row.tag = "split[" + id + "]";
      row.exps = {{1.0, L.index(n, L.kXr), -1}, {1.0, L.index(n, L.kXh), -1}};
      row.constant = -1.0;
      add_row(std::move(row));
    }

    if (mode == ObjectiveMode::Max) {
      SmoothConstraint row;
      row.kind = RowKind::Linear;
      row.category = RowCategory::Epigraph;
      row.tag = "epigraph[" + id + "]";
      row.lin = {{L.index(n, L.kT), 1.0}, {L.epigraph_index(), -1.0}};
      add_row(std::move(row));
    }
  }

  if (n_icvs > 0) {
    SmoothConstraint row;
    row.kind = RowKind::Linear;
    row.category = RowCategory::Core;
    row.tag = "bandwidth";
    for (int n = 0; n < n_icvs; ++n) {
      row.lin.push_back({L.index(n, L.kBr), 1.0});
      row.lin.push_back({L.index(n, L.kBh), 1.0});
    }
    row.constant = -1.0;
    add_row(std::move(row));

    for (int m = 0; m < scenario.num_rsus(); ++m) {
      SmoothConstraint crow;
      crow.kind = RowKind::ExpSum;
      crow.category = RowCategory::Core;
      crow.tag = "compute-rsu[" + std::to_string(m) + "]";
      for (int n : scenario.association[m]) {
        crow.exps.push_back({1.0, L.index(n, L.kFr), -1});
      }
      crow.constant = -1.0;
      if (!crow.exps.empty()) add_row(std::move(crow));
    }

    SmoothConstraint hrow;
    hrow.kind = RowKind::ExpSum;
    hrow.category = RowCategory::Core;
    hrow.tag = "compute-haps";
    for (int n = 0; n < n_icvs; ++n) {
      hrow.exps.push_back({1.0, L.index(n, L.kFh), -1});
    }
    hrow.constant = -1.0;
    add_row(std::move(hrow));
  }

  // Box floors keep every free log/ratio coordinate bounded below, which
  // keeps the barrier problem's sublevel sets compact.
  for (int n = 0; n < n_icvs; ++n) {
    const std::string id = std::to_string(n);
    auto add_floor = [&](int field, double lo, const std::string& what) {
      const int idx = L.index(n, field);
      if (sp.frozen[idx]) return;
      SmoothConstraint row;
      row.kind = RowKind::Linear;
      row.category = RowCategory::Box;
      row.tag = what + "-floor[" + id + "]";
      row.lin = {{idx, -1.0}};
      row.constant = lo;
      add_row(std::move(row));
    };
    add_floor(L.kXr, std::log(options.split_floor), "xbar_r");
    add_floor(L.kXh, std::log(options.split_floor), "xbar_h");
    add_floor(L.kBr, options.ratio_floor, "b_r");
    add_floor(L.kBh, options.ratio_floor, "b_h");
    add_floor(L.kPr, options.ratio_floor, "p_r");
    add_floor(L.kPh, options.ratio_floor, "p_h");
    add_floor(L.kTaur, std::log(options.offload_floor), "taubar_r");
    add_floor(L.kTauh, std::log(options.offload_floor), "taubar_h");
    add_floor(L.kFr, std::log(options.compute_floor), "fbar_r");
    add_floor(L.kFh, std::log(options.compute_floor), "fbar_h");
  }

  sp.start = feasible_start(sp, scenario, channels);
  if (!sp.strictly_feasible(sp.start)) {
    throw std::logic_error("assembled subproblem start is not interior");
  }
  return sp;
}

Eigen::VectorXd feasible_start(const ConvexSubproblem& sp,
                               const Scenario& scenario,
                               const ChannelRealization& channels) {
  const auto& L = sp.layout;
  const auto& options = sp.options;
  const int n_icvs = L.num_icvs;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(L.dim());

  for (int i = 0; i < L.dim(); ++i) {
    if (sp.frozen[i]) z[i] = pinned_value(i % L.kBlock, options);
  }
  if (n_icvs == 0) return z;

  const auto splits = start_splits(scenario, channels, options);
  const auto& radio = scenario.radio;
  const double b0 = 0.9 / (2.0 * n_icvs);

  for (int n = 0; n < n_icvs; ++n) {
    const auto& task = scenario.tasks[n];
    const int m = scenario.rsu_of(scenario.icvs[n].position);
    if (!sp.frozen[L.index(n, L.kXr)]) {
      z[L.index(n, L.kXr)] = std::log(splits[n].first);
      z[L.index(n, L.kBr)] = b0;
      z[L.index(n, L.kPr)] = 0.45;
      z[L.index(n, L.kFr)] = std::log(0.9 / scenario.association[m].size());
      const double rate =
          link_rate(b0, radio.bandwidth, 0.45, radio.tx_power,
                    channels.gain_rsu[n], radio.noise_density);
      z[L.index(n, L.kTaur)] = std::log(start_offload_delay(
          splits[n].first, task.input_bits, rate, options.offload_floor));
    }
    if (!sp.frozen[L.index(n, L.kXh)]) {
      z[L.index(n, L.kXh)] = std::log(splits[n].second);
      z[L.index(n, L.kBh)] = b0;
      z[L.index(n, L.kPh)] = 0.45;
      z[L.index(n, L.kFh)] = std::log(0.9 / n_icvs);
      const double rate =
          link_rate(b0, radio.bandwidth, 0.45, radio.tx_power,
                    channels.gain_haps[n], radio.noise_density);
      z[L.index(n, L.kTauh)] = std::log(start_offload_delay(
          splits[n].second, task.input_bits, rate, options.offload_floor));
    }
  }

  // T at twice the worst branch: for every row that upper-bounds T_n, set
  // T_n to twice the row value evaluated with T_n = 0.
  for (int n = 0; n < n_icvs; ++n) z[L.index(n, L.kT)] = 0.0;
  for (const auto& row : sp.rows) {
    int t_index = -1;
    double t_coef = 0.0;
    for (const auto& t : row.lin) {
      if (t.index % L.kBlock == L.kT && t.index < L.kBlock * n_icvs &&
          t.coef < 0.0) {
        t_index = t.index;
        t_coef = t.coef;
      }
    }
    if (t_index < 0) continue;
    const double saved = z[t_index];
    z[t_index] = 0.0;
    const double v = row.value(z);
    z[t_index] = std::max({saved, 1e-9, 2.0 * v / (-t_coef)});
  }
  if (L.has_epigraph) {
    double worst = 0.0;
    for (int n = 0; n < n_icvs; ++n) {
      worst = std::max(worst, z[L.index(n, L.kT)]);
    }
    z[L.epigraph_index()] = std::max(1e-9, 2.0 * worst);
  }

  if (!sp.strictly_feasible(z)) {
    throw std::logic_error("feasible start construction failed");
  }
  return z;
}

// ---------------------------------------------------------------------------
// Log-barrier interior-point solve

namespace {

double barrier_value(const ConvexSubproblem& sp, const Eigen::VectorXd& z,
                     double t) {
  double phi = t * sp.objective.dot(z);
  for (const auto& row : sp.rows) {
    const double g = row.value(z);
    if (!(g < 0.0) || !std::isfinite(g)) return kInf;
    phi -= std::log(-g);
  }
  return phi;
}

}  // namespace

SolveReport solve(const ConvexSubproblem& sp, const SolveOptions& options) {
  SolveReport report;
  const int dim = sp.layout.dim();
  const int m = static_cast<int>(sp.rows.size());

  std::vector<int> free_idx;
  free_idx.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    if (!sp.frozen[i]) free_idx.push_back(i);
  }
  const int nf = static_cast<int>(free_idx.size());

  Eigen::VectorXd z = sp.start;
  report.solution = z;
  report.objective = m > 0 ? sp.objective.dot(z) : 0.0;

  if (dim == 0 || nf == 0 || m == 0) {
    report.success = true;
    report.message = "trivial problem";
    return report;
  }
  if (!sp.strictly_feasible(z)) {
    report.message = "start point is not strictly feasible";
    return report;
  }

  Eigen::VectorXd grad(dim), dz(dim);
  Eigen::MatrixXd hess(dim, dim);
  Eigen::VectorXd gf(nf), df(nf);
  Eigen::MatrixXd hf(nf, nf);
  std::vector<double> slack(m);

  double t = options.barrier_t0;
  bool out_of_budget = false;
  bool stagnated = false;

  // One damped Newton step on the barrier at the current t. Returns the
  // squared Newton decrement (negative on failure); skips the step once the
  // decrement is already below tol.
  auto newton_step = [&](double tol) -> double {
    grad.setZero();
    hess.setZero();
    for (int i = 0; i < m; ++i) {
      const double g = sp.rows[i].value(z);
      if (!(g < 0.0)) return -1.0;
      slack[i] = -g;
      const double inv = 1.0 / slack[i];
      sp.rows[i].add_barrier_terms(z, inv, inv * inv, inv, grad, hess);
    }
    grad += t * sp.objective;

    for (int a = 0; a < nf; ++a) {
      gf[a] = grad[free_idx[a]];
      for (int b = 0; b < nf; ++b) hf(a, b) = hess(free_idx[a], free_idx[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(hf);
    if (llt.info() != Eigen::Success) {
      double reg = 1e-10 * std::max(1.0, hf.diagonal().maxCoeff());
      for (int attempt = 0; attempt < 4 && llt.info() != Eigen::Success;
           ++attempt) {
        hf.diagonal().array() += reg;
        llt.compute(hf);
        reg *= 100.0;
      }
      if (llt.info() != Eigen::Success) return -1.0;
    }
    df = -llt.solve(gf);
    const double descent = gf.dot(df);
    const double lambda2 = -descent;
    if (lambda2 * 0.5 <= tol) return lambda2;

    dz.setZero();
    for (int a = 0; a < nf; ++a) dz[free_idx[a]] = df[a];

    // Exact ratio test on the linear rows; nonlinear rows are handled by the
    // backtracking below (the barrier value is +inf outside the interior).
    double cap = kInf;
    for (int i = 0; i < m; ++i) {
      if (sp.rows[i].kind != RowKind::Linear) continue;
      double delta = 0.0;
      for (const auto& lt : sp.rows[i].lin) delta += lt.coef * dz[lt.index];
      if (delta > 0.0) cap = std::min(cap, slack[i] / delta);
    }
    double alpha = std::min(1.0, options.boundary_fraction * cap);
    if (lambda2 <= 0.0625) {
      // Quadratic-convergence region: the full damped step is guaranteed to
      // descend, and Armijo tests on the barrier value would be dominated by
      // floating-point noise at large t. Only enforce strict feasibility.
      int halvings = 0;
      while (halvings < 90 &&
             !std::isfinite(barrier_value(sp, z + alpha * dz, t))) {
        alpha *= 0.5;
        ++halvings;
      }
      if (halvings >= 90) return -1.0;
    } else {
      const double phi0 = barrier_value(sp, z, t);
      int backtracks = 0;
      while (backtracks < 90) {
        const double phi = barrier_value(sp, z + alpha * dz, t);
        if (phi <= phi0 + options.armijo_slope * alpha * descent) break;
        alpha *= options.backtrack;
        ++backtracks;
      }
      if (backtracks >= 90) return -1.0;
    }
    z += alpha * dz;
    ++report.newton_steps;
    return lambda2;
  };

  for (;;) {
    bool centered = false;
    for (int it = 0; it < options.max_stage_newton; ++it) {
      if (report.newton_steps >= options.max_newton) {
        out_of_budget = true;
        break;
      }
      const double lambda2 = newton_step(options.newton_tol);
      if (lambda2 < 0.0) {
        stagnated = true;
        break;
      }
      if (lambda2 * 0.5 <= options.newton_tol) {
        centered = true;
        break;
      }
    }
    ++report.barrier_stages;
    report.stage_objectives.push_back(sp.objective.dot(z));
    if (out_of_budget || stagnated || !centered) break;
    if (m / t <= options.gap_target) break;
    t *= options.barrier_growth;
  }

  // Relative dual residual with the barrier multipliers 1/(t s_i):
  // ||c + sum lambda_i grad g_i||_inf / (1 + max lambda_i). Refined with a
  // few extra Newton steps if the stationarity target was missed.
  auto kkt_residual = [&]() {
    grad = sp.objective;
    double lambda_max = 0.0;
    for (int i = 0; i < m; ++i) {
      const double g = sp.rows[i].value(z);
      if (!(g < 0.0)) return kInf;
      const double inv = 1.0 / (-g * t);
      lambda_max = std::max(lambda_max, inv);
      sp.rows[i].add_barrier_terms(z, inv, 0.0, 0.0, grad, hess);
    }
    double worst = 0.0;
    for (int idx : free_idx) worst = std::max(worst, std::abs(grad[idx]));
    return worst / (1.0 + lambda_max);
  };
  report.kkt_residual = kkt_residual();
  const double refine_tol = std::min(options.newton_tol, 1e-14);
  for (int extra = 0;
       extra < 25 && report.kkt_residual > 0.5 * options.tol_kkt &&
       report.newton_steps < options.max_newton && !stagnated;
       ++extra) {
    const double lambda2 = newton_step(refine_tol);
    if (lambda2 < 0.0) break;
    report.kkt_residual = kkt_residual();
    if (lambda2 * 0.5 <= refine_tol) break;  // fully centered; no progress left
  }

  report.solution = z;
  report.objective = sp.objective.dot(z);
  report.gap = m / t;
  report.max_violation = std::max(0.0, sp.max_violation(z));
  report.success = !out_of_budget && !stagnated &&
                   report.gap <= options.gap_target * (1.0 + 1e-12) &&
                   report.max_violation <= options.tol_feas &&
                   report.kkt_residual <= options.tol_kkt;
  if (out_of_budget) {
    report.message = "newton budget exhausted";
  } else if (stagnated) {
    report.message = "line search stagnated";
  } else if (!report.success) {
    report.message = "tolerances not met";
  } else {
    report.message = "ok";
  }
  return report;
}

SolveReport solve(const ConvexSubproblem& sp, double tol_kkt, int max_newton) {
  SolveOptions options;
  options.tol_kkt = tol_kkt;
  options.max_newton = max_newton;
  return solve(sp, options);
}

}  // namespace hrvin
