#pragma once

#include <cstdint>
#include <vector>

#include "hrvin/rng.hpp"
#include "hrvin/scenario.hpp"

namespace hrvin {

enum class FadingKind { Rayleigh, Rician };

// Squared small-scale fading magnitudes for one ICV's two links. Both
// distributions have unit mean power.
struct FadingDraw {
  double h_rsu_sq = 1.0;   // |h|^2, Rayleigh (NLoS ground link)
  double h_haps_sq = 1.0;  // |h|^2, Rician (LoS HAPS link)
};

// |h|^2 for a single coefficient. Rayleigh: exponential(1). Rician with
// linear factor K: h = sqrt(K/(K+1)) + sqrt(1/(K+1)) * g, g standard complex
// normal, so E|h|^2 = 1.
double sample_fading_sq(FadingKind kind, double rician_k, Rng& rng);

FadingDraw sample_fading(double rician_k, Rng& rng);
FadingDraw sample_fading(double rician_k, std::uint64_t seed);

// NLoS gain beta0 * h^2 / d^alpha. Throws std::domain_error for d <= 0.
double nlos_gain(double d, double alpha, double beta0, double h_sq);

// LoS gain G * (c / (4 pi d fc))^2 * h^2. Throws for d <= 0 or fc <= 0.
double los_gain(double d, double fc, double antenna_gain, double h_sq);

// Achievable rate b*B*log2(1 + p*P*G / (b*B*N0)) in bits/s. Zero when
// p_frac == 0; throws std::domain_error when b_frac <= 0 (rates are only
// ever evaluated at strictly positive bandwidth).
double link_rate(double b_frac, double bandwidth, double p_frac, double power,
                 double gain, double noise_density);

// Per-ICV link state for one decision slot (block fading: one draw per slot).
struct ChannelRealization {
  std::vector<double> d_rsu;        // meters, clamped below at 1 m
  std::vector<double> d_haps;       // meters
  std::vector<double> gain_rsu;     // unitless
  std::vector<double> gain_haps;    // unitless
  std::vector<double> prop_rsu;     // seconds
  std::vector<double> prop_haps;    // seconds
  int num_icvs() const { return static_cast<int>(d_rsu.size()); }
};

ChannelRealization realize_channels(const Scenario& scenario,
                                    std::uint64_t seed);

}  // namespace hrvin
