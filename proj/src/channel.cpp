#include "hrvin/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "hrvin/units.hpp"

namespace hrvin {

namespace {

constexpr std::uint64_t kFadingTag = 0x66616465ULL;

// Ground links never get closer than the reference distance.
constexpr double kMinRsuDistance = 1.0;

}  // namespace

double sample_fading_sq(FadingKind kind, double rician_k, Rng& rng) {
  if (kind == FadingKind::Rayleigh) {
    // |h|^2 of a standard complex normal is exponential with mean 1.
    return rng.exponential();
  }
  const double k = rician_k;
  const double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
  const double re = std::sqrt(k / (k + 1.0)) + sigma * rng.normal();
  const double im = sigma * rng.normal();
  return re * re + im * im;
}

FadingDraw sample_fading(double rician_k, Rng& rng) {
  FadingDraw draw;
  draw.h_rsu_sq = sample_fading_sq(FadingKind::Rayleigh, 0.0, rng);
  draw.h_haps_sq = sample_fading_sq(FadingKind::Rician, rician_k, rng);
  return draw;
}

FadingDraw sample_fading(double rician_k, std::uint64_t seed) {
  Rng rng(seed);
  return sample_fading(rician_k, rng);
}

double nlos_gain(double d, double alpha, double beta0, double h_sq) {
  if (d <= 0) throw std::domain_error("nlos_gain: distance must be positive");
  return beta0 * h_sq / std::pow(d, alpha);
}

double los_gain(double d, double fc, double antenna_gain, double h_sq) {
  if (d <= 0) throw std::domain_error("los_gain: distance must be positive");
  if (fc <= 0) throw std::domain_error("los_gain: frequency must be positive");
  const double x = units::kSpeedOfLight / (4.0 * std::numbers::pi * d * fc);
  return antenna_gain * x * x * h_sq;
}

double link_rate(double b_frac, double bandwidth, double p_frac, double power,
                 double gain, double noise_density) {
  if (b_frac <= 0) {
    throw std::domain_error("link_rate: bandwidth fraction must be positive");
  }
  const double hz = b_frac * bandwidth;
  const double snr = p_frac * power * gain / (hz * noise_density);
  return hz * std::log2(1.0 + snr);
}

ChannelRealization realize_channels(const Scenario& scenario,
                                    std::uint64_t seed) {
  const int n_icvs = scenario.num_icvs();
  ChannelRealization ch;
  ch.d_rsu.resize(n_icvs);
  ch.d_haps.resize(n_icvs);
  ch.gain_rsu.resize(n_icvs);
  ch.gain_haps.resize(n_icvs);
  ch.prop_rsu.resize(n_icvs);
  ch.prop_haps.resize(n_icvs);

  Rng rng(substream_seed(seed, kFadingTag));
  const auto& radio = scenario.radio;
  for (int n = 0; n < n_icvs; ++n) {
    const double l = scenario.icvs[n].position;
    const int m = scenario.rsu_of(l);
    const double rsu_pos = scenario.road.rsu_positions[m];
    ch.d_rsu[n] = std::max(kMinRsuDistance, std::abs(l - rsu_pos));
    ch.d_haps[n] = std::hypot(scenario.road.haps_altitude,
                              l - scenario.road.haps_horizontal);

    const FadingDraw fading = sample_fading(radio.rician_k, rng);
    ch.gain_rsu[n] = nlos_gain(ch.d_rsu[n], radio.pathloss_exponent,
                               radio.beta0, fading.h_rsu_sq);
    ch.gain_haps[n] = los_gain(ch.d_haps[n], radio.carrier_freq,
                               radio.haps_antenna_gain, fading.h_haps_sq);
    ch.prop_rsu[n] = ch.d_rsu[n] / units::kSpeedOfLight;
    ch.prop_haps[n] = ch.d_haps[n] / units::kSpeedOfLight;
  }
  return ch;
}

}  // namespace hrvin
