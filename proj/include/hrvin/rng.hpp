#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hrvin {

// Deterministic splitmix64 stream. All randomness in the project flows
// through this type so that runs are reproducible bit-for-bit across
// platforms (the standard-library distributions are not pinned by the
// standard, so we roll the few transforms we need).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; one fresh pair per call, spare discarded
  // to keep the stream position independent of call history.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Exponential with mean 1.
  double exponential() { return -std::log(1.0 - uniform()); }

 private:
  std::uint64_t state_;
};

// Derives an independent substream seed from (base, tag, index). Used to give
// scenario generation, per-slot task draws, and per-slot fading draws their
// own streams so schemes compared at the same (seed, slot) share inputs.
inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t tag,
                                    std::uint64_t index = 0) {
  Rng mixer(base ^ (tag * 0x9e3779b97f4a7c15ULL) ^
            (index + 0x517cc1b727220a95ULL) * 0xda942042e4dd58b5ULL);
  return mixer.next_u64();
}

}  // namespace hrvin
