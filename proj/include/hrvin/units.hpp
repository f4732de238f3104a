#pragma once

#include <cmath>
#include <numbers>

namespace hrvin::units {

// Propagation speed used for both path loss and propagation delay (m/s).
inline constexpr double kSpeedOfLight = 3.0e8;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double dbi_to_linear(double dbi) { return db_to_linear(dbi); }
inline double mhz_to_hz(double mhz) { return mhz * 1e6; }
inline double ghz_to_hz(double ghz) { return ghz * 1e9; }
inline double kbit_to_bit(double kbit) { return kbit * 1e3; }
inline double gcycles_to_cycles(double g) { return g * 1e9; }

// Free-space loss at the 1 m reference distance for carrier frequency fc.
inline double reference_pathloss(double fc_hz) {
  const double x = kSpeedOfLight / (4.0 * std::numbers::pi * fc_hz);
  return x * x;
}

}  // namespace hrvin::units
