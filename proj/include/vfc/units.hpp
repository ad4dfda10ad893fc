#pragma once

#include <cmath>

namespace vfc {

inline constexpr double kLightSpeedMps = 3.0e8;

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double kb_to_bits(double kb) { return kb * 8000.0; }
inline double ghz_to_hz(double ghz) { return ghz * 1e9; }
inline double mhz_to_hz(double mhz) { return mhz * 1e6; }

}  // namespace vfc
