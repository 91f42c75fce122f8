#pragma once

#include <cmath>

namespace qlna {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kReferenceTemperature = 290.0;  // K, IEEE noise reference
inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_power_to_db(double p) { return 10.0 * std::log10(p); }

inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

/// Peak amplitude of a sinusoid that delivers `dbm` into `z0`.
inline double dbm_to_amplitude(double dbm, double z0) {
    return std::sqrt(2.0 * z0 * dbm_to_watts(dbm));
}

inline double amplitude_to_dbm(double amplitude, double z0) {
    return watts_to_dbm(amplitude * amplitude / (2.0 * z0));
}

}  // namespace qlna
