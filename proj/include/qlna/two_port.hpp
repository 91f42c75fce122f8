#pragma once

#include <complex>
#include <vector>

namespace qlna::rf {

using Complex = std::complex<double>;

struct TwoPortRecord {
    double frequency = 0.0;  // [Hz]
    Complex s11{}, s12{}, s21{}, s22{};
    double z0 = 50.0;  // [Ohm]

    void validate() const;
};

/// Device noise parameters at one frequency.
struct NoiseParameters {
    double f_min = 1.0;  // minimum noise factor, linear
    double r_n = 0.0;    // equivalent noise resistance normalized to Z0
    Complex gamma_opt{};

    void validate() const;
};

struct NoiseRecord {
    double frequency = 0.0;  // [Hz]
    NoiseParameters params;
};

/// Linear interpolation of noise parameters in frequency (F_min, r_n and the
/// real/imaginary parts of Gamma_opt). Throws ValidationError outside the
/// covered range.
NoiseParameters interpolate_noise(const std::vector<NoiseRecord>& records, double frequency);

/// Linear interpolation of S-parameters; same range rule.
TwoPortRecord interpolate_record(const std::vector<TwoPortRecord>& records, double frequency);

}  // namespace qlna::rf
