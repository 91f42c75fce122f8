#pragma once

#include <optional>
#include <span>
#include <vector>

namespace qlna::nonlinear {

/// Memoryless odd-order amplifier y = a1 x + a3 x^3 + a5 x^5.
struct PolynomialAmp {
    double a1 = 1.0;   // [V/V], > 0
    double a3 = 0.0;   // [V/V^3]
    double a5 = 0.0;   // [V/V^5]
    double z0 = 50.0;  // [Ohm] for dBm conversion

    void validate() const;
    double operator()(double x) const { return x * (a1 + x * x * (a3 + x * x * a5)); }
};

struct TwoToneSpec {
    double center = 1.6e9;        // [Hz]
    double detuning = 1e6;        // [Hz], tones at center -/+ detuning
    double tone_power_dbm = -60;  // per tone

    void validate() const;
};

/// Small-signal gain from gain_db, a3 chosen (compressive) so the
/// third-order intercept sits at iip3_dbm. a5 = 0.
PolynomialAmp fit_from_specs(double gain_db, double iip3_dbm, double z0 = 50.0);

/// Input amplitude at which the extrapolated fundamental and IM3 meet:
/// sqrt(4 a1 / (3 |a3|)). Empty when a3 == 0 (no finite intercept).
std::optional<double> iip3_amplitude(const PolynomialAmp& amp);
std::optional<double> iip3_dbm(const PolynomialAmp& amp);

/// Signed amplitude of cos(p w1 t + q w2 t) in y(A cos w1 t + A cos w2 t),
/// from the exact multinomial expansion of each polynomial power. (p, q) and
/// (-p, -q) are folded together.
double mixing_amplitude(const PolynomialAmp& amp, double tone_amplitude, int p, int q);

struct TwoToneResponse {
    double input_dbm = 0.0;
    double fundamental_dbm = 0.0;  // output at f1 (and by symmetry f2)
    double im3_dbm = 0.0;          // output at 2 f1 - f2; -inf when absent
    double im5_dbm = 0.0;          // output at 3 f1 - 2 f2; -inf when absent
    double imd3_db = 0.0;          // fundamental_dbm - im3_dbm
    double imd5_db = 0.0;          // fundamental_dbm - im5_dbm
    double f_lower = 0.0, f_upper = 0.0;
    double f_im3_lower = 0.0, f_im3_upper = 0.0;
    double f_im5_lower = 0.0, f_im5_upper = 0.0;
};

TwoToneResponse two_tone_response(const PolynomialAmp& amp, const TwoToneSpec& spec);

/// Single-tone first-harmonic output amplitude: a1 A + 3/4 a3 A^3 + 5/8 a5 A^5.
double first_harmonic(const PolynomialAmp& amp, double amplitude);

struct CompressionPoint {
    double input_dbm = 0.0;
    double gain_db = 0.0;
    double output_dbm = 0.0;
};

struct CompressionCurve {
    double small_signal_gain_db = 0.0;
    std::vector<CompressionPoint> points;
    std::optional<double> p1db_input_dbm;  // empty when not bracketed by the range
};

CompressionCurve compression_curve(const PolynomialAmp& amp, std::span<const double> input_dbm);

}  // namespace qlna::nonlinear
