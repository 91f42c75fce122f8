#include "qlna/nonlinearity.hpp"

#include "qlna/errors.hpp"
#include "qlna/units.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace qlna::nonlinear {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// Coefficient of exp(i(p a + q b)) in (cos a + cos b)^n.
double exponential_coefficient(int n, int p, int q) {
    // (e^{ia} + e^{-ia} + e^{ib} + e^{-ib})^n / 2^n; count multinomial terms with
    // k1 - k2 = p and k3 - k4 = q.
    double sum = 0.0;
    for (int k2 = 0; k2 <= n; ++k2) {
        const int k1 = k2 + p;
        if (k1 < 0 || k1 + k2 > n) continue;
        for (int k4 = 0; k1 + k2 + k4 <= n; ++k4) {
            const int k3 = k4 + q;
            if (k3 < 0 || k1 + k2 + k3 + k4 != n) continue;
            sum += factorial(n) / (factorial(k1) * factorial(k2) * factorial(k3) * factorial(k4));
        }
    }
    return sum / std::ldexp(1.0, n);
}

double power_dbm(double amplitude, double z0) {
    return amplitude == 0.0 ? kNegInf : amplitude_to_dbm(std::abs(amplitude), z0);
}

}  // namespace

void PolynomialAmp::validate() const {
    if (!std::isfinite(a1) || a1 <= 0.0) throw ValidationError("a1", "linear gain must be > 0");
    if (!std::isfinite(a3)) throw ValidationError("a3", "must be finite");
    if (!std::isfinite(a5)) throw ValidationError("a5", "must be finite");
    if (!std::isfinite(z0) || z0 <= 0.0) throw ValidationError("Z0", "must be > 0");
}

void TwoToneSpec::validate() const {
    if (!std::isfinite(center) || center <= 0.0) throw ValidationError("center", "must be > 0");
    if (!std::isfinite(detuning) || detuning <= 0.0 || detuning >= center)
        throw ValidationError("detuning", "must satisfy 0 < detuning < center");
    if (!std::isfinite(tone_power_dbm)) throw ValidationError("tone_power", "must be finite");
}

PolynomialAmp fit_from_specs(double gain_db, double iip3_dbm, double z0) {
    if (!std::isfinite(gain_db)) throw ValidationError("gain", "must be finite");
    if (!std::isfinite(iip3_dbm)) throw ValidationError("iip3", "must be finite");
    PolynomialAmp amp;
    amp.z0 = z0;
    amp.a1 = std::pow(10.0, gain_db / 20.0);
    const double a_ip3 = dbm_to_amplitude(iip3_dbm, z0);
    amp.a3 = -4.0 * amp.a1 / (3.0 * a_ip3 * a_ip3);
    amp.validate();
    return amp;
}

std::optional<double> iip3_amplitude(const PolynomialAmp& amp) {
    amp.validate();
    if (amp.a3 == 0.0) return std::nullopt;
    return std::sqrt(4.0 * amp.a1 / (3.0 * std::abs(amp.a3)));
}

std::optional<double> iip3_dbm(const PolynomialAmp& amp) {
    const auto a = iip3_amplitude(amp);
    if (!a) return std::nullopt;
    return amplitude_to_dbm(*a, amp.z0);
}

double mixing_amplitude(const PolynomialAmp& amp, double tone_amplitude, int p, int q) {
    // Real amplitude of cos(p a + q b) collects the (p, q) and (-p, -q) exponentials.
    const double fold = (p == 0 && q == 0) ? 1.0 : 2.0;
    const double coefficients[] = {amp.a1, amp.a3, amp.a5};
    const int orders[] = {1, 3, 5};
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (coefficients[k] == 0.0) continue;
        const int n = orders[k];
        if (std::abs(p) + std::abs(q) > n) continue;
        total += coefficients[k] * std::pow(tone_amplitude, n) * fold * exponential_coefficient(n, p, q);
    }
    return total;
}

TwoToneResponse two_tone_response(const PolynomialAmp& amp, const TwoToneSpec& spec) {
    amp.validate();
    spec.validate();
    const double a = dbm_to_amplitude(spec.tone_power_dbm, amp.z0);

    TwoToneResponse r;
    r.input_dbm = spec.tone_power_dbm;
    r.f_lower = spec.center - spec.detuning;
    r.f_upper = spec.center + spec.detuning;
    r.f_im3_lower = 2.0 * r.f_lower - r.f_upper;
    r.f_im3_upper = 2.0 * r.f_upper - r.f_lower;
    r.f_im5_lower = 3.0 * r.f_lower - 2.0 * r.f_upper;
    r.f_im5_upper = 3.0 * r.f_upper - 2.0 * r.f_lower;

    r.fundamental_dbm = power_dbm(mixing_amplitude(amp, a, 1, 0), amp.z0);
    r.im3_dbm = power_dbm(mixing_amplitude(amp, a, 2, -1), amp.z0);
    r.im5_dbm = power_dbm(mixing_amplitude(amp, a, 3, -2), amp.z0);
    r.imd3_db = r.fundamental_dbm - r.im3_dbm;
    r.imd5_db = r.fundamental_dbm - r.im5_dbm;
    return r;
}

double first_harmonic(const PolynomialAmp& amp, double amplitude) {
    const double a2 = amplitude * amplitude;
    return amplitude * (amp.a1 + a2 * (0.75 * amp.a3 + 0.625 * amp.a5 * a2));
}

CompressionCurve compression_curve(const PolynomialAmp& amp, std::span<const double> input_dbm) {
    amp.validate();
    if (input_dbm.empty()) throw ValidationError("input power range", "must not be empty");

    CompressionCurve curve;
    curve.small_signal_gain_db = 20.0 * std::log10(amp.a1);
    const auto gain_at = [&](double amplitude) {
        return 20.0 * std::log10(std::abs(first_harmonic(amp, amplitude)) / amplitude);
    };

    for (double pin : input_dbm) {
        if (!std::isfinite(pin)) throw ValidationError("input power range", "values must be finite");
        const double a = dbm_to_amplitude(pin, amp.z0);
        CompressionPoint pt;
        pt.input_dbm = pin;
        pt.gain_db = gain_at(a);
        pt.output_dbm = pin + pt.gain_db;
        curve.points.push_back(pt);
    }

    // First downward crossing of the 1 dB compression level, refined by bisection.
    const double target = curve.small_signal_gain_db - 1.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& lo = curve.points[i - 1];
        const auto& hi = curve.points[i];
        if (!((lo.gain_db - target) > 0.0 && (hi.gain_db - target) <= 0.0)) continue;
        double a_lo = dbm_to_amplitude(lo.input_dbm, amp.z0);
        double a_hi = dbm_to_amplitude(hi.input_dbm, amp.z0);
        for (int it = 0; it < 200 && a_hi - a_lo > 1e-15 * a_hi; ++it) {
            const double mid = 0.5 * (a_lo + a_hi);
            (gain_at(mid) > target ? a_lo : a_hi) = mid;
        }
        curve.p1db_input_dbm = amplitude_to_dbm(0.5 * (a_lo + a_hi), amp.z0);
        break;
    }
    return curve;
}

}  // namespace qlna::nonlinear
