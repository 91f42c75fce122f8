#include "qlna/two_port.hpp"

#include "qlna/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qlna::rf {

namespace {

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

template <typename Record>
std::size_t bracket(const std::vector<Record>& records, double frequency, const char* what) {
    if (records.empty()) throw ValidationError(what, "no data to interpolate");
    if (!(frequency >= records.front().frequency && frequency <= records.back().frequency))
        throw ValidationError(what, "frequency " + std::to_string(frequency) + " Hz outside data range");
    auto it = std::lower_bound(records.begin(), records.end(), frequency,
                               [](const Record& r, double f) { return r.frequency < f; });
    const auto hi = static_cast<std::size_t>(it - records.begin());
    return hi == 0 ? 1 : hi;
}

}  // namespace

void TwoPortRecord::validate() const {
    if (!std::isfinite(frequency) || frequency <= 0.0) throw ValidationError("frequency", "must be > 0");
    if (!std::isfinite(z0) || z0 <= 0.0) throw ValidationError("Z0", "must be > 0");
    if (!finite(s11) || !finite(s12) || !finite(s21) || !finite(s22))
        throw ValidationError("S", "parameters must be finite");
}

void NoiseParameters::validate() const {
    if (!std::isfinite(f_min) || f_min < 1.0) throw ValidationError("F_min", "noise factor must be >= 1");
    if (!std::isfinite(r_n) || r_n < 0.0) throw ValidationError("r_n", "must be >= 0");
    if (!finite(gamma_opt) || std::abs(gamma_opt) >= 1.0)
        throw ValidationError("Gamma_opt", "must lie inside the unit disk");
}

NoiseParameters interpolate_noise(const std::vector<NoiseRecord>& records, double frequency) {
    if (records.size() == 1) {
        if (frequency != records.front().frequency)
            throw ValidationError("noise parameters", "single record cannot cover other frequencies");
        return records.front().params;
    }
    const std::size_t hi = bracket(records, frequency, "noise parameters");
    const auto& a = records[hi - 1];
    const auto& b = records[hi];
    const double t = (frequency - a.frequency) / (b.frequency - a.frequency);
    NoiseParameters p;
    p.f_min = a.params.f_min + t * (b.params.f_min - a.params.f_min);
    p.r_n = a.params.r_n + t * (b.params.r_n - a.params.r_n);
    p.gamma_opt = a.params.gamma_opt + t * (b.params.gamma_opt - a.params.gamma_opt);
    return p;
}

TwoPortRecord interpolate_record(const std::vector<TwoPortRecord>& records, double frequency) {
    if (records.size() == 1) {
        if (frequency != records.front().frequency)
            throw ValidationError("S-parameters", "single record cannot cover other frequencies");
        return records.front();
    }
    const std::size_t hi = bracket(records, frequency, "S-parameters");
    const auto& a = records[hi - 1];
    const auto& b = records[hi];
    const double t = (frequency - a.frequency) / (b.frequency - a.frequency);
    TwoPortRecord r = a;
    r.frequency = frequency;
    r.s11 = a.s11 + t * (b.s11 - a.s11);
    r.s12 = a.s12 + t * (b.s12 - a.s12);
    r.s21 = a.s21 + t * (b.s21 - a.s21);
    r.s22 = a.s22 + t * (b.s22 - a.s22);
    return r;
}

}  // namespace qlna::rf
