#include "qlna/quantum_fluctuations.hpp"

#include "qlna/errors.hpp"

#include <cmath>
#include <string>

namespace qlna::quantum {

void OscillatorSpec::validate() const {
    for (int i = 0; i < 3; ++i) {
        const std::string idx = std::to_string(i + 1);
        if (!std::isfinite(photons[i]) || photons[i] < 0.0)
            throw ValidationError("n_" + idx, "photon number must be finite and >= 0");
        if (!std::isfinite(impedances[i]) || impedances[i] <= 0.0)
            throw ValidationError("Z_" + idx, "impedance must be finite and > 0");
    }
}

ThermalVariances thermal_variances(double photons, double impedance) {
    if (!(photons >= 0.0)) throw ValidationError("n", "photon number must be >= 0");
    if (!(impedance > 0.0)) throw ValidationError("Z", "impedance must be > 0");
    const double occupation = 2.0 * photons + 1.0;
    return {impedance * occupation / 2.0, occupation / (2.0 * impedance)};
}

Triple derive_impedances(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv) {
    Triple z{};
    for (int i = 0; i < 3; ++i) z[i] = std::sqrt(model.inductance(i) * inv(i, i));
    return z;
}

Triple derive_impedances_from_diagonal(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv) {
    const Eigen::Matrix3d c = inv.entries().inverse();
    Triple z{};
    for (int i = 0; i < 3; ++i) z[i] = std::sqrt(model.inductance(i) / c(i, i));
    return z;
}

double input_voltage_variance(const SmallSignalModel& model, const InverseCapacitanceMatrix& c,
                              const OscillatorSpec& spec) {
    spec.validate();
    const auto v1 = thermal_variances(spec.photons[0], spec.impedances[0]);
    const auto v2 = thermal_variances(spec.photons[1], spec.impedances[1]);
    const auto v3 = thermal_variances(spec.photons[2], spec.impedances[2]);

    // V_in = C11 Q1 + (C12+C21)/2 Q2 + (C13+C31)/2 Q3 + C11 g_m1 phi2 + C12 g_m2 phi3 + const
    const double w_q1 = c(0, 0);
    const double w_q2 = (c(0, 1) + c(1, 0)) / 2.0;
    const double w_q3 = (c(0, 2) + c(2, 0)) / 2.0;
    const double w_phi2 = c(0, 0) * model.g_m1;
    const double w_phi3 = c(0, 1) * model.g_m2;

    return w_q1 * w_q1 * v1.charge + w_q2 * w_q2 * v2.charge + w_phi2 * w_phi2 * v2.flux +
           w_q3 * w_q3 * v3.charge + w_phi3 * w_phi3 * v3.flux;
}

double output_current_variance(const SmallSignalModel& model, const InverseCapacitanceMatrix& c,
                               const OscillatorSpec& spec) {
    spec.validate();
    const auto v1 = thermal_variances(spec.photons[0], spec.impedances[0]);
    const auto v2 = thermal_variances(spec.photons[1], spec.impedances[1]);
    const auto v3 = thermal_variances(spec.photons[2], spec.impedances[2]);

    // I_out = -C12 g_m2 Q1 - C22 g_m2 Q2 - C32 g_m2 Q3 - phi3 / L_d3
    const double w_q1 = c(0, 1) * model.g_m2;
    const double w_q2 = c(1, 1) * model.g_m2;
    const double w_q3 = c(2, 1) * model.g_m2;
    const double w_phi3 = 1.0 / model.l_d3;

    return w_q1 * w_q1 * v1.charge + w_q2 * w_q2 * v2.charge + w_q3 * w_q3 * v3.charge +
           w_phi3 * w_phi3 * v3.flux;
}

FluctuationResult transconductance_fluctuation(const SmallSignalModel& model,
                                               const InverseCapacitanceMatrix& inv,
                                               const OscillatorSpec& spec) {
    FluctuationResult r;
    r.delta_iout2 = output_current_variance(model, inv, spec);
    r.delta_vin2 = input_voltage_variance(model, inv, spec);
    r.delta_gm2 = r.delta_iout2 / r.delta_vin2;
    return r;
}

SweepResult gm_sweep(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv,
                     const OscillatorSpec& spec, const std::vector<double>& g_m1_grid,
                     const std::vector<double>& g_m2_grid, const SweepOptions& options) {
    if (g_m1_grid.empty()) throw ValidationError("g_m1 grid", "must not be empty");
    if (g_m2_grid.empty()) throw ValidationError("g_m2 grid", "must not be empty");
    for (double g : g_m1_grid)
        if (!std::isfinite(g) || g < 0.0) throw ValidationError("g_m1 grid", "values must be >= 0");
    for (double g : g_m2_grid)
        if (!std::isfinite(g) || g < 0.0) throw ValidationError("g_m2 grid", "values must be >= 0");
    spec.validate();

    SweepResult out;
    out.g_m1 = g_m1_grid;
    out.g_m2 = g_m2_grid;
    out.surface.reserve(g_m1_grid.size() * g_m2_grid.size());

    double best = -1.0;
    for (std::size_t i = 0; i < g_m1_grid.size(); ++i) {
        for (std::size_t j = 0; j < g_m2_grid.size(); ++j) {
            SmallSignalModel point = model;
            point.g_m1 = g_m1_grid[i];
            point.g_m2 = g_m2_grid[j];
            const auto r = options.rederive_per_point
                               ? transconductance_fluctuation(point, circuit::inverse_capacitance(point), spec)
                               : transconductance_fluctuation(point, inv, spec);
            out.surface.push_back(r);
            // Strict comparison keeps the first maximum in row-major order.
            if (r.delta_gm2 > best) {
                best = r.delta_gm2;
                out.argmax_g_m1 = i;
                out.argmax_g_m2 = j;
            }
        }
    }
    return out;
}

}  // namespace qlna::quantum
