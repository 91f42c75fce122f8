#pragma once

#include "qlna/circuit_model.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace qlna::quantum {

using circuit::InverseCapacitanceMatrix;
using circuit::SmallSignalModel;

using Triple = std::array<double, 3>;

/// Thermal occupation and impedance of the three node oscillators.
struct OscillatorSpec {
    Triple photons{};     // mean thermal photon number, >= 0
    Triple impedances{};  // [Ohm], > 0

    void validate() const;
};

struct ThermalVariances {
    double flux = 0.0;
    double charge = 0.0;
};

/// Thermal-state variances of a single oscillator (hbar = 1). Means vanish.
ThermalVariances thermal_variances(double photons, double impedance);

/// Maps a model (and its inverse capacitance matrix) to oscillator impedances.
using ImpedanceRule = std::function<Triple(const SmallSignalModel&, const InverseCapacitanceMatrix&)>;

/// Default rule: Z_i = sqrt(L_i * Cinv_ii).
Triple derive_impedances(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv);

/// Alternate rule: Z_i = sqrt(L_i / C_i) with C_i the capacitance-matrix diagonal.
Triple derive_impedances_from_diagonal(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv);

double input_voltage_variance(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv,
                              const OscillatorSpec& spec);

double output_current_variance(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv,
                               const OscillatorSpec& spec);

struct FluctuationResult {
    double delta_iout2 = 0.0;  // [A^2]
    double delta_vin2 = 0.0;   // [V^2]
    double delta_gm2 = 0.0;    // [S^2], delta_iout2 / delta_vin2
};

FluctuationResult transconductance_fluctuation(const SmallSignalModel& model,
                                               const InverseCapacitanceMatrix& inv,
                                               const OscillatorSpec& spec);

struct SweepOptions {
    // Rebuild and invert the capacitance matrix at every grid point instead of
    // holding the caller's inverse fixed.
    bool rederive_per_point = false;
};

struct SweepResult {
    std::vector<double> g_m1;
    std::vector<double> g_m2;
    // Row-major: surface[i * g_m2.size() + j] is evaluated at (g_m1[i], g_m2[j]).
    std::vector<FluctuationResult> surface;
    std::size_t argmax_g_m1 = 0;
    std::size_t argmax_g_m2 = 0;

    const FluctuationResult& at(std::size_t i, std::size_t j) const { return surface[i * g_m2.size() + j]; }
};

SweepResult gm_sweep(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv,
                     const OscillatorSpec& spec, const std::vector<double>& g_m1_grid,
                     const std::vector<double>& g_m2_grid, const SweepOptions& options = {});

}  // namespace qlna::quantum
