#pragma once

#include "qlna/circuit_model.hpp"
#include "qlna/two_port.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlna::rf {

// ---------------------------------------------------------------------------
// Stability

struct Stability {
    double k = 0.0;        // Rollett factor; NaN when the device is unilateral
    bool unilateral = false;
    Complex delta{};       // S11 S22 - S12 S21
    double mu = 0.0;       // Edwards-Sinsky geometric factor
    bool unconditionally_stable = false;
};

/// |S12 S21| below this is treated as unilateral.
inline constexpr double kUnilateralThreshold = 1e-30;

/// K > 1 and |delta| < 1 classifies as unconditionally stable; unilateral
/// devices fall back to mu > 1.
Stability rollett_k(const TwoPortRecord& rec);

// ---------------------------------------------------------------------------
// Noise figure

enum class NoiseFigureVariant {
    Paper,     // denominator (1 - |Gs|^2)(1 + |Gopt|^2)
    Textbook,  // denominator (1 - |Gs|^2)|1 + Gopt|^2
};

std::string to_string(NoiseFigureVariant v);
NoiseFigureVariant parse_variant(const std::string& s);

/// Noise factor (linear) for source reflection gamma_s. Throws
/// ValidationError when |gamma_s| >= 1.
double noise_factor_from_match(const NoiseParameters& np, Complex gamma_s,
                               NoiseFigureVariant variant = NoiseFigureVariant::Paper);

/// Same, in dB.
double nf_from_match(const NoiseParameters& np, Complex gamma_s,
                     NoiseFigureVariant variant = NoiseFigureVariant::Paper);

/// T_e = 290 (10^(NF/10) - 1) [K]
double noise_temperature(double nf_db);
double nf_of_temperature(double t_e);

struct CascadeStage {
    double noise_factor = 1.0;  // linear
    double gain = 1.0;          // linear
};

/// Friis cascade; returns the total noise factor (linear).
double friis_cascade(std::span<const CascadeStage> stages);

/// Transducer power gain (linear) for the given source and load reflections.
double transducer_gain(const TwoPortRecord& rec, Complex gamma_s, Complex gamma_l = {});

// ---------------------------------------------------------------------------
// Nodal analysis of the small-signal model

struct NodalResponse {
    Complex voltage_gain;     // V_3 / V_in
    Complex transconductance; // I(L_d3) / V_in [S]
    Complex gamma_in;         // looking into C_in, output node unloaded
    Complex gamma_out;        // looking into node 3, input terminated in z0
};

/// Solves the three-node admittance system at angular frequency omega driven
/// by an ideal source at the C_in terminal. Throws NumericalError on a
/// singular system (lossless resonance).
NodalResponse nodal_transfer(const circuit::SmallSignalModel& model, double omega, double z0 = 50.0);

struct ModelSweepPoint {
    double frequency = 0.0;
    std::optional<TwoPortRecord> record;  // empty at singular frequencies
    std::string error;
};

/// S-parameters with port 1 at the C_in terminal and port 2 at the L_d3 node,
/// both referenced to z0. A singular point is reported and the rest still computed.
std::vector<ModelSweepPoint> sparams_of_model(const circuit::SmallSignalModel& model,
                                              std::span<const double> frequencies, double z0 = 50.0);

/// One-frequency variant; throws NumericalError at singular points.
TwoPortRecord sparams_at(const circuit::SmallSignalModel& model, double frequency, double z0 = 50.0);

}  // namespace qlna::rf
