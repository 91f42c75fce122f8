#pragma once

#include "qlna/nelder_mead.hpp"
#include "qlna/rf_network.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlna::matching {

using rf::Complex;

enum class Parameterization {
    DirectGamma,  // (Re Gamma_s, Im Gamma_s)
    LNetwork,     // lossless two-element network in front of a z0 source
};

enum class LTopology {
    ShuntFirst,   // shunt element across the source, then the series element
    SeriesFirst,  // series element at the source, then the shunt element
};

/// Where the optimizer searches. For the L-network the parameters are the
/// normalized series reactance x = X/z0 and shunt susceptance b = B z0 at
/// reference_frequency. Positive values are realized as an inductor (series)
/// or capacitor (shunt) and scale up with frequency; negative values as the
/// dual element and scale down.
struct MatchSearchSpace {
    Parameterization kind = Parameterization::DirectGamma;
    LTopology topology = LTopology::ShuntFirst;
    double reference_frequency = 1.6e9;
    double z0 = 50.0;
    std::vector<double> lower{-1.0, -1.0};
    std::vector<double> upper{1.0, 1.0};

    void validate() const;
    /// Source reflection seen by the device at `frequency`.
    Complex gamma_s(std::span<const double> params, double frequency) const;
    bool within_bounds(std::span<const double> params) const;
};

struct BandObjective {
    std::vector<double> frequencies;
    std::vector<rf::NoiseParameters> noise;  // one per frequency
    std::vector<double> weights;             // >= 0, sum > 0
    rf::NoiseFigureVariant variant = rf::NoiseFigureVariant::Paper;

    void validate() const;
    static BandObjective from_records(const std::vector<rf::NoiseRecord>& records,
                                      std::span<const double> frequencies,
                                      rf::NoiseFigureVariant variant);
};

/// Objective value assigned to infeasible parameters (|Gamma_s| >= 1 or out of bounds).
inline constexpr double kBarrier = 1e6;

/// Weighted mean NF [dB] across the band; kBarrier plus the excursion when infeasible.
double band_nf(const BandObjective& obj, const MatchSearchSpace& space, std::span<const double> params);

struct MatchResult {
    std::vector<double> params;
    std::vector<Complex> gamma_s;   // per frequency
    std::vector<double> nf_db;      // per frequency
    double objective = 0.0;
    double start_objective = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    std::vector<double> history;    // incumbent objective per iteration
};

/// Throws NumericalError when the start point is infeasible.
MatchResult optimize_match(const BandObjective& obj, const MatchSearchSpace& space,
                           std::vector<double> start, const optim::NelderMeadSettings& settings = {});

/// Per-frequency two-port data used to score gain (transducer gain into a z0 load).
struct GainModel {
    std::vector<rf::TwoPortRecord> records;  // aligned with BandObjective::frequencies
};

double band_gain_db(const GainModel& gain, const MatchSearchSpace& space, std::span<const double> params);

struct TradeoffPoint {
    double nf_weight = 0.0;
    double gain_weight = 0.0;
    std::vector<double> params;
    double mean_nf_db = 0.0;
    double mean_gain_db = 0.0;
    MatchResult run;
};

/// Minimizes nf_weight * NF - (1 - nf_weight) * gain for each weight in
/// nf_weights (each in [0, 1]).
std::vector<TradeoffPoint> tradeoff_report(const BandObjective& obj, const MatchSearchSpace& space,
                                           const GainModel& gain, std::span<const double> nf_weights,
                                           const std::vector<double>& start,
                                           const optim::NelderMeadSettings& settings = {});

std::string to_string(Parameterization p);
std::string to_string(LTopology t);

}  // namespace qlna::matching
