#pragma once

#include "qlna/circuit_model.hpp"
#include "qlna/quantum_fluctuations.hpp"
#include "qlna/two_port.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qlna::cli {

/// Evenly spaced grid; `log` spaces points geometrically.
struct Grid {
    double start = 0.0;
    double stop = 0.0;
    std::size_t points = 1;
    bool log = false;

    std::vector<double> values() const;
};

struct OscillatorConfig {
    quantum::Triple photons{0.1, 0.56, 76.0};
    std::optional<quantum::Triple> impedances;  // derived from the model when empty
    std::string impedance_rule = "inverse-diagonal";
};

struct SweepConfig {
    Grid g_m1{1e-3, 100e-3, 12, false};
    Grid g_m2{1e-3, 100e-3, 12, false};
    bool rederive = false;
};

struct NoiseRow {
    double frequency = 0.0;
    double f_min_db = 0.0;
    double gamma_opt_mag = 0.0;
    double gamma_opt_angle_deg = 0.0;
    double r_n = 0.0;

    rf::NoiseRecord record() const;
};

struct AmplifierConfig {
    double gain_db = 22.0;
    double iip3_dbm = -15.0;
    double a5 = 0.0;
    double noise_temperature = 1.88;
    double z0 = 50.0;
};

struct TwoToneConfig {
    double center = 1.6e9;
    double detuning = 1e6;
    Grid input_dbm{-130.0, -60.0, 71, false};
};

struct AnalysisConfig {
    double carrier = 1.6e9;
    double step = 100e-9;
    std::size_t segment_length = 256;
    std::size_t segments = 4096;
    double input_temperature = 290.0;
    std::vector<double> tone_offsets{-2e6, 2e6};
    double tone_power_dbm = -60.0;
    std::size_t guard_bins = 16;
    std::size_t signal_half_width = 3;
    std::uint64_t seed = 1;
    bool export_signals = false;
};

struct NfMapConfig {
    std::size_t grid = 101;
    double frequency = 1.6e9;
};

struct OptimizerConfig {
    std::string space = "direct";  // direct | l-network
    std::string topology = "shunt-first";
    double reference_frequency = 1.6e9;
    std::vector<double> start{0.0, 0.0};
    std::vector<double> lower{-1.0, -1.0};
    std::vector<double> upper{1.0, 1.0};
    std::vector<double> weights;  // per band frequency; all ones when empty
    std::size_t max_iterations = 500;
    double tolerance = 1e-10;
    double initial_step = 0.1;
    std::size_t restarts = 3;
    std::vector<double> tradeoff_weights{1.0, 0.75, 0.5, 0.25, 0.0};
};

struct ConvertConfig {
    std::vector<double> nf_db{0.009, 0.012, 0.028, 0.008};
    std::vector<double> temperatures;
};

struct RunConfig {
    std::optional<circuit::SmallSignalModel> model;
    OscillatorConfig oscillators;
    SweepConfig sweep;
    Grid band{1.0e9, 3.0e9, 21, false};
    std::optional<std::string> touchstone;  // absolute path once loaded
    std::vector<NoiseRow> noise_parameters;
    AmplifierConfig amplifier;
    TwoToneConfig two_tone;
    AnalysisConfig analysis;
    NfMapConfig nf_map;
    OptimizerConfig optimizer;
    ConvertConfig convert;
    std::string variant = "paper";
};

/// Parses a quantity such as "2.6 pF" into SI. `base` is the SI unit symbol
/// ("F", "H", "S", "Hz", "s", "K", "V", "Ohm"); bare numbers are taken as SI.
double parse_quantity(const std::string& text, const std::string& base, const std::string& field);

/// Parses YAML (or JSON) text. Relative Touchstone paths resolve against base_dir.
/// Throws ValidationError naming the offending field.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Reads a file; IoError when unreadable.
RunConfig load_config(const std::string& path);

/// Canonical SI form; parse_config(to_json(c).dump()) reproduces c.
nlohmann::json to_json(const RunConfig& config);

}  // namespace qlna::cli
