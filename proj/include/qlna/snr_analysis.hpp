#pragma once

#include "qlna/nonlinearity.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlna::snr {

using Complex = std::complex<double>;

/// Complex envelope of a narrowband passband signal around `carrier`.
/// Sample x corresponds to the passband voltage Re{x e^{j w_c t}}, so the
/// average power is mean |x|^2 / (2 z0).
struct EnvelopeSignal {
    double carrier = 1.6e9;        // [Hz]
    double sample_period = 100e-9; // [s]
    double z0 = 50.0;              // [Ohm]
    std::vector<Complex> samples;
    std::uint64_t seed = 0;
    std::string description;

    void validate() const;
    double sample_rate() const { return 1.0 / sample_period; }
    /// Mean power [W].
    double mean_power() const;
};

struct SynthOptions {
    double duration = 1e-3;        // [s]
    double step = 100e-9;          // [s]
    double carrier = 1.6e9;        // [Hz]
    double z0 = 50.0;              // [Ohm]
    std::optional<std::uint64_t> phase_seed;  // zero phases when empty
};

/// Sum of complex exponentials at the given detunings [Hz] with per-tone powers [dBm].
/// Throws ValidationError when an offset is at or beyond the envelope Nyquist limit.
EnvelopeSignal synth_tones(std::span<const double> offsets, std::span<const double> powers_dbm,
                           const SynthOptions& options = {});

/// Adds circular white Gaussian noise of density k_B T over the envelope
/// bandwidth 1/step. T = 0 returns the input unchanged.
EnvelopeSignal add_thermal_noise(const EnvelopeSignal& sig, double temperature, std::uint64_t seed);

struct AmplifierSim {
    nonlinear::PolynomialAmp amp;
    double noise_temperature = 0.0;  // input-referred [K]

    void validate() const;
};

/// Adds input-referred noise at T_e, then applies the envelope-domain odd-order
/// polynomial a1 x + 3/4 a3 |x|^2 x + 5/8 a5 |x|^4 x.
EnvelopeSignal amplify(const EnvelopeSignal& sig, const AmplifierSim& amp, std::uint64_t seed);

struct SpectrumEstimate {
    std::vector<double> detuning;  // bin centers [Hz], ascending from -fs/2
    std::vector<double> power;     // [W] per bin; bins sum to the mean power
    std::string window = "hann";
    double overlap = 0.5;
    std::size_t segment_length = 0;
    std::size_t segment_count = 0;
    double bin_width = 0.0;        // [Hz]

    double power_dbm(std::size_t bin) const;
    double total_power() const;
    std::size_t bin_of(double detuning_hz) const;
    /// Summed power over bin-half_width..bin+half_width (wrapped), i.e. a
    /// tone's windowed mainlobe.
    double band_power(std::size_t bin, std::size_t half_width) const;
};

/// Welch-averaged Hann periodogram with 50% overlap. segment_length must be a
/// power of two no longer than the record.
SpectrumEstimate psd(const EnvelopeSignal& sig, std::size_t segment_length);

/// Reported in place of +inf when the noise floor is exactly zero.
inline constexpr double kSnrCeilingDb = 300.0;

/// Signal power is the sum over signal_bins less the mean floor; noise is the
/// mean floor per bin times the number of signal bins. Throws on empty or
/// overlapping bin sets, and on non-positive signal power.
double snr_db(const SpectrumEstimate& spectrum, std::span<const std::size_t> signal_bins,
              std::span<const std::size_t> floor_bins);

struct NfSettings {
    std::size_t segment_length = 256;
    std::vector<double> tone_offsets;     // detunings where NF is read [Hz]
    std::size_t signal_half_width = 3;    // bins either side of the tone bin
    std::size_t guard_bins = 16;          // excluded from the floor around tones and their IM products
};

struct NfPoint {
    double detuning = 0.0;
    double snr_in_db = 0.0;
    double snr_out_db = 0.0;
    double nf_db = 0.0;
};

/// Floor bins used by measure_nf: everything outside the guard region around
/// each tone and its third/fifth-order products.
std::vector<std::size_t> floor_bins_for(const SpectrumEstimate& spectrum, const NfSettings& settings);
std::vector<std::size_t> signal_bins_for(const SpectrumEstimate& spectrum, double detuning,
                                         std::size_t half_width);

/// NF = SNR_in - SNR_out [dB] at each tone detuning.
std::vector<NfPoint> measure_nf(const EnvelopeSignal& input, const EnvelopeSignal& output,
                                const NfSettings& settings);

}  // namespace qlna::snr
