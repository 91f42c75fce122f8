#include "qlna/snr_analysis.hpp"

#include "qlna/errors.hpp"
#include "qlna/units.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>

namespace qlna::snr {

namespace {

// One FFTW plan bound to its own aligned buffers.
class FftPlan {
public:
    explicit FftPlan(std::size_t n)
        : n_(n),
          in_(fftw_alloc_complex(n), &fftw_free),
          out_(fftw_alloc_complex(n), &fftw_free) {
        if (!in_ || !out_) throw std::bad_alloc();
        // ESTIMATE keeps the algorithm choice (and so the rounding) independent of timing.
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        if (!plan_) throw NumericalError("FFTW could not create a plan of length " + std::to_string(n));
    }
    ~FftPlan() { fftw_destroy_plan(plan_); }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    Complex* input() { return reinterpret_cast<Complex*>(in_.get()); }
    const Complex* output() const { return reinterpret_cast<const Complex*>(out_.get()); }
    void execute() { fftw_execute(plan_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> in_;
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> out_;
    fftw_plan plan_ = nullptr;
};

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Folds a detuning into [-fs/2, fs/2).
double wrap_detuning(double f, double fs) {
    double w = std::fmod(f + fs / 2.0, fs);
    if (w < 0.0) w += fs;
    return w - fs / 2.0;
}

}  // namespace

void EnvelopeSignal::validate() const {
    if (!std::isfinite(sample_period) || sample_period <= 0.0)
        throw ValidationError("sample_period", "must be > 0");
    if (!std::isfinite(z0) || z0 <= 0.0) throw ValidationError("Z0", "must be > 0");
    if (samples.empty()) throw ValidationError("samples", "signal must not be empty");
}

double EnvelopeSignal::mean_power() const {
    double acc = 0.0;
    for (const auto& x : samples) acc += std::norm(x);
    return acc / static_cast<double>(samples.size()) / (2.0 * z0);
}

EnvelopeSignal synth_tones(std::span<const double> offsets, std::span<const double> powers_dbm,
                           const SynthOptions& options) {
    if (offsets.size() != powers_dbm.size())
        throw ValidationError("tones", "offset and power lists must have the same length");
    if (!(options.step > 0.0)) throw ValidationError("step", "must be > 0");
    if (!(options.duration >= options.step)) throw ValidationError("duration", "must cover at least one step");
    const double nyquist = 0.5 / options.step;
    for (double f : offsets)
        if (!std::isfinite(f) || std::abs(f) >= nyquist)
            throw ValidationError("tone offset", "offset " + std::to_string(f) +
                                                     " Hz is not below the envelope Nyquist limit of " +
                                                     std::to_string(nyquist) + " Hz");

    EnvelopeSignal sig;
    sig.carrier = options.carrier;
    sig.sample_period = options.step;
    sig.z0 = options.z0;
    sig.seed = options.phase_seed.value_or(0);
    sig.description = std::to_string(offsets.size()) + "-tone";

    std::vector<double> phases(offsets.size(), 0.0);
    if (options.phase_seed) {
        std::mt19937_64 rng(*options.phase_seed);
        std::uniform_real_distribution<double> uniform(0.0, 2.0 * kPi);
        for (auto& p : phases) p = uniform(rng);
    }
    std::vector<double> amplitudes;
    for (double p : powers_dbm) amplitudes.push_back(dbm_to_amplitude(p, options.z0));

    const auto n = static_cast<std::size_t>(std::llround(options.duration / options.step));
    sig.samples.assign(n, Complex{});
    for (std::size_t k = 0; k < offsets.size(); ++k) {
        const double w = 2.0 * kPi * offsets[k] * options.step;
        for (std::size_t i = 0; i < n; ++i)
            sig.samples[i] += std::polar(amplitudes[k], w * static_cast<double>(i) + phases[k]);
    }
    return sig;
}

EnvelopeSignal add_thermal_noise(const EnvelopeSignal& sig, double temperature, std::uint64_t seed) {
    sig.validate();
    if (!std::isfinite(temperature) || temperature < 0.0)
        throw ValidationError("temperature", "must be finite and >= 0 K");
    EnvelopeSignal out = sig;
    if (temperature == 0.0) return out;
    // k_B T over bandwidth 1/step, split across I and Q: E|n|^2 = 2 z0 k_B T B.
    const double sigma = std::sqrt(sig.z0 * kBoltzmann * temperature / sig.sample_period);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (auto& x : out.samples) {
        const double re = normal(rng);
        const double im = normal(rng);
        x += Complex(re, im);
    }
    out.seed = seed;
    return out;
}

void AmplifierSim::validate() const {
    amp.validate();
    if (!std::isfinite(noise_temperature) || noise_temperature < 0.0)
        throw ValidationError("noise_temperature", "must be finite and >= 0 K");
}

EnvelopeSignal amplify(const EnvelopeSignal& sig, const AmplifierSim& sim, std::uint64_t seed) {
    sim.validate();
    EnvelopeSignal out = add_thermal_noise(sig, sim.noise_temperature, seed);
    const double c3 = 0.75 * sim.amp.a3;
    const double c5 = 0.625 * sim.amp.a5;
    for (auto& x : out.samples) {
        const double m2 = std::norm(x);
        x *= sim.amp.a1 + m2 * (c3 + c5 * m2);
    }
    out.description = sig.description + " amplified";
    return out;
}

double SpectrumEstimate::power_dbm(std::size_t bin) const { return watts_to_dbm(power.at(bin)); }

double SpectrumEstimate::total_power() const {
    double acc = 0.0;
    for (double p : power) acc += p;
    return acc;
}

std::size_t SpectrumEstimate::bin_of(double detuning_hz) const {
    const auto n = static_cast<long long>(segment_length);
    long long idx = std::llround(detuning_hz / bin_width) + n / 2;
    idx %= n;
    if (idx < 0) idx += n;
    return static_cast<std::size_t>(idx);
}

double SpectrumEstimate::band_power(std::size_t bin, std::size_t half_width) const {
    const auto n = static_cast<long long>(segment_length);
    double acc = 0.0;
    for (long long d = -static_cast<long long>(half_width); d <= static_cast<long long>(half_width); ++d) {
        long long idx = (static_cast<long long>(bin) + d) % n;
        if (idx < 0) idx += n;
        acc += power[static_cast<std::size_t>(idx)];
    }
    return acc;
}

SpectrumEstimate psd(const EnvelopeSignal& sig, std::size_t segment_length) {
    sig.validate();
    if (!is_power_of_two(segment_length))
        throw ValidationError("segment_length", "must be a power of two");
    if (segment_length > sig.samples.size())
        throw ValidationError("segment_length", "record shorter than one segment");

    const std::size_t n = segment_length;
    const std::size_t hop = n / 2;
    std::vector<double> window(n);
    double window_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Periodic Hann: a tone on a bin center lands in exactly three bins.
        window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
        window_power += window[i] * window[i];
    }

    FftPlan fft(n);
    std::vector<double> acc(n, 0.0);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + n <= sig.samples.size(); start += hop, ++segments) {
        Complex* in = fft.input();
        for (std::size_t i = 0; i < n; ++i) in[i] = sig.samples[start + i] * window[i];
        fft.execute();
        const Complex* out = fft.output();
        for (std::size_t k = 0; k < n; ++k) acc[k] += std::norm(out[k]);
    }

    SpectrumEstimate est;
    est.segment_length = n;
    est.segment_count = segments;
    est.bin_width = sig.sample_rate() / static_cast<double>(n);
    est.detuning.resize(n);
    est.power.resize(n);
    const double scale = 1.0 / (static_cast<double>(segments) * static_cast<double>(n) * window_power * 2.0 * sig.z0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = (i + n / 2) % n;  // shift DC to the middle
        est.detuning[i] = (static_cast<double>(i) - static_cast<double>(n / 2)) * est.bin_width;
        est.power[i] = acc[k] * scale;
    }
    return est;
}

double snr_db(const SpectrumEstimate& spectrum, std::span<const std::size_t> signal_bins,
              std::span<const std::size_t> floor_bins) {
    if (signal_bins.empty()) throw ValidationError("signal bins", "must not be empty");
    if (floor_bins.empty()) throw ValidationError("floor bins", "must not be empty");
    const std::set<std::size_t> sig(signal_bins.begin(), signal_bins.end());
    for (std::size_t b : floor_bins)
        if (sig.count(b)) throw ValidationError("floor bins", "overlap with signal bins at bin " + std::to_string(b));

    double floor = 0.0;
    for (std::size_t b : floor_bins) floor += spectrum.power.at(b);
    floor /= static_cast<double>(floor_bins.size());

    double total = 0.0;
    for (std::size_t b : sig) total += spectrum.power.at(b);
    const double noise = floor * static_cast<double>(sig.size());
    const double signal = total - noise;
    if (!(signal > 0.0)) throw NumericalError("no signal power above the noise floor");
    if (noise == 0.0) return kSnrCeilingDb;
    return std::min(kSnrCeilingDb, 10.0 * std::log10(signal / noise));
}

std::vector<std::size_t> signal_bins_for(const SpectrumEstimate& spectrum, double detuning,
                                         std::size_t half_width) {
    const auto n = static_cast<long long>(spectrum.segment_length);
    const auto center = static_cast<long long>(spectrum.bin_of(detuning));
    std::set<std::size_t> bins;
    for (long long d = -static_cast<long long>(half_width); d <= static_cast<long long>(half_width); ++d)
        bins.insert(static_cast<std::size_t>(((center + d) % n + n) % n));
    return {bins.begin(), bins.end()};
}

std::vector<std::size_t> floor_bins_for(const SpectrumEstimate& spectrum, const NfSettings& settings) {
    const double fs = spectrum.bin_width * static_cast<double>(spectrum.segment_length);
    std::vector<double> occupied(settings.tone_offsets);
    for (double fa : settings.tone_offsets)
        for (double fb : settings.tone_offsets)
            if (fa != fb) {
                occupied.push_back(wrap_detuning(2.0 * fa - fb, fs));
                occupied.push_back(wrap_detuning(3.0 * fa - 2.0 * fb, fs));
            }
    std::set<std::size_t> excluded;
    for (double f : occupied)
        for (std::size_t b : signal_bins_for(spectrum, f, std::max(settings.guard_bins, settings.signal_half_width)))
            excluded.insert(b);
    std::vector<std::size_t> floor;
    for (std::size_t b = 0; b < spectrum.segment_length; ++b)
        if (!excluded.count(b)) floor.push_back(b);
    if (floor.empty()) throw ValidationError("guard_bins", "guard regions leave no noise-floor bins");
    return floor;
}

std::vector<NfPoint> measure_nf(const EnvelopeSignal& input, const EnvelopeSignal& output,
                                const NfSettings& settings) {
    input.validate();
    output.validate();
    if (input.sample_period != output.sample_period || input.samples.size() != output.samples.size())
        throw ValidationError("signals", "input and output records must share one time base");
    if (settings.tone_offsets.empty()) throw ValidationError("tone_offsets", "need at least one tone");

    const SpectrumEstimate in_spec = psd(input, settings.segment_length);
    const SpectrumEstimate out_spec = psd(output, settings.segment_length);
    const auto floor = floor_bins_for(in_spec, settings);

    std::vector<NfPoint> result;
    for (double f : settings.tone_offsets) {
        const auto bins = signal_bins_for(in_spec, f, settings.signal_half_width);
        NfPoint p;
        p.detuning = f;
        try {
            p.snr_in_db = snr_db(in_spec, bins, floor);
        } catch (const NumericalError&) {
            throw NumericalError("zero input SNR at detuning " + std::to_string(f) + " Hz");
        }
        p.snr_out_db = snr_db(out_spec, bins, floor);
        p.nf_db = p.snr_in_db - p.snr_out_db;
        result.push_back(p);
    }
    return result;
}

}  // namespace qlna::snr
