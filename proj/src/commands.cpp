#include "qlna/commands.hpp"

#include "qlna/circuit_model.hpp"
#include "qlna/errors.hpp"
#include "qlna/matching_optimizer.hpp"
#include "qlna/nonlinearity.hpp"
#include "qlna/quantum_fluctuations.hpp"
#include "qlna/rf_network.hpp"
#include "qlna/snr_analysis.hpp"
#include "qlna/touchstone.hpp"
#include "qlna/units.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

namespace qlna::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json complex_json(rf::Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

using Row = std::vector<std::string>;

class Emitter {
public:
    Emitter(fs::path dir, bool csv, bool json_out, json config, std::uint64_t seed)
        : dir_(std::move(dir)), csv_(csv), json_(json_out), config_(std::move(config)), seed_(seed) {}

    void csv(const std::string& name, const Row& header, const std::vector<Row>& rows) {
        if (!csv_) return;
        std::string text = "# config: " + config_.dump() + "\n# seed: " + std::to_string(seed_) + "\n";
        text += join(header);
        for (const auto& r : rows) text += join(r);
        write(name, text);
    }

    void json_file(const std::string& name, json body) {
        if (!json_) return;
        body["config"] = config_;
        body["seed"] = seed_;
        write(name, body.dump(2) + "\n");
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    static std::string join(const Row& r) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) line += (i ? "," : "") + r[i];
        return line + "\n";
    }

    void write(const std::string& name, const std::string& text) {
        const auto path = dir_ / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + path.string());
        f << text;
        f.close();
        if (!f) throw IoError("write failed for " + path.string());
        written_.push_back(path.string());
    }

    fs::path dir_;
    bool csv_, json_;
    json config_;
    std::uint64_t seed_;
    std::vector<std::string> written_;
};

const circuit::SmallSignalModel& need_model(const RunConfig& c, const std::string& who) {
    if (!c.model) throw ValidationError("model", "required by " + who);
    return *c.model;
}

rf::NoiseFigureVariant variant_of(const RunConfig& c) { return rf::parse_variant(c.variant); }

std::optional<rf::TouchstoneData> touchstone_of(const RunConfig& c) {
    if (!c.touchstone) return std::nullopt;
    return rf::read_touchstone_file(*c.touchstone);
}

// Inline noise parameters take precedence over a Touchstone noise block.
std::vector<rf::NoiseRecord> noise_of(const RunConfig& c, const std::optional<rf::TouchstoneData>& ts) {
    std::vector<rf::NoiseRecord> out;
    for (const auto& row : c.noise_parameters) out.push_back(row.record());
    if (out.empty() && ts) out = ts->noise;
    for (const auto& r : out) r.params.validate();
    return out;
}

std::vector<rf::NoiseRecord> need_noise(const RunConfig& c, const std::optional<rf::TouchstoneData>& ts,
                                        const std::string& who) {
    auto out = noise_of(c, ts);
    if (out.empty())
        throw ValidationError("noise_parameters", "required by " + who + " (inline or in the Touchstone file)");
    return out;
}

quantum::Triple impedances_of(const RunConfig& c, const circuit::SmallSignalModel& m,
                              const circuit::InverseCapacitanceMatrix& inv) {
    if (c.oscillators.impedances) return *c.oscillators.impedances;
    if (c.oscillators.impedance_rule == "capacitance-diagonal")
        return quantum::derive_impedances_from_diagonal(m, inv);
    return quantum::derive_impedances(m, inv);
}

// ---------------------------------------------------------------------------

void quantum_sweep(const RunConfig& c, Emitter& emit) {
    const auto& model = need_model(c, "quantum-sweep");
    const auto inv = circuit::inverse_capacitance(model);
    quantum::OscillatorSpec spec{c.oscillators.photons, impedances_of(c, model, inv)};
    spec.validate();
    const auto g1 = c.sweep.g_m1.values();
    const auto g2 = c.sweep.g_m2.values();
    const auto sweep = quantum::gm_sweep(model, inv, spec, g1, g2, {c.sweep.rederive});

    std::vector<Row> rows;
    json surface = json::array();
    for (std::size_t i = 0; i < g1.size(); ++i)
        for (std::size_t j = 0; j < g2.size(); ++j) {
            const auto& p = sweep.at(i, j);
            rows.push_back({num(g1[i]), num(g2[j]), num(p.delta_iout2), num(p.delta_vin2), num(p.delta_gm2)});
            surface.push_back({{"g_m1", g1[i]}, {"g_m2", g2[j]}, {"delta_Iout2", p.delta_iout2},
                               {"delta_Vin2", p.delta_vin2}, {"delta_Gm2", p.delta_gm2}});
        }
    emit.csv("quantum_sweep.csv", {"g_m1", "g_m2", "delta_Iout2", "delta_Vin2", "delta_Gm2"}, rows);

    bool decreasing_in_g_m1 = true;
    for (std::size_t j = 0; j < g2.size(); ++j)
        for (std::size_t i = 1; i < g1.size(); ++i)
            if (!(sweep.at(i, j).delta_gm2 < sweep.at(i - 1, j).delta_gm2)) decreasing_in_g_m1 = false;

    json inv_rows = json::array();
    for (int i = 0; i < 3; ++i) inv_rows.push_back({inv(i, 0), inv(i, 1), inv(i, 2)});

    // Hamiltonian cross-check at the thermal rms state of each oscillator.
    circuit::CircuitState state;
    for (int k = 0; k < 3; ++k) {
        const auto v = quantum::thermal_variances(spec.photons[k], spec.impedances[k]);
        state.phi[k] = std::sqrt(v.flux);
        state.charge[k] = std::sqrt(v.charge);
    }
    const auto best = sweep.at(sweep.argmax_g_m1, sweep.argmax_g_m2);
    json body{
        {"impedances", spec.impedances},
        {"photons", spec.photons},
        {"inverse_capacitance", inv_rows},
        {"argmax",
         {{"i", sweep.argmax_g_m1},
          {"j", sweep.argmax_g_m2},
          {"g_m1", g1[sweep.argmax_g_m1]},
          {"g_m2", g2[sweep.argmax_g_m2]},
          {"delta_Gm2", best.delta_gm2},
          {"at_min_g_m1", sweep.argmax_g_m1 == 0},
          {"at_max_g_m2", sweep.argmax_g_m2 + 1 == g2.size()}}},
        {"decreasing_in_g_m1", decreasing_in_g_m1},
        {"surface", surface},
        {"hamiltonian_check",
         {{"state", {{"phi", {state.phi[0], state.phi[1], state.phi[2]}},
                     {"charge", {state.charge[0], state.charge[1], state.charge[2]}}}},
          {"terms", circuit::hamiltonian_discrepancy(model, inv, state)}}},
    };
    emit.json_file("quantum_sweep.json", body);
}

void nf_map(const RunConfig& c, Emitter& emit) {
    const auto ts = touchstone_of(c);
    const auto noise = need_noise(c, ts, "nf-map");
    const auto np = rf::interpolate_noise(noise, c.nf_map.frequency);
    const std::size_t n = c.nf_map.grid;

    struct Best {
        double nf = std::numeric_limits<double>::infinity();
        rf::Complex at{};
    } best_paper, best_textbook;
    std::vector<Row> rows;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double re = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
            const double im = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
            const rf::Complex g{re, im};
            if (std::abs(g) >= 1.0) continue;
            const double p = rf::nf_from_match(np, g, rf::NoiseFigureVariant::Paper);
            const double t = rf::nf_from_match(np, g, rf::NoiseFigureVariant::Textbook);
            if (p < best_paper.nf) best_paper = {p, g};
            if (t < best_textbook.nf) best_textbook = {t, g};
            rows.push_back({num(re), num(im), num(p), num(t)});
        }
    emit.csv("nf_map.csv", {"gamma_re", "gamma_im", "nf_paper_db", "nf_textbook_db"}, rows);

    const auto summary = [&](const Best& b, rf::NoiseFigureVariant v) {
        return json{{"grid_min_nf_db", b.nf},
                    {"grid_min_gamma", complex_json(b.at)},
                    {"nf_at_gamma_opt_db", rf::nf_from_match(np, np.gamma_opt, v)}};
    };
    emit.json_file("nf_map.json",
                   {{"frequency", c.nf_map.frequency},
                    {"noise_parameters",
                     {{"f_min_db", linear_power_to_db(np.f_min)},
                      {"r_n", np.r_n},
                      {"gamma_opt", complex_json(np.gamma_opt)}}},
                    {"grid", n},
                    {"points_in_disk", rows.size()},
                    {"paper", summary(best_paper, rf::NoiseFigureVariant::Paper)},
                    {"textbook", summary(best_textbook, rf::NoiseFigureVariant::Textbook)}});
}

void stability(const RunConfig& c, Emitter& emit) {
    const auto ts = touchstone_of(c);
    std::vector<rf::ModelSweepPoint> points;
    std::string source;
    if (ts) {
        source = "touchstone";
        for (const auto& r : ts->records) points.push_back({r.frequency, r, {}});
    } else {
        const auto& model = need_model(c, "stability (or give a touchstone path)");
        source = "model";
        const auto f = c.band.values();
        points = rf::sparams_of_model(model, f);
    }
    const auto noise = noise_of(c, ts);
    const auto variant = variant_of(c);

    std::vector<Row> rows;
    json list = json::array();
    std::size_t stable = 0, singular = 0;
    for (const auto& p : points) {
        if (!p.record) {
            ++singular;
            rows.push_back({num(p.frequency), "", "", "", "", "", "", ""});
            list.push_back({{"frequency", p.frequency}, {"error", p.error}});
            continue;
        }
        const auto s = rf::rollett_k(*p.record);
        stable += s.unconditionally_stable;
        const double s21_db = 20.0 * std::log10(std::abs(p.record->s21));
        std::string nf_cell, te_cell;
        json entry{{"frequency", p.frequency},
                   {"s21_db", s21_db},
                   {"k", s.unilateral ? json(nullptr) : json(s.k)},
                   {"unilateral", s.unilateral},
                   {"mu", s.mu},
                   {"delta_mag", std::abs(s.delta)},
                   {"unconditionally_stable", s.unconditionally_stable}};
        if (!noise.empty() && p.frequency >= noise.front().frequency && p.frequency <= noise.back().frequency) {
            const double nf = rf::nf_from_match(rf::interpolate_noise(noise, p.frequency), {}, variant);
            nf_cell = num(nf);
            te_cell = num(rf::noise_temperature(nf));
            entry["nf_db"] = nf;
            entry["t_e_k"] = rf::noise_temperature(nf);
        }
        rows.push_back({num(p.frequency), num(s21_db), num(s.k), num(s.mu), num(std::abs(s.delta)),
                        s.unconditionally_stable ? "1" : "0", nf_cell, te_cell});
        list.push_back(entry);
    }
    emit.csv("stability.csv", {"frequency_hz", "s21_db", "k", "mu", "delta_mag", "unconditionally_stable",
                               "nf_db", "t_e_k"},
             rows);
    emit.json_file("stability.json", {{"source", source},
                                      {"variant", c.variant},
                                      {"points", list},
                                      {"summary",
                                       {{"count", points.size()},
                                        {"unconditionally_stable", stable},
                                        {"singular", singular}}}});
}

void two_tone(const RunConfig& c, Emitter& emit) {
    auto amp = nonlinear::fit_from_specs(c.amplifier.gain_db, c.amplifier.iip3_dbm, c.amplifier.z0);
    amp.a5 = c.amplifier.a5;
    amp.validate();
    const auto pin = c.two_tone.input_dbm.values();
    const auto curve = nonlinear::compression_curve(amp, pin);

    std::vector<Row> rows;
    json table = json::array();
    // Least-squares slope of IM3 against input power.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < pin.size(); ++i) {
        const auto r = nonlinear::two_tone_response(amp, {c.two_tone.center, c.two_tone.detuning, pin[i]});
        rows.push_back({num(pin[i]), num(curve.points[i].gain_db), num(r.fundamental_dbm), num(r.im3_dbm),
                        num(r.im5_dbm), num(r.imd3_db), num(r.imd5_db)});
        table.push_back({{"pin_dbm", pin[i]},
                         {"gain_db", curve.points[i].gain_db},
                         {"p_fund_dbm", r.fundamental_dbm},
                         {"p_im3_dbm", r.im3_dbm},
                         {"p_im5_dbm", r.im5_dbm},
                         {"imd3_db", r.imd3_db},
                         {"imd5_db", r.imd5_db}});
        if (std::isfinite(r.im3_dbm)) {
            sx += pin[i];
            sy += r.im3_dbm;
            sxx += pin[i] * pin[i];
            sxy += pin[i] * r.im3_dbm;
            ++m;
        }
    }
    emit.csv("two_tone.csv", {"pin_dbm", "gain_db", "p_fund_dbm", "p_im3_dbm", "p_im5_dbm", "imd3_db", "imd5_db"},
             rows);

    json body{{"coefficients", {{"a1", amp.a1}, {"a3", amp.a3}, {"a5", amp.a5}, {"z0", amp.z0}}},
              {"small_signal_gain_db", curve.small_signal_gain_db},
              {"tones", {{"center", c.two_tone.center}, {"detuning", c.two_tone.detuning}}},
              {"rows", table}};
    const auto iip3 = nonlinear::iip3_dbm(amp);
    body["iip3_dbm"] = iip3 ? json(*iip3) : json(nullptr);
    body["p1db_input_dbm"] = curve.p1db_input_dbm ? json(*curve.p1db_input_dbm) : json(nullptr);
    const double den = static_cast<double>(m) * sxx - sx * sx;
    body["im3_slope"] = (m >= 2 && den != 0.0) ? json((static_cast<double>(m) * sxy - sx * sy) / den)
                                               : json(nullptr);
    emit.json_file("two_tone.json", body);
}

void snr_sim(const RunConfig& c, Emitter& emit) {
    const auto& a = c.analysis;
    auto amp = nonlinear::fit_from_specs(c.amplifier.gain_db, c.amplifier.iip3_dbm, c.amplifier.z0);
    amp.a5 = c.amplifier.a5;
    const snr::AmplifierSim sim{amp, c.amplifier.noise_temperature};
    sim.validate();

    const std::size_t samples = a.segment_length / 2 * (a.segments + 1);
    snr::SynthOptions synth;
    synth.step = a.step;
    synth.duration = static_cast<double>(samples) * a.step;
    synth.carrier = a.carrier;
    synth.z0 = c.amplifier.z0;
    synth.phase_seed = a.seed;
    const std::vector<double> powers(a.tone_offsets.size(), a.tone_power_dbm);
    const auto tones = snr::synth_tones(a.tone_offsets, powers, synth);
    const auto input = snr::add_thermal_noise(tones, a.input_temperature, a.seed + 1);
    const auto output = snr::amplify(input, sim, a.seed + 2);

    snr::NfSettings settings;
    settings.segment_length = a.segment_length;
    settings.tone_offsets = a.tone_offsets;
    settings.signal_half_width = a.signal_half_width;
    settings.guard_bins = a.guard_bins;
    const auto nf = snr::measure_nf(input, output, settings);

    const auto spectrum_rows = [](const snr::SpectrumEstimate& s) {
        std::vector<Row> rows;
        for (std::size_t i = 0; i < s.power.size(); ++i) rows.push_back({num(s.detuning[i]), num(s.power_dbm(i))});
        return rows;
    };
    const auto in_psd = snr::psd(input, a.segment_length);
    const auto out_psd = snr::psd(output, a.segment_length);
    emit.csv("snr_spectrum_input.csv", {"detuning_hz", "dbm"}, spectrum_rows(in_psd));
    emit.csv("snr_spectrum_output.csv", {"detuning_hz", "dbm"}, spectrum_rows(out_psd));
    if (a.export_signals) {
        const auto signal_rows = [](const snr::EnvelopeSignal& s) {
            std::vector<Row> rows;
            for (std::size_t i = 0; i < s.samples.size(); ++i)
                rows.push_back({num(static_cast<double>(i) * s.sample_period), num(s.samples[i].real()),
                                num(s.samples[i].imag())});
            return rows;
        };
        emit.csv("snr_signal_input.csv", {"t", "re", "im"}, signal_rows(input));
        emit.csv("snr_signal_output.csv", {"t", "re", "im"}, signal_rows(output));
    }

    json points = json::array();
    double mean_nf = 0.0;
    for (const auto& p : nf) {
        points.push_back({{"detuning", p.detuning},
                          {"snr_in_db", p.snr_in_db},
                          {"snr_out_db", p.snr_out_db},
                          {"nf_db", p.nf_db}});
        mean_nf += p.nf_db / static_cast<double>(nf.size());
    }
    emit.json_file("snr_summary.json",
                   {{"nf", points},
                    {"mean_nf_db", mean_nf},
                    {"expected_nf_db", rf::nf_of_temperature(c.amplifier.noise_temperature)},
                    {"settings",
                     {{"window", in_psd.window},
                      {"overlap", in_psd.overlap},
                      {"segment_length", in_psd.segment_length},
                      {"segment_count", in_psd.segment_count},
                      {"bin_width", in_psd.bin_width},
                      {"samples", samples},
                      {"signal_half_width", a.signal_half_width},
                      {"guard_bins", a.guard_bins},
                      {"seeds", {{"phase", a.seed}, {"input_noise", a.seed + 1}, {"amplifier_noise", a.seed + 2}}}}},
                    {"mean_power_w", {{"input", input.mean_power()}, {"output", output.mean_power()}}}});
}

void optimize(const RunConfig& c, Emitter& emit) {
    const auto ts = touchstone_of(c);
    const auto noise = need_noise(c, ts, "optimize");
    const auto& o = c.optimizer;
    const auto freqs = c.band.values();

    auto obj = matching::BandObjective::from_records(noise, freqs, variant_of(c));
    if (!o.weights.empty()) {
        if (o.weights.size() != freqs.size())
            throw ValidationError("optimizer.weights", "expected one weight per band frequency (" +
                                                           std::to_string(freqs.size()) + ")");
        obj.weights = o.weights;
    }
    obj.validate();

    matching::MatchSearchSpace space;
    space.kind = o.space == "l-network" ? matching::Parameterization::LNetwork
                                        : matching::Parameterization::DirectGamma;
    space.topology = o.topology == "series-first" ? matching::LTopology::SeriesFirst
                                                  : matching::LTopology::ShuntFirst;
    space.reference_frequency = o.reference_frequency;
    space.lower = o.lower;
    space.upper = o.upper;
    space.validate();

    optim::NelderMeadSettings nm;
    nm.max_iterations = o.max_iterations;
    nm.tolerance = o.tolerance;
    nm.initial_step = o.initial_step;
    nm.restarts = o.restarts;

    const auto result = matching::optimize_match(obj, space, o.start, nm);

    // Gain data: Touchstone S-parameters first, then the nodal model.
    std::optional<matching::GainModel> gain;
    std::string gain_source = "none";
    if (ts && !ts->records.empty()) {
        matching::GainModel g;
        for (double f : freqs) g.records.push_back(rf::interpolate_record(ts->records, f));
        gain = g;
        gain_source = "touchstone";
    } else if (c.model) {
        try {
            matching::GainModel g;
            for (double f : freqs) g.records.push_back(rf::sparams_at(*c.model, f));
            gain = g;
            gain_source = "model";
        } catch (const NumericalError& e) {
            gain_source = std::string("unavailable: ") + e.what();
        }
    }

    json per_freq = json::array();
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        json e{{"frequency", freqs[i]}, {"gamma_s", complex_json(result.gamma_s[i])}, {"nf_db", result.nf_db[i]}};
        if (gain) e["gain_db"] = linear_power_to_db(rf::transducer_gain(gain->records[i], result.gamma_s[i]));
        per_freq.push_back(e);
    }
    bool descent = result.objective <= result.start_objective;
    for (std::size_t i = 1; i < result.history.size(); ++i)
        if (result.history[i] > result.history[i - 1]) descent = false;

    json body{{"space", matching::to_string(space.kind)},
              {"topology", matching::to_string(space.topology)},
              {"variant", c.variant},
              {"best_params", result.params},
              {"objective", result.objective},
              {"start_objective", result.start_objective},
              {"iterations", result.iterations},
              {"evaluations", result.evaluations},
              {"converged", result.converged},
              {"descent_ok", descent},
              {"per_frequency", per_freq},
              {"iteration_log", result.history},
              {"gain_source", gain_source}};

    if (gain) {
        const auto points = matching::tradeoff_report(obj, space, *gain, o.tradeoff_weights, o.start, nm);
        std::vector<Row> rows;
        json curve = json::array();
        for (const auto& p : points) {
            rows.push_back({num(p.nf_weight), num(p.gain_weight), num(p.params[0]), num(p.params[1]),
                            num(p.mean_nf_db), num(p.mean_gain_db)});
            curve.push_back({{"nf_weight", p.nf_weight},
                             {"gain_weight", p.gain_weight},
                             {"params", p.params},
                             {"mean_nf_db", p.mean_nf_db},
                             {"mean_gain_db", p.mean_gain_db}});
        }
        emit.csv("optimize_tradeoff.csv", {"nf_weight", "gain_weight", "p0", "p1", "mean_nf_db", "mean_gain_db"},
                 rows);
        body["tradeoff"] = curve;
    }
    emit.json_file("optimize.json", body);
}

void convert(const RunConfig& c, Emitter& emit) {
    std::vector<Row> rows;
    json table = json::array();
    for (double nf : c.convert.nf_db) {
        const double t = rf::noise_temperature(nf);
        rows.push_back({"nf_to_t", num(nf), num(t)});
        table.push_back({{"direction", "nf_to_t"}, {"nf_db", nf}, {"t_e_k", t}});
    }
    for (double t : c.convert.temperatures) {
        const double nf = rf::nf_of_temperature(t);
        rows.push_back({"t_to_nf", num(nf), num(t)});
        table.push_back({{"direction", "t_to_nf"}, {"nf_db", nf}, {"t_e_k", t}});
    }
    emit.csv("convert.csv", {"direction", "nf_db", "t_e_k"}, rows);
    emit.json_file("convert.json", {{"reference_temperature", kReferenceTemperature}, {"table", table}});
}

using Command = std::function<void(const RunConfig&, Emitter&)>;

const std::vector<std::pair<std::string, Command>>& table() {
    static const std::vector<std::pair<std::string, Command>> t{
        {"quantum-sweep", quantum_sweep}, {"nf-map", nf_map}, {"stability", stability},
        {"two-tone", two_tone},           {"snr-sim", snr_sim}, {"optimize", optimize},
        {"convert", convert}};
    return t;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : table()) n.push_back(name);
        return n;
    }();
    return names;
}

int run(const CliOptions& options, std::ostream& out, std::ostream& err) {
    RunConfig config;
    const int rc = guarded(err, [&] {
        config = load_config(options.config_path);
        return int(kExitOk);
    });
    if (rc != kExitOk) return rc;
    return run(options, std::move(config), out, err);
}

int run(const CliOptions& options, RunConfig config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Command* command = nullptr;
        for (const auto& [name, fn] : table())
            if (name == options.subcommand) command = &fn;
        if (!command) throw ValidationError("subcommand", "unknown '" + options.subcommand + "'");

        if (options.seed) config.analysis.seed = *options.seed;
        if (options.variant) {
            if (*options.variant != "paper" && *options.variant != "textbook")
                throw ValidationError("--variant", "expected paper or textbook");
            config.variant = *options.variant;
        }
        bool csv = true, json_out = true;
        if (options.format) {
            if (*options.format == "csv") json_out = false;
            else if (*options.format == "json") csv = false;
            else throw ValidationError("--format", "expected csv or json");
        }

        std::error_code ec;
        fs::create_directories(options.out_dir, ec);
        if (ec || !fs::is_directory(options.out_dir))
            throw IoError("cannot create output directory " + options.out_dir);

        Emitter emit(options.out_dir, csv, json_out, to_json(config), config.analysis.seed);
        (*command)(config, emit);
        for (const auto& path : emit.written()) out << path << "\n";
        return int(kExitOk);
    });
}

}  // namespace qlna::cli
