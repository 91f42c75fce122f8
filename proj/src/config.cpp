#include "qlna/config.hpp"

#include "qlna/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qlna::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double prefix_scale(const std::string& prefix) {
    static const std::map<std::string, double> table{
        {"", 1.0},    {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"µ", 1e-6},
        {"m", 1e-3},  {"k", 1e3},   {"M", 1e6},   {"G", 1e9},  {"T", 1e12}};
    const auto it = table.find(prefix);
    return it == table.end() ? std::nan("") : it->second;
}

// A mapping node plus its dotted path, for field-level messages.
class Block {
public:
    Block(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ValidationError(path_.empty() ? "config" : path_, "expected a mapping");
    }

    bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    Block child(const std::string& key) const { return Block(node_[key], field(key)); }
    YAML::Node raw(const std::string& key) const { return node_[key]; }

    void allow(std::initializer_list<const char*> keys) const {
        if (!node_ || !node_.IsMap()) return;
        std::set<std::string> known(keys.begin(), keys.end());
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!known.count(key)) throw ValidationError(field(key), "unknown key");
        }
    }

    std::string scalar(const std::string& key) const {
        const auto n = node_[key];
        if (!n.IsScalar()) throw ValidationError(field(key), "expected a scalar");
        return n.as<std::string>();
    }

    double quantity(const std::string& key, const std::string& base) const {
        return parse_quantity(scalar(key), base, field(key));
    }
    void read(const std::string& key, const std::string& base, double& out) const {
        if (has(key)) out = quantity(key, base);
    }
    void read_count(const std::string& key, std::size_t& out) const {
        if (!has(key)) return;
        const double v = quantity(key, "");
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e12)
            throw ValidationError(field(key), "expected a non-negative integer");
        out = static_cast<std::size_t>(v);
    }
    void read_bool(const std::string& key, bool& out) const {
        if (!has(key)) return;
        const auto s = scalar(key);
        if (s == "true") out = true;
        else if (s == "false") out = false;
        else throw ValidationError(field(key), "expected true or false");
    }
    void read_string(const std::string& key, std::string& out) const {
        if (has(key)) out = scalar(key);
    }
    std::vector<double> list(const std::string& key, const std::string& base) const {
        const auto n = node_[key];
        if (!n.IsSequence()) throw ValidationError(field(key), "expected a list");
        std::vector<double> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            const auto name = field(key) + "[" + std::to_string(i) + "]";
            if (!n[i].IsScalar()) throw ValidationError(name, "expected a scalar");
            out.push_back(parse_quantity(n[i].as<std::string>(), base, name));
        }
        return out;
    }
    void read_list(const std::string& key, const std::string& base, std::vector<double>& out) const {
        if (has(key)) out = list(key, base);
    }

private:
    YAML::Node node_;
    std::string path_;
};

Grid read_grid(const Block& b, const std::string& base, Grid g) {
    b.allow({"start", "stop", "points", "log"});
    b.read("start", base, g.start);
    b.read("stop", base, g.stop);
    b.read_count("points", g.points);
    b.read_bool("log", g.log);
    if (g.points == 0) throw ValidationError(b.field("points"), "must be at least 1");
    if (g.stop < g.start) throw ValidationError(b.field("stop"), "must not be below start");
    if (g.log && !(g.start > 0.0)) throw ValidationError(b.field("start"), "log grid needs start > 0");
    return g;
}

quantum::Triple read_triple(const Block& b, const std::string& key) {
    const auto v = b.list(key, "");
    if (v.size() != 3) throw ValidationError(b.field(key), "expected three values");
    return {v[0], v[1], v[2]};
}

circuit::SmallSignalModel read_model(const Block& b) {
    b.allow({"C_in", "C_gs1", "C_gd1", "C_gs2", "C_gd2", "C_ds3", "L_g1", "L_d2", "L_d3", "g_m1",
             "g_m2", "V_rf", "i_n2"});
    circuit::SmallSignalModel m;
    const auto required = [&](const char* key, const char* base) {
        if (!b.has(key)) throw ValidationError(b.field(key), "required");
        return b.quantity(key, base);
    };
    m.c_in = required("C_in", "F");
    m.c_gs1 = required("C_gs1", "F");
    m.c_gd1 = required("C_gd1", "F");
    m.c_gs2 = required("C_gs2", "F");
    m.c_gd2 = required("C_gd2", "F");
    m.c_ds3 = required("C_ds3", "F");
    m.l_g1 = required("L_g1", "H");
    m.l_d2 = required("L_d2", "H");
    m.l_d3 = required("L_d3", "H");
    b.read("g_m1", "S", m.g_m1);
    b.read("g_m2", "S", m.g_m2);
    b.read("V_rf", "V", m.v_rf);
    b.read("i_n2", "", m.i_n2);
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(b.field(e.field()), std::string(e.what()).substr(e.field().size() + 2));
    }
    return m;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ValidationError(field, what);
}

}  // namespace

std::vector<double> Grid::values() const {
    std::vector<double> v(points);
    if (points == 1) {
        v[0] = start;
        return v;
    }
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        v[i] = log ? start * std::pow(stop / start, t) : start + (stop - start) * t;
    }
    v.back() = stop;
    return v;
}

rf::NoiseRecord NoiseRow::record() const {
    rf::NoiseRecord r;
    r.frequency = frequency;
    r.params.f_min = std::pow(10.0, f_min_db / 10.0);
    r.params.r_n = r_n;
    r.params.gamma_opt = std::polar(gamma_opt_mag, gamma_opt_angle_deg * 3.14159265358979323846 / 180.0);
    return r;
}

double parse_quantity(const std::string& text, const std::string& base, const std::string& field) {
    const auto s = trim(text);
    const char* begin = s.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) throw ValidationError(field, "expected a number, got '" + text + "'");
    if (!std::isfinite(value)) throw ValidationError(field, "must be finite");
    const auto unit = trim(std::string(end));
    if (unit.empty()) return value;
    if (base.empty()) throw ValidationError(field, "is dimensionless, unexpected unit '" + unit + "'");
    if (base == "dB" || base == "dBm" || base == "deg") {
        if (unit != base) throw ValidationError(field, "expected unit " + base + ", got '" + unit + "'");
        return value;
    }
    std::string stem = base;
    std::string prefix;
    if (base == "Ohm") {
        for (const std::string alt : {"Ohm", "ohm", "Ω"}) {
            if (unit.size() >= alt.size() && unit.compare(unit.size() - alt.size(), alt.size(), alt) == 0) {
                stem = alt;
                break;
            }
        }
    }
    if (unit.size() < stem.size() || unit.compare(unit.size() - stem.size(), stem.size(), stem) != 0)
        throw ValidationError(field, "expected a unit of " + base + ", got '" + unit + "'");
    prefix = unit.substr(0, unit.size() - stem.size());
    const double scale = prefix_scale(prefix);
    if (std::isnan(scale)) throw ValidationError(field, "unknown unit prefix in '" + unit + "'");
    return value * scale;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ValidationError("config", std::string("malformed: ") + e.what());
    }
    const Block top(root, "");
    top.allow({"model", "oscillators", "sweep", "band", "touchstone", "noise_parameters", "amplifier",
               "two_tone", "analysis", "nf_map", "optimizer", "convert", "variant"});

    RunConfig c;
    try {
        if (top.has("model")) c.model = read_model(top.child("model"));

        if (top.has("oscillators")) {
            const auto b = top.child("oscillators");
            b.allow({"photons", "impedances", "impedance_rule"});
            if (b.has("photons")) c.oscillators.photons = read_triple(b, "photons");
            if (b.has("impedances")) c.oscillators.impedances = read_triple(b, "impedances");
            b.read_string("impedance_rule", c.oscillators.impedance_rule);
            require(c.oscillators.impedance_rule == "inverse-diagonal" ||
                        c.oscillators.impedance_rule == "capacitance-diagonal",
                    b.field("impedance_rule"), "expected inverse-diagonal or capacitance-diagonal");
            for (std::size_t i = 0; i < 3; ++i) {
                require(c.oscillators.photons[i] >= 0.0, b.field("photons"), "must be >= 0");
                if (c.oscillators.impedances)
                    require((*c.oscillators.impedances)[i] > 0.0, b.field("impedances"), "must be > 0");
            }
        }

        if (top.has("sweep")) {
            const auto b = top.child("sweep");
            b.allow({"g_m1", "g_m2", "rederive"});
            if (b.has("g_m1")) c.sweep.g_m1 = read_grid(b.child("g_m1"), "S", c.sweep.g_m1);
            if (b.has("g_m2")) c.sweep.g_m2 = read_grid(b.child("g_m2"), "S", c.sweep.g_m2);
            b.read_bool("rederive", c.sweep.rederive);
            require(c.sweep.g_m1.start >= 0.0, b.field("g_m1.start"), "must be >= 0");
            require(c.sweep.g_m2.start >= 0.0, b.field("g_m2.start"), "must be >= 0");
        }

        if (top.has("band")) {
            c.band = read_grid(top.child("band"), "Hz", c.band);
            require(c.band.start > 0.0, "band.start", "must be > 0");
        }

        if (top.has("touchstone")) {
            namespace fs = std::filesystem;
            fs::path p(top.scalar("touchstone"));
            if (p.is_relative()) p = fs::path(base_dir) / p;
            c.touchstone = fs::absolute(p).lexically_normal().string();
        }

        if (top.has("noise_parameters")) {
            const auto n = top.raw("noise_parameters");
            require(n.IsSequence(), "noise_parameters", "expected a list");
            for (std::size_t i = 0; i < n.size(); ++i) {
                const Block b(n[i], "noise_parameters[" + std::to_string(i) + "]");
                b.allow({"frequency", "f_min", "gamma_opt_mag", "gamma_opt_angle", "r_n"});
                NoiseRow row;
                for (const char* key : {"frequency", "f_min", "gamma_opt_mag", "gamma_opt_angle", "r_n"})
                    require(b.has(key), b.field(key), "required");
                row.frequency = b.quantity("frequency", "Hz");
                row.f_min_db = b.quantity("f_min", "dB");
                row.gamma_opt_mag = b.quantity("gamma_opt_mag", "");
                row.gamma_opt_angle_deg = b.quantity("gamma_opt_angle", "deg");
                row.r_n = b.quantity("r_n", "");
                require(row.frequency > 0.0, b.field("frequency"), "must be > 0");
                require(row.f_min_db >= 0.0, b.field("f_min"), "must be >= 0 dB");
                require(row.gamma_opt_mag >= 0.0 && row.gamma_opt_mag < 1.0, b.field("gamma_opt_mag"),
                        "must be in [0, 1)");
                require(row.r_n >= 0.0, b.field("r_n"), "must be >= 0");
                if (!c.noise_parameters.empty())
                    require(row.frequency > c.noise_parameters.back().frequency, b.field("frequency"),
                            "must increase strictly");
                c.noise_parameters.push_back(row);
            }
        }

        if (top.has("amplifier")) {
            const auto b = top.child("amplifier");
            b.allow({"gain", "iip3", "a5", "noise_temperature", "z0"});
            b.read("gain", "dB", c.amplifier.gain_db);
            b.read("iip3", "dBm", c.amplifier.iip3_dbm);
            b.read("a5", "", c.amplifier.a5);
            b.read("noise_temperature", "K", c.amplifier.noise_temperature);
            b.read("z0", "Ohm", c.amplifier.z0);
            require(c.amplifier.noise_temperature >= 0.0, b.field("noise_temperature"), "must be >= 0");
            require(c.amplifier.z0 > 0.0, b.field("z0"), "must be > 0");
        }

        if (top.has("two_tone")) {
            const auto b = top.child("two_tone");
            b.allow({"center", "detuning", "input_power"});
            b.read("center", "Hz", c.two_tone.center);
            b.read("detuning", "Hz", c.two_tone.detuning);
            if (b.has("input_power"))
                c.two_tone.input_dbm = read_grid(b.child("input_power"), "dBm", c.two_tone.input_dbm);
            require(c.two_tone.center > 0.0, b.field("center"), "must be > 0");
            require(c.two_tone.detuning > 0.0 && c.two_tone.detuning < c.two_tone.center,
                    b.field("detuning"), "must be in (0, center)");
        }

        if (top.has("analysis")) {
            const auto b = top.child("analysis");
            b.allow({"carrier", "step", "segment_length", "segments", "input_temperature", "tone_offsets",
                     "tone_power", "guard_bins", "signal_half_width", "seed", "export_signals"});
            auto& a = c.analysis;
            b.read("carrier", "Hz", a.carrier);
            b.read("step", "s", a.step);
            b.read_count("segment_length", a.segment_length);
            b.read_count("segments", a.segments);
            b.read("input_temperature", "K", a.input_temperature);
            b.read_list("tone_offsets", "Hz", a.tone_offsets);
            b.read("tone_power", "dBm", a.tone_power_dbm);
            b.read_count("guard_bins", a.guard_bins);
            b.read_count("signal_half_width", a.signal_half_width);
            if (b.has("seed")) {
                const auto text = trim(b.scalar("seed"));
                char* end = nullptr;
                errno = 0;
                const auto v = std::strtoull(text.c_str(), &end, 10);
                require(!text.empty() && text[0] != '-' && *end == '\0' && errno == 0, b.field("seed"),
                        "expected an unsigned 64-bit integer");
                a.seed = v;
            }
            b.read_bool("export_signals", a.export_signals);
            require(a.step > 0.0, b.field("step"), "must be > 0");
            require(a.segment_length >= 8 && (a.segment_length & (a.segment_length - 1)) == 0,
                    b.field("segment_length"), "must be a power of two >= 8");
            require(a.segments >= 1, b.field("segments"), "must be >= 1");
            require(a.input_temperature > 0.0, b.field("input_temperature"), "must be > 0");
            require(!a.tone_offsets.empty(), b.field("tone_offsets"), "must not be empty");
            for (double f : a.tone_offsets)
                require(std::abs(f) < 0.5 / a.step, b.field("tone_offsets"), "beyond the envelope Nyquist limit");
        }

        if (top.has("nf_map")) {
            const auto b = top.child("nf_map");
            b.allow({"grid", "frequency"});
            b.read_count("grid", c.nf_map.grid);
            b.read("frequency", "Hz", c.nf_map.frequency);
            require(c.nf_map.grid >= 2, b.field("grid"), "must be >= 2");
        }

        if (top.has("optimizer")) {
            const auto b = top.child("optimizer");
            b.allow({"space", "topology", "reference_frequency", "start", "lower", "upper", "weights",
                     "max_iterations", "tolerance", "initial_step", "restarts", "tradeoff_weights"});
            auto& o = c.optimizer;
            b.read_string("space", o.space);
            b.read_string("topology", o.topology);
            b.read("reference_frequency", "Hz", o.reference_frequency);
            b.read_list("start", "", o.start);
            b.read_list("lower", "", o.lower);
            b.read_list("upper", "", o.upper);
            b.read_list("weights", "", o.weights);
            b.read_count("max_iterations", o.max_iterations);
            b.read("tolerance", "", o.tolerance);
            b.read("initial_step", "", o.initial_step);
            b.read_count("restarts", o.restarts);
            b.read_list("tradeoff_weights", "", o.tradeoff_weights);
            require(o.space == "direct" || o.space == "l-network", b.field("space"),
                    "expected direct or l-network");
            require(o.topology == "shunt-first" || o.topology == "series-first", b.field("topology"),
                    "expected shunt-first or series-first");
            require(o.start.size() == 2, b.field("start"), "expected two values");
            require(o.lower.size() == 2 && o.upper.size() == 2, b.field("lower"), "bounds need two values");
            require(o.tolerance > 0.0, b.field("tolerance"), "must be > 0");
            require(o.initial_step > 0.0, b.field("initial_step"), "must be > 0");
            require(o.max_iterations >= 1, b.field("max_iterations"), "must be >= 1");
            for (double w : o.weights) require(w >= 0.0, b.field("weights"), "must be >= 0");
            for (double w : o.tradeoff_weights)
                require(w >= 0.0 && w <= 1.0, b.field("tradeoff_weights"), "must be in [0, 1]");
        }

        if (top.has("convert")) {
            const auto b = top.child("convert");
            b.allow({"nf", "temperatures"});
            b.read_list("nf", "dB", c.convert.nf_db);
            b.read_list("temperatures", "K", c.convert.temperatures);
            for (double t : c.convert.temperatures) require(t >= 0.0, b.field("temperatures"), "must be >= 0");
        }

        if (top.has("variant")) {
            c.variant = top.scalar("variant");
            require(c.variant == "paper" || c.variant == "textbook", "variant", "expected paper or textbook");
        }
    } catch (const YAML::Exception& e) {
        throw ValidationError("config", std::string("malformed: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

namespace {

nlohmann::json grid_json(const Grid& g) {
    return {{"start", g.start}, {"stop", g.stop}, {"points", g.points}, {"log", g.log}};
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    if (c.model) j["model"] = *c.model;
    j["oscillators"] = {{"photons", c.oscillators.photons},
                        {"impedance_rule", c.oscillators.impedance_rule}};
    if (c.oscillators.impedances) j["oscillators"]["impedances"] = *c.oscillators.impedances;
    j["sweep"] = {{"g_m1", grid_json(c.sweep.g_m1)},
                  {"g_m2", grid_json(c.sweep.g_m2)},
                  {"rederive", c.sweep.rederive}};
    j["band"] = grid_json(c.band);
    if (c.touchstone) j["touchstone"] = *c.touchstone;
    if (!c.noise_parameters.empty()) {
        auto& rows = j["noise_parameters"] = nlohmann::json::array();
        for (const auto& r : c.noise_parameters)
            rows.push_back({{"frequency", r.frequency},
                            {"f_min", r.f_min_db},
                            {"gamma_opt_mag", r.gamma_opt_mag},
                            {"gamma_opt_angle", r.gamma_opt_angle_deg},
                            {"r_n", r.r_n}});
    }
    j["amplifier"] = {{"gain", c.amplifier.gain_db},
                      {"iip3", c.amplifier.iip3_dbm},
                      {"a5", c.amplifier.a5},
                      {"noise_temperature", c.amplifier.noise_temperature},
                      {"z0", c.amplifier.z0}};
    j["two_tone"] = {{"center", c.two_tone.center},
                     {"detuning", c.two_tone.detuning},
                     {"input_power", grid_json(c.two_tone.input_dbm)}};
    const auto& a = c.analysis;
    j["analysis"] = {{"carrier", a.carrier},
                     {"step", a.step},
                     {"segment_length", a.segment_length},
                     {"segments", a.segments},
                     {"input_temperature", a.input_temperature},
                     {"tone_offsets", a.tone_offsets},
                     {"tone_power", a.tone_power_dbm},
                     {"guard_bins", a.guard_bins},
                     {"signal_half_width", a.signal_half_width},
                     {"seed", a.seed},
                     {"export_signals", a.export_signals}};
    j["nf_map"] = {{"grid", c.nf_map.grid}, {"frequency", c.nf_map.frequency}};
    const auto& o = c.optimizer;
    j["optimizer"] = {{"space", o.space},
                      {"topology", o.topology},
                      {"reference_frequency", o.reference_frequency},
                      {"start", o.start},
                      {"lower", o.lower},
                      {"upper", o.upper},
                      {"weights", o.weights},
                      {"max_iterations", o.max_iterations},
                      {"tolerance", o.tolerance},
                      {"initial_step", o.initial_step},
                      {"restarts", o.restarts},
                      {"tradeoff_weights", o.tradeoff_weights}};
    j["convert"] = {{"nf", c.convert.nf_db}, {"temperatures", c.convert.temperatures}};
    j["variant"] = c.variant;
    return j;
}

}  // namespace qlna::cli
