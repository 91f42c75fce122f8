#include "qlna/touchstone.hpp"

#include "qlna/errors.hpp"
#include "qlna/units.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qlna::rf {

namespace {

enum class DataFormat { MagnitudeAngle, DecibelAngle, RealImaginary };

struct Options {
    double frequency_scale = 1e9;  // Touchstone default unit is GHz
    DataFormat format = DataFormat::MagnitudeAngle;
    double z0 = 50.0;
};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

bool parse_double(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

Options parse_option_line(const std::vector<std::string_view>& tokens, std::size_t line_no) {
    Options opt;
    // tokens[0] is "#" or starts with it
    std::vector<std::string> fields;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        std::string_view t = tokens[k];
        if (k == 0) t.remove_prefix(1);
        if (!t.empty()) fields.push_back(upper(t));
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
        const std::string& f = fields[k];
        if (f == "HZ") opt.frequency_scale = 1.0;
        else if (f == "KHZ") opt.frequency_scale = 1e3;
        else if (f == "MHZ") opt.frequency_scale = 1e6;
        else if (f == "GHZ") opt.frequency_scale = 1e9;
        else if (f == "S") {}
        else if (f == "Y" || f == "Z" || f == "H" || f == "G")
            throw ParseError(line_no, "only S-parameter files are supported (got " + f + ")");
        else if (f == "MA") opt.format = DataFormat::MagnitudeAngle;
        else if (f == "DB") opt.format = DataFormat::DecibelAngle;
        else if (f == "RI") opt.format = DataFormat::RealImaginary;
        else if (f == "R") {
            if (k + 1 >= fields.size() || !parse_double(fields[k + 1], opt.z0) || opt.z0 <= 0.0)
                throw ParseError(line_no, "option line: R must be followed by a positive impedance");
            ++k;
        } else {
            throw ParseError(line_no, "malformed option line: unexpected token '" + f + "'");
        }
    }
    return opt;
}

Complex to_complex(double a, double b, DataFormat format) {
    switch (format) {
        case DataFormat::RealImaginary: return {a, b};
        case DataFormat::MagnitudeAngle: return std::polar(a, b * kPi / 180.0);
        case DataFormat::DecibelAngle: return std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0);
    }
    return {};
}

void append_number(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

TouchstoneData parse_touchstone(std::string_view text) {
    TouchstoneData data;
    Options opt;
    bool seen_options = false;
    bool in_noise_block = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (auto bang = line.find('!'); bang != std::string_view::npos) line = line.substr(0, bang);
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;

        if (tokens.front().front() == '#') {
            if (seen_options) continue;  // later option lines are ignored
            if (!data.records.empty())
                throw ParseError(line_no, "option line must precede the data");
            opt = parse_option_line(tokens, line_no);
            seen_options = true;
            continue;
        }

        std::vector<double> values(tokens.size());
        for (std::size_t k = 0; k < tokens.size(); ++k)
            if (!parse_double(tokens[k], values[k]))
                throw ParseError(line_no, "not a number: '" + std::string(tokens[k]) + "'");

        const double freq = values[0] * opt.frequency_scale;
        if (!(freq > 0.0)) throw ParseError(line_no, "frequency must be positive");

        if (values.size() == 9 && !in_noise_block) {
            if (!data.records.empty() && freq <= data.records.back().frequency)
                throw ParseError(line_no, "frequencies must be strictly increasing");
            TwoPortRecord r;
            r.frequency = freq;
            r.z0 = opt.z0;
            r.s11 = to_complex(values[1], values[2], opt.format);
            r.s21 = to_complex(values[3], values[4], opt.format);
            r.s12 = to_complex(values[5], values[6], opt.format);
            r.s22 = to_complex(values[7], values[8], opt.format);
            data.records.push_back(r);
        } else if (values.size() == 5 && !data.records.empty()) {
            if (in_noise_block && freq <= data.noise.back().frequency)
                throw ParseError(line_no, "noise frequencies must be strictly increasing");
            in_noise_block = true;
            NoiseRecord n;
            n.frequency = freq;
            n.params.f_min = db_to_linear_power(values[1]);
            n.params.gamma_opt = std::polar(values[2], values[3] * kPi / 180.0);
            n.params.r_n = values[4];
            try {
                n.params.validate();
            } catch (const ValidationError& e) {
                throw ParseError(line_no, e.what());
            }
            data.noise.push_back(n);
        } else {
            const char* expected = in_noise_block ? "5 values in the noise block" : "9 values per two-port row";
            throw ParseError(line_no, std::string("wrong column count: expected ") + expected + ", got " +
                                          std::to_string(values.size()));
        }
    }
    if (data.records.empty()) throw ParseError(line_no, "no network data found");
    return data;
}

std::string write_touchstone(const TouchstoneData& data) {
    if (data.records.empty()) throw ValidationError("records", "nothing to write");
    const double z0 = data.records.front().z0;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const auto& r = data.records[i];
        r.validate();
        if (r.z0 != z0) throw ValidationError("Z0", "all records must share one reference impedance");
        if (i > 0 && r.frequency <= data.records[i - 1].frequency)
            throw ValidationError("frequency", "records must be strictly increasing in frequency");
    }
    for (std::size_t i = 0; i < data.noise.size(); ++i) {
        data.noise[i].params.validate();
        if (i > 0 && data.noise[i].frequency <= data.noise[i - 1].frequency)
            throw ValidationError("noise frequency", "noise records must be strictly increasing");
    }

    std::string out = "! two-port S-parameters, real/imaginary\n# Hz S RI R ";
    append_number(out, z0);
    out += '\n';
    for (const auto& r : data.records) {
        append_number(out, r.frequency);
        for (Complex s : {r.s11, r.s21, r.s12, r.s22}) {
            out += ' ';
            append_number(out, s.real());
            out += ' ';
            append_number(out, s.imag());
        }
        out += '\n';
    }
    if (!data.noise.empty()) {
        out += "! noise parameters: freq Fmin[dB] |Gopt| ang(Gopt)[deg] rn\n";
        for (const auto& n : data.noise) {
            append_number(out, n.frequency);
            out += ' ';
            append_number(out, linear_power_to_db(n.params.f_min));
            out += ' ';
            append_number(out, std::abs(n.params.gamma_opt));
            out += ' ';
            append_number(out, std::arg(n.params.gamma_opt) * 180.0 / kPi);
            out += ' ';
            append_number(out, n.params.r_n);
            out += '\n';
        }
    }
    return out;
}

TouchstoneData read_touchstone_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open Touchstone file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_touchstone(ss.str());
}

}  // namespace qlna::rf
