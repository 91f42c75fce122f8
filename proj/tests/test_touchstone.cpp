#include "qlna/errors.hpp"
#include "qlna/touchstone.hpp"
#include "qlna/units.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

using namespace qlna::rf;

namespace {

std::size_t error_line(const std::string& text) {
    try {
        parse_touchstone(text);
    } catch (const qlna::ParseError& e) {
        return e.line();
    }
    return 0;
}

double max_error(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

}  // namespace

TEST_CASE("magnitude-angle file with comments and a noise block") {
    const std::string text =
        "! two-port device\n"
        "# MHz S MA R 50\n"
        "! freq  S11       S21       S12       S22\n"
        "1000  0.5 -30   4.0 80   0.05 20   0.4 -60  ! first\n"
        "2000  0.45 -45  3.5 70   0.06 25   0.35 -70\n"
        "! noise parameters\n"
        "1000  0.04 0.4 50 0.08\n"
        "2000  0.05 0.35 60 0.07\n";
    const auto d = parse_touchstone(text);
    REQUIRE(d.records.size() == 2);
    REQUIRE(d.noise.size() == 2);
    CHECK(d.records[0].frequency == 1e9);
    CHECK(std::abs(d.records[0].s21 - std::polar(4.0, 80 * qlna::kPi / 180)) < 1e-15);
    // Column order is S11 S21 S12 S22.
    CHECK(std::abs(d.records[0].s12) == doctest::Approx(0.05));
    CHECK(std::abs(d.records[1].s22) == doctest::Approx(0.35));
    CHECK(d.noise[0].params.f_min == doctest::Approx(qlna::db_to_linear_power(0.04)));
    CHECK(std::arg(d.noise[1].params.gamma_opt) == doctest::Approx(60 * qlna::kPi / 180));
    CHECK(d.noise[1].params.r_n == 0.07);
}

TEST_CASE("default options, dB format and option order") {
    const auto d = parse_touchstone("#\n1.5 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n");
    CHECK(d.records[0].frequency == 1.5e9);  // GHz, S, MA, 50 Ohm
    CHECK(d.records[0].z0 == 50.0);
    CHECK(std::abs(d.records[0].s11) == doctest::Approx(0.1));

    const auto db = parse_touchstone("# r 75 db hz s\n100 -20 0 6 90 -40 0 -3 180\n");
    CHECK(db.records[0].frequency == 100.0);
    CHECK(db.records[0].z0 == 75.0);
    CHECK(std::abs(db.records[0].s11) == doctest::Approx(0.1));
    CHECK(std::abs(db.records[0].s21) == doctest::Approx(std::pow(10.0, 6.0 / 20.0)));
    CHECK(db.records[0].s21.real() == doctest::Approx(0.0).epsilon(1e-12));

    const auto ri = parse_touchstone("# kHz S RI R 50\n1 0.1 -0.2 1 2 0 0 0.3 0.4\n");
    CHECK(ri.records[0].frequency == 1e3);
    CHECK(ri.records[0].s11 == Complex(0.1, -0.2));
    CHECK(ri.records[0].s22 == Complex(0.3, 0.4));
}

TEST_CASE("malformed input reports the line") {
    CHECK(error_line("# GHz S RI R 50\n1 1 0 0 0 0 0 1\n") == 2);
    CHECK(error_line("# GHz Y RI R 50\n1 1 0 0 0 0 0 0 1\n") == 1);
    CHECK(error_line("# GHz S RI R 50\n2 1 0 0 0 0 0 0 1\n1 1 0 0 0 0 0 0 1\n") == 3);
    CHECK(error_line("# GHz S RI R 50\n1 1 0 0 0 x 0 0 1\n") == 2);
    CHECK(error_line("# GHz S RI R -5\n1 1 0 0 0 0 0 0 1\n") == 1);
    CHECK(error_line("# GHz S XX R 50\n") == 1);
    CHECK(error_line("! empty\n") != 0);
    CHECK(error_line("# GHz S RI R 50\n1 1 0 0 0 0 0 0 1\n1 0.5 0.3 0 0.1\n1 0.5 0.3 0 0.1\n") == 4);
    CHECK(error_line("# GHz S RI R 50\n1 1 0 0 0 0 0 0 1\n1 0.5 1.3 0 0.1\n") == 3);  // |Gamma_opt| >= 1
}

TEST_CASE("writer rejects inconsistent input") {
    TouchstoneData d;
    CHECK_THROWS_AS(write_touchstone(d), qlna::ValidationError);
    d.records = {TwoPortRecord{2e9}, TwoPortRecord{1e9}};
    CHECK_THROWS_AS(write_touchstone(d), qlna::ValidationError);
    d.records = {TwoPortRecord{1e9}, TwoPortRecord{2e9, {}, {}, {}, {}, 75.0}};
    CHECK_THROWS_AS(write_touchstone(d), qlna::ValidationError);
}

TEST_CASE("parse of write is the identity on fuzzed data") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0), mag(0.0, 0.99), pos(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        TouchstoneData d;
        const double z0 = trial % 3 == 0 ? 50.0 : 1.0 + 100.0 * pos(rng);
        double f = 1e3 + 1e9 * pos(rng);
        const int n = 1 + static_cast<int>(20 * pos(rng));
        for (int k = 0; k < n; ++k) {
            TwoPortRecord r;
            r.frequency = f;
            r.z0 = z0;
            const double scale = std::pow(10.0, 3.0 * u(rng));
            r.s11 = {u(rng), u(rng)};
            r.s21 = {scale * u(rng), scale * u(rng)};
            r.s12 = {1e-3 * u(rng), 1e-3 * u(rng)};
            r.s22 = {u(rng), u(rng)};
            d.records.push_back(r);
            f *= 1.0 + 0.5 * pos(rng) + 1e-9;
        }
        if (trial % 2 == 0) {
            double nf = d.records.front().frequency;
            for (int k = 0; k < 1 + trial % 7; ++k) {
                NoiseRecord nr;
                nr.frequency = nf;
                nr.params.f_min = 1.0 + 2.0 * pos(rng);
                nr.params.r_n = 2.0 * pos(rng);
                nr.params.gamma_opt = std::polar(mag(rng), 3.0 * u(rng));
                d.noise.push_back(nr);
                nf *= 1.1;
            }
        }
        const auto back = parse_touchstone(write_touchstone(d));
        REQUIRE(back.records.size() == d.records.size());
        REQUIRE(back.noise.size() == d.noise.size());
        for (std::size_t k = 0; k < d.records.size(); ++k) {
            const auto &a = d.records[k], &b = back.records[k];
            CHECK(std::abs(a.frequency - b.frequency) <= 1e-9 * a.frequency);
            CHECK(a.z0 == b.z0);
            CHECK(max_error(a.s11, b.s11) < 1e-9);
            CHECK(max_error(a.s21, b.s21) < 1e-9);
            CHECK(max_error(a.s12, b.s12) < 1e-9);
            CHECK(max_error(a.s22, b.s22) < 1e-9);
        }
        for (std::size_t k = 0; k < d.noise.size(); ++k) {
            const auto &a = d.noise[k].params, &b = back.noise[k].params;
            CHECK(std::abs(a.f_min - b.f_min) < 1e-9 * a.f_min);
            CHECK(std::abs(a.r_n - b.r_n) < 1e-9);
            CHECK(std::abs(a.gamma_opt - b.gamma_opt) < 1e-9);
        }
    }
}

TEST_CASE("file reading") {
    CHECK_THROWS_AS(read_touchstone_file("/nonexistent/device.s2p"), qlna::IoError);
    const std::string path = "touchstone_test_tmp.s2p";
    {
        std::ofstream f(path);
        f << "# GHz S RI R 50\n1 0.1 0 2 0 0 0 0.1 0\n";
    }
    CHECK(read_touchstone_file(path).records.size() == 1);
    std::remove(path.c_str());
}
