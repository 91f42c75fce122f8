#include "support.hpp"

#include "qlna/circuit_model.hpp"
#include "qlna/errors.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

using namespace qlna::circuit;
using testing::example_model;
using testing::rel_diff;

TEST_CASE("capacitance matrix layout") {
    const auto c = build_capacitance_matrix(example_model());
    CHECK(c(0, 0) == doctest::Approx(3.72e-12).epsilon(1e-14));
    CHECK(c(1, 1) == doctest::Approx(2.84e-12).epsilon(1e-14));
    CHECK(c(2, 2) == doctest::Approx(1.12e-12).epsilon(1e-14));
    CHECK(c(0, 1) == -0.12e-12);
    CHECK(c(1, 2) == -0.12e-12);
    CHECK(c(0, 2) == 0.0);
    CHECK(c.is_symmetric());
    CHECK(c.is_positive_definite());
}

TEST_CASE("zero coupling gives a diagonal matrix and inverse") {
    auto m = example_model();
    m.c_gd1 = m.c_gd2 = 0.0;
    m.c_in = 1.4e-12;  // C_in + C_gs1 = 4 pF
    m.c_gs2 = 2e-12;
    m.c_ds3 = 1e-12;
    const auto c = build_capacitance_matrix(m);
    CHECK(c(0, 0) == doctest::Approx(4e-12).epsilon(1e-15));
    CHECK(c(1, 1) == 2e-12);
    CHECK(c(2, 2) == 1e-12);
    const auto inv = invert_capacitance_matrix(c);
    CHECK(inv(0, 0) == doctest::Approx(0.25e12).epsilon(1e-14));
    CHECK(inv(1, 1) == doctest::Approx(0.5e12).epsilon(1e-14));
    CHECK(inv(2, 2) == doctest::Approx(1.0e12).epsilon(1e-14));
    CHECK(inv(0, 1) == 0.0);
}

TEST_CASE("inverse agrees with cofactor expansion and the frozen reference") {
    const auto c = build_capacitance_matrix(example_model());
    const auto inv = invert_capacitance_matrix(c);
    const Eigen::Matrix3d oracle = testing::cofactor_inverse(c.entries());
    // 50-digit reference from tests/oracles/fluctuation_oracle.py
    const double frozen[3][3] = {
        {2.6918577763268859e+11, 1.1425773280013058e+10, 1.2241899942871134e+9},
        {1.1425773280013058e+10, 3.541989716804048e+11, 3.7949889822900514e+10},
        {1.2241899942871134e+9, 3.7949889822900514e+10, 8.9692320248102506e+11}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(rel_diff(inv(i, j), oracle(i, j)) < 1e-13);
            CHECK(rel_diff(inv(i, j), frozen[i][j]) < 1e-13);
        }
}

TEST_CASE("invalid models and degenerate matrices are rejected") {
    auto m = example_model();
    m.c_gs1 = 0.0;
    CHECK_THROWS_AS(build_capacitance_matrix(m), qlna::ValidationError);
    m = example_model();
    m.l_d3 = -1e-9;
    try {
        m.validate();
        FAIL("expected a validation error");
    } catch (const qlna::ValidationError& e) {
        CHECK(e.field() == "L_d3");
    }
    m = example_model();
    m.g_m1 = -1e-3;
    CHECK_THROWS_AS(m.validate(), qlna::ValidationError);

    Eigen::Matrix3d singular;
    singular << 1, 1, 0, 1, 1, 0, 0, 0, 1;
    CHECK_THROWS_AS(invert_capacitance_matrix(CapacitanceMatrix(singular)), qlna::NumericalError);
    Eigen::Matrix3d indefinite;
    indefinite << 1, 2, 0, 2, 1, 0, 0, 0, 1;
    CHECK_FALSE(CapacitanceMatrix(indefinite).is_positive_definite());
    CHECK_THROWS_AS(invert_capacitance_matrix(CapacitanceMatrix(indefinite)), qlna::NumericalError);
}

TEST_CASE("hamiltonian at the origin and in the decoupled case") {
    const auto m = example_model();
    const auto inv = inverse_capacitance(m);
    CHECK(hamiltonian_energy(m, inv, {}) == 0.0);
    CHECK(hamiltonian_energy(m, inv, {}, HamiltonianMode::Derived) == 0.0);

    auto d = example_model();
    d.c_gd1 = d.c_gd2 = d.c_in = 0.0;
    const auto dinv = inverse_capacitance(d);
    CircuitState s;
    s.phi = {1e-13, -2e-13, 3e-13};
    s.charge = {2e-15, 1e-15, -4e-15};
    double expected = 0.0;
    const double cap[3] = {d.c_gs1, d.c_gs2, d.c_ds3};
    for (int i = 0; i < 3; ++i)
        expected += s.charge[i] * s.charge[i] / (2.0 * cap[i]) + s.phi[i] * s.phi[i] / (2.0 * d.inductance(i));
    CHECK(rel_diff(hamiltonian_energy(d, dinv, s), expected) < 1e-14);
}

TEST_CASE("hamiltonian scales quadratically without drive or noise") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        auto m = testing::random_model(rng);
        m.v_rf = m.i_n2 = 0.0;
        const auto inv = inverse_capacitance(m);
        CircuitState s{testing::random_vector(rng, 1e-13), testing::random_vector(rng, 1e-14)};
        CircuitState s3{3.0 * s.phi, 3.0 * s.charge};
        for (auto mode : {HamiltonianMode::AsPrinted, HamiltonianMode::Derived})
            CHECK(rel_diff(hamiltonian_energy(m, inv, s3, mode), 9.0 * hamiltonian_energy(m, inv, s, mode)) < 1e-12);
    }
}

TEST_CASE("conjugate charge matches a finite difference of the Lagrangian") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        const auto m = testing::random_model(rng);
        const Eigen::Vector3d phi = testing::random_vector(rng, 1e-13);
        const Eigen::Vector3d dot = testing::random_vector(rng, 1e-3);
        const auto r = legendre_oracle(m, phi, dot);
        for (int i = 0; i < 3; ++i) {
            const double h = 1e-6;
            Eigen::Vector3d up = dot, dn = dot;
            up[i] += h;
            dn[i] -= h;
            // L is quadratic in phi_dot, so the central difference is exact up to rounding.
            const double fd = (lagrangian(m, phi, up) - lagrangian(m, phi, dn)) / (2.0 * h);
            CHECK(std::abs(fd - r.charge[i]) < 1e-6 * std::max(std::abs(r.charge[i]), 1e-16));
        }
    }
}

TEST_CASE("oracle special cases") {
    auto m = example_model();
    m.g_m1 = 0.02;
    m.g_m2 = 0.05;
    const Eigen::Vector3d phi{1e-12, 2e-12, 3e-12};
    const auto r = legendre_oracle(m, phi, Eigen::Vector3d::Zero());
    CHECK(r.charge[0] == doctest::Approx(0.02 * 2e-12));
    CHECK(r.charge[1] == doctest::Approx(0.05 * 3e-12));
    CHECK(r.charge[2] == 0.0);

    auto d = example_model();
    d.c_gd1 = d.c_gd2 = d.c_in = 0.0;
    const Eigen::Vector3d dot{1e-3, -2e-3, 5e-4};
    const auto rd = legendre_oracle(d, phi, dot);
    CHECK(rd.charge[0] == doctest::Approx(d.c_gs1 * dot[0]));
    CHECK(rd.charge[1] == doctest::Approx(d.c_gs2 * dot[1]));
    CHECK(rd.charge[2] == doctest::Approx(d.c_ds3 * dot[2]));
}

TEST_CASE("derived mode reproduces the Legendre transform") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 100; ++k) {
        const auto m = testing::random_model(rng);
        const auto inv = inverse_capacitance(m);
        const Eigen::Vector3d phi = testing::random_vector(rng, 1e-13);
        const Eigen::Vector3d dot = testing::random_vector(rng, 1e-3);
        const auto r = legendre_oracle(m, phi, dot);
        const CircuitState s{phi, r.charge};
        CHECK(rel_diff(hamiltonian_energy(m, inv, s, HamiltonianMode::Derived), r.energy) < 1e-9);
        // Addressed by charge, the oracle lands on the same point.
        CHECK(rel_diff(legendre_oracle_at_charge(m, s).energy, r.energy) < 1e-9);
    }
}

TEST_CASE("discrepancy report") {
    std::mt19937_64 rng(3);
    const auto m = testing::random_model(rng);
    const auto inv = inverse_capacitance(m);
    const CircuitState s{testing::random_vector(rng, 1e-13), testing::random_vector(rng, 1e-14)};
    const auto report = hamiltonian_discrepancy(m, inv, s);
    REQUIRE(report.size() == 9);
    CHECK(report.back().term == "total");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < report.size(); ++i) sum += report[i].difference();
    CHECK(rel_diff(sum, report.back().difference()) < 1e-9);
    // Quadratic, flux and noise terms agree; the coupling signs do not.
    CHECK(report[0].difference() == 0.0);
    CHECK(report[1].difference() == 0.0);
    CHECK(report[7].difference() == 0.0);
    CHECK(report[2].as_printed == doctest::Approx(-report[2].derived));
    CHECK(report[4].as_printed == doctest::Approx(-report[4].derived));

    nlohmann::json j = report;
    CHECK(j[2]["term"] == "transconductance_charge");
    CHECK(j[2].contains("difference"));

    auto d = example_model();
    d.c_gd1 = d.c_gd2 = d.c_in = 0.0;
    const auto dinv = inverse_capacitance(d);
    for (const auto& t : hamiltonian_discrepancy(d, dinv, s)) CHECK(t.difference() == 0.0);
}
