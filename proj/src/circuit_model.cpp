#include "qlna/circuit_model.hpp"

#include "qlna/errors.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>

namespace qlna::circuit {

namespace {

void require_positive(const char* field, double v) {
    if (!std::isfinite(v) || v <= 0.0) throw ValidationError(field, "must be finite and > 0");
}

void require_non_negative(const char* field, double v) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError(field, "must be finite and >= 0");
}

void require_finite(const char* field, double v) {
    if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

double det3(const Eigen::Matrix3d& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// b in Q = C phi_dot + b, collecting every phi_dot-linear Lagrangian term.
Eigen::Vector3d momentum_offset(const SmallSignalModel& model, const Eigen::Vector3d& phi) {
    Eigen::Vector3d b = transconductance_matrix(model) * phi;
    b(0) -= model.c_in * model.v_rf;
    return b;
}

}  // namespace

void SmallSignalModel::validate() const {
    require_non_negative("C_in", c_in);
    require_positive("C_gs1", c_gs1);
    require_non_negative("C_gd1", c_gd1);
    require_positive("C_gs2", c_gs2);
    require_non_negative("C_gd2", c_gd2);
    require_positive("C_ds3", c_ds3);
    require_positive("L_g1", l_g1);
    require_positive("L_d2", l_d2);
    require_positive("L_d3", l_d3);
    require_non_negative("g_m1", g_m1);
    require_non_negative("g_m2", g_m2);
    require_finite("V_rf", v_rf);
    require_finite("i_n2", i_n2);
}

double SmallSignalModel::inductance(int node) const {
    switch (node) {
        case 0: return l_g1;
        case 1: return l_d2;
        case 2: return l_d3;
        default: throw std::out_of_range("node index must be 0..2");
    }
}

bool CapacitanceMatrix::is_positive_definite() const {
    const auto& m = entries_;
    const double m1 = m(0, 0);
    const double m2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return m1 > 0.0 && m2 > 0.0 && det3(m) > 0.0;
}

CapacitanceMatrix build_capacitance_matrix(const SmallSignalModel& model) {
    model.validate();
    const double c1 = model.c_in + model.c_gs1 + model.c_gd1;
    const double c2 = model.c_gd2 + model.c_gs2 + model.c_gd1;
    const double c3 = model.c_ds3 + model.c_gd2;
    Eigen::Matrix3d m;
    m << c1, -model.c_gd1, 0.0,
         -model.c_gd1, c2, -model.c_gd2,
         0.0, -model.c_gd2, c3;
    return CapacitanceMatrix(m);
}

InverseCapacitanceMatrix invert_capacitance_matrix(const CapacitanceMatrix& m) {
    if (!m.entries().allFinite()) throw NumericalError("capacitance matrix has non-finite entries");
    Eigen::LLT<Eigen::Matrix3d> llt(m.entries());
    if (llt.info() != Eigen::Success || !m.is_positive_definite())
        throw NumericalError("degenerate model: capacitance matrix is singular or not positive definite");
    Eigen::Matrix3d inv = llt.solve(Eigen::Matrix3d::Identity());
    // Cholesky solves are symmetric only up to rounding; pin exact symmetry.
    inv = 0.5 * (inv + inv.transpose()).eval();
    return InverseCapacitanceMatrix(inv);
}

InverseCapacitanceMatrix inverse_capacitance(const SmallSignalModel& model) {
    return invert_capacitance_matrix(build_capacitance_matrix(model));
}

Eigen::Matrix3d transconductance_matrix(const SmallSignalModel& model) {
    // The published form repeats g_m1 in row 1; differentiating g_m2 phi_dot_2 phi_3
    // puts g_m2 there instead.
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 1) = model.g_m1;
    g(1, 2) = model.g_m2;
    return g;
}

double HamiltonianTerms::total() const {
    return charge_quadratic + flux_quadratic + transconductance_charge + transconductance_flux +
           drive_charge + drive_transconductance + drive_constant + noise;
}

HamiltonianTerms hamiltonian_terms(const SmallSignalModel& model,
                                   const InverseCapacitanceMatrix& inv,
                                   const CircuitState& state, HamiltonianMode mode) {
    const Eigen::Matrix3d& k = inv.entries();
    const Eigen::Vector3d& q = state.charge;
    const Eigen::Vector3d& phi = state.phi;
    const Eigen::Vector3d g_phi = transconductance_matrix(model) * phi;
    const double drive = model.c_in * model.v_rf;

    HamiltonianTerms t;
    t.charge_quadratic = 0.5 * q.dot(k * q);
    for (int i = 0; i < 3; ++i) t.flux_quadratic += phi(i) * phi(i) / (2.0 * model.inductance(i));
    t.noise = -model.i_n2 * phi(0);

    if (mode == HamiltonianMode::AsPrinted) {
        // C11 g1 Q1 phi2 + C12 g2 Q1 phi3 + C21 g1 Q2 phi2 + ... + C32 g2 Q3 phi3
        t.transconductance_charge = q.dot(k * g_phi);
        // -C_in C11 V_rf Q1 - C_in C21 V_rf Q2 - C_in C31 V_rf Q3
        t.drive_charge = -drive * q.dot(k.col(0));
        return t;
    }

    // H = 1/2 (Q - b)^T Cinv (Q - b) + sum phi^2/2L - i_n^2 phi_1 - C_in V_rf^2 / 2
    // with b = G phi - C_in V_rf e_1, expanded term by term.
    t.transconductance_charge = -q.dot(k * g_phi);
    t.transconductance_flux = 0.5 * g_phi.dot(k * g_phi);
    t.drive_charge = drive * q.dot(k.col(0));
    t.drive_transconductance = -drive * k.row(0).dot(g_phi);
    t.drive_constant = 0.5 * drive * drive * k(0, 0) - 0.5 * model.c_in * model.v_rf * model.v_rf;
    return t;
}

double hamiltonian_energy(const SmallSignalModel& model, const InverseCapacitanceMatrix& inv,
                          const CircuitState& state, HamiltonianMode mode) {
    if (!state.phi.allFinite() || !state.charge.allFinite())
        throw ValidationError("state", "flux and charge must be finite");
    return hamiltonian_terms(model, inv, state, mode).total();
}

double lagrangian(const SmallSignalModel& m, const Eigen::Vector3d& phi,
                  const Eigen::Vector3d& phi_dot) {
    const double d1 = phi_dot(0), d2 = phi_dot(1), d3 = phi_dot(2);
    const double p1 = phi(0), p2 = phi(1), p3 = phi(2);
    double l = 0.0;
    l += 0.5 * m.c_gs1 * d1 * d1 - p1 * p1 / (2.0 * m.l_g1);
    l += 0.5 * m.c_gd1 * (d1 - d2) * (d1 - d2);
    l += 0.5 * m.c_in * (m.v_rf - d1) * (m.v_rf - d1);
    l += m.i_n2 * p1;
    l += 0.5 * m.c_gs2 * d2 * d2 - p2 * p2 / (2.0 * m.l_d2);
    l += 0.5 * m.c_gd2 * (d2 - d3) * (d2 - d3);
    l += m.g_m1 * d1 * p2;
    l += 0.5 * m.c_ds3 * d3 * d3 - p3 * p3 / (2.0 * m.l_d3);
    l += m.g_m2 * d2 * p3;
    return l;
}

LegendreResult legendre_oracle(const SmallSignalModel& m, const Eigen::Vector3d& phi,
                               const Eigen::Vector3d& phi_dot) {
    if (!phi.allFinite() || !phi_dot.allFinite())
        throw ValidationError("state", "flux and flux rate must be finite");
    const double d1 = phi_dot(0), d2 = phi_dot(1), d3 = phi_dot(2);
    LegendreResult r;
    // dL/d(phi_dot_k), one Lagrangian term at a time
    r.charge(0) = m.c_gs1 * d1 + m.c_gd1 * (d1 - d2) - m.c_in * (m.v_rf - d1) + m.g_m1 * phi(1);
    r.charge(1) = m.c_gs2 * d2 - m.c_gd1 * (d1 - d2) + m.c_gd2 * (d2 - d3) + m.g_m2 * phi(2);
    r.charge(2) = m.c_ds3 * d3 - m.c_gd2 * (d2 - d3);
    r.energy = r.charge.dot(phi_dot) - lagrangian(m, phi, phi_dot);
    return r;
}

LegendreResult legendre_oracle_at_charge(const SmallSignalModel& model, const CircuitState& state) {
    const Eigen::Matrix3d c = build_capacitance_matrix(model).entries();
    const double det = det3(c);
    if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        throw NumericalError("singular capacitance matrix while mapping charge to flux rate");
    const Eigen::Vector3d rhs = state.charge - momentum_offset(model, state.phi);
    Eigen::Vector3d phi_dot;
    for (int col = 0; col < 3; ++col) {
        Eigen::Matrix3d replaced = c;
        replaced.col(col) = rhs;
        phi_dot(col) = det3(replaced) / det;
    }
    return legendre_oracle(model, state.phi, phi_dot);
}

std::vector<TermDiscrepancy> hamiltonian_discrepancy(const SmallSignalModel& model,
                                                     const InverseCapacitanceMatrix& inv,
                                                     const CircuitState& state) {
    const auto p = hamiltonian_terms(model, inv, state, HamiltonianMode::AsPrinted);
    const auto d = hamiltonian_terms(model, inv, state, HamiltonianMode::Derived);
    return {
        {"charge_quadratic", p.charge_quadratic, d.charge_quadratic},
        {"flux_quadratic", p.flux_quadratic, d.flux_quadratic},
        {"transconductance_charge", p.transconductance_charge, d.transconductance_charge},
        {"transconductance_flux", p.transconductance_flux, d.transconductance_flux},
        {"drive_charge", p.drive_charge, d.drive_charge},
        {"drive_transconductance", p.drive_transconductance, d.drive_transconductance},
        {"drive_constant", p.drive_constant, d.drive_constant},
        {"noise", p.noise, d.noise},
        {"total", p.total(), d.total()},
    };
}

void to_json(nlohmann::json& j, const TermDiscrepancy& d) {
    j = nlohmann::json{{"term", d.term},
                       {"as_printed", d.as_printed},
                       {"derived", d.derived},
                       {"difference", d.difference()}};
}

void to_json(nlohmann::json& j, const SmallSignalModel& m) {
    j = nlohmann::json{{"C_in", m.c_in},   {"C_gs1", m.c_gs1}, {"C_gd1", m.c_gd1},
                       {"C_gs2", m.c_gs2}, {"C_gd2", m.c_gd2}, {"C_ds3", m.c_ds3},
                       {"L_g1", m.l_g1},   {"L_d2", m.l_d2},   {"L_d3", m.l_d3},
                       {"g_m1", m.g_m1},   {"g_m2", m.g_m2},   {"V_rf", m.v_rf},
                       {"i_n2", m.i_n2}};
}

}  // namespace qlna::circuit
