#pragma once

// Fixed-topology small-signal model of the two-stage amplifier: three node
// fluxes (gate of stage 1, inter-stage node, drain of stage 2), its
// capacitance matrix, and the classical Lagrangian/Hamiltonian energies.

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace qlna::circuit {

struct SmallSignalModel {
    // Capacitances [F]. The coupling capacitances (c_in, c_gd1, c_gd2) may be
    // zero; the node-to-ground capacitances must be strictly positive.
    double c_in = 0.0;
    double c_gs1 = 0.0;
    double c_gd1 = 0.0;
    double c_gs2 = 0.0;
    double c_gd2 = 0.0;
    double c_ds3 = 0.0;
    // Inductances [H]
    double l_g1 = 0.0;
    double l_d2 = 0.0;
    double l_d3 = 0.0;
    // Transconductances [S]
    double g_m1 = 0.0;
    double g_m2 = 0.0;
    double v_rf = 0.0;  // drive amplitude [V]
    double i_n2 = 0.0;  // input-referred noise term, enters the energy linearly in phi_1

    /// Throws ValidationError naming the first field that breaks an invariant.
    void validate() const;

    /// Shunt inductance at node 0..2 (L_g1, L_d2, L_d3).
    double inductance(int node) const;
};

class CapacitanceMatrix {
public:
    explicit CapacitanceMatrix(const Eigen::Matrix3d& entries) : entries_(entries) {}

    const Eigen::Matrix3d& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

    bool is_symmetric() const { return entries_ == entries_.transpose(); }
    /// Sylvester's criterion on the three leading principal minors.
    bool is_positive_definite() const;

private:
    Eigen::Matrix3d entries_;
};

/// Inverse capacitance matrix; entry (i, j) is the coefficient C_{i+1, j+1}
/// that weights the charge terms of the Hamiltonian. Units 1/F.
class InverseCapacitanceMatrix {
public:
    explicit InverseCapacitanceMatrix(const Eigen::Matrix3d& entries) : entries_(entries) {}

    const Eigen::Matrix3d& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    Eigen::Matrix3d entries_;
};

struct CircuitState {
    Eigen::Vector3d phi = Eigen::Vector3d::Zero();     // node flux [V s]
    Eigen::Vector3d charge = Eigen::Vector3d::Zero();  // conjugate charge [C]
};

CapacitanceMatrix build_capacitance_matrix(const SmallSignalModel& model);

/// Throws NumericalError when the matrix is singular or not positive definite.
InverseCapacitanceMatrix invert_capacitance_matrix(const CapacitanceMatrix& m);

/// Convenience: build, then invert.
InverseCapacitanceMatrix inverse_capacitance(const SmallSignalModel& model);

/// Transconductance coupling of the conjugate-momentum relation
/// Q = C phi_dot + G phi - C_in V_rf e_1. Row 0 carries g_m1 (phi_2), row 1
/// carries g_m2 (phi_3).
Eigen::Matrix3d transconductance_matrix(const SmallSignalModel& model);

enum class HamiltonianMode {
    AsPrinted,  // closed form with the published signs and no flux-quadratic/constant corrections
    Derived,    // exact Legendre transform of the Lagrangian
};

/// Per-group decomposition of the Hamiltonian. Summing all fields gives the energy.
struct HamiltonianTerms {
    double charge_quadratic = 0.0;        // 1/2 Q^T Cinv Q
    double flux_quadratic = 0.0;          // sum phi_i^2 / (2 L_i)
    double transconductance_charge = 0.0; // Q . Cinv G phi (sign differs by mode)
    double transconductance_flux = 0.0;   // 1/2 (G phi)^T Cinv (G phi)
    double drive_charge = 0.0;            // V_rf terms linear in Q
    double drive_transconductance = 0.0;  // V_rf x G phi cross term
    double drive_constant = 0.0;          // V_rf^2 constants
    double noise = 0.0;                   // -i_n^2 phi_1

    double total() const;
};

HamiltonianTerms hamiltonian_terms(const SmallSignalModel& model,
                                   const InverseCapacitanceMatrix& inv,
                                   const CircuitState& state,
                                   HamiltonianMode mode);

/// Energy [J] (hbar = 1 convention for downstream quantum use).
double hamiltonian_energy(const SmallSignalModel& model,
                          const InverseCapacitanceMatrix& inv,
                          const CircuitState& state,
                          HamiltonianMode mode = HamiltonianMode::AsPrinted);

/// Lagrangian evaluated term by term.
double lagrangian(const SmallSignalModel& model, const Eigen::Vector3d& phi,
                  const Eigen::Vector3d& phi_dot);

struct LegendreResult {
    Eigen::Vector3d charge;
    double energy = 0.0;
};

/// Ground truth for hamiltonian_energy: conjugate charges from the analytic
/// derivative of the Lagrangian, then H = sum Q_i phi_dot_i - L.
LegendreResult legendre_oracle(const SmallSignalModel& model, const Eigen::Vector3d& phi,
                               const Eigen::Vector3d& phi_dot);

/// Same oracle addressed by charge: recovers phi_dot from Q by Cramer's rule
/// on the capacitance matrix. Throws NumericalError when that matrix is singular.
LegendreResult legendre_oracle_at_charge(const SmallSignalModel& model, const CircuitState& state);

struct TermDiscrepancy {
    std::string term;
    double as_printed = 0.0;
    double derived = 0.0;
    double difference() const { return as_printed - derived; }
};

/// Term-level comparison of the two Hamiltonian modes at one state.
std::vector<TermDiscrepancy> hamiltonian_discrepancy(const SmallSignalModel& model,
                                                     const InverseCapacitanceMatrix& inv,
                                                     const CircuitState& state);

void to_json(nlohmann::json& j, const TermDiscrepancy& d);
void to_json(nlohmann::json& j, const SmallSignalModel& m);

}  // namespace qlna::circuit
