#include "qlna/rf_network.hpp"

#include "qlna/errors.hpp"
#include "qlna/units.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace qlna::rf {

Stability rollett_k(const TwoPortRecord& rec) {
    rec.validate();
    Stability st;
    st.delta = rec.s11 * rec.s22 - rec.s12 * rec.s21;
    const double loop = std::abs(rec.s12 * rec.s21);
    const double abs_s11 = std::abs(rec.s11);
    const double abs_s22 = std::abs(rec.s22);
    const double abs_delta = std::abs(st.delta);

    st.mu = (1.0 - abs_s11 * abs_s11) / (std::abs(rec.s22 - st.delta * std::conj(rec.s11)) + loop);

    if (loop < kUnilateralThreshold) {
        st.unilateral = true;
        st.k = std::numeric_limits<double>::quiet_NaN();
        st.unconditionally_stable = st.mu > 1.0;
        return st;
    }
    st.k = (1.0 - abs_s11 * abs_s11 - abs_s22 * abs_s22 + abs_delta * abs_delta) / (2.0 * loop);
    st.unconditionally_stable = st.k > 1.0 && abs_delta < 1.0;
    return st;
}

std::string to_string(NoiseFigureVariant v) {
    return v == NoiseFigureVariant::Paper ? "paper" : "textbook";
}

NoiseFigureVariant parse_variant(const std::string& s) {
    if (s == "paper") return NoiseFigureVariant::Paper;
    if (s == "textbook") return NoiseFigureVariant::Textbook;
    throw ValidationError("variant", "expected 'paper' or 'textbook', got '" + s + "'");
}

double noise_factor_from_match(const NoiseParameters& np, Complex gamma_s, NoiseFigureVariant variant) {
    np.validate();
    const double gs2 = std::norm(gamma_s);
    if (!(gs2 < 1.0)) throw ValidationError("Gamma_s", "source reflection must satisfy |Gamma_s| < 1");
    const double opt_term = variant == NoiseFigureVariant::Paper ? 1.0 + std::norm(np.gamma_opt)
                                                                 : std::norm(1.0 + np.gamma_opt);
    return np.f_min + 4.0 * np.r_n * std::norm(gamma_s - np.gamma_opt) / ((1.0 - gs2) * opt_term);
}

double nf_from_match(const NoiseParameters& np, Complex gamma_s, NoiseFigureVariant variant) {
    return linear_power_to_db(noise_factor_from_match(np, gamma_s, variant));
}

double noise_temperature(double nf_db) {
    if (!std::isfinite(nf_db) || nf_db < 0.0) throw ValidationError("NF", "must be finite and >= 0 dB");
    return kReferenceTemperature * std::expm1(nf_db * std::log(10.0) / 10.0);
}

double nf_of_temperature(double t_e) {
    if (!std::isfinite(t_e) || t_e < 0.0) throw ValidationError("T_e", "must be finite and >= 0 K");
    return 10.0 * std::log1p(t_e / kReferenceTemperature) / std::log(10.0);
}

double friis_cascade(std::span<const CascadeStage> stages) {
    if (stages.empty()) throw ValidationError("stages", "cascade needs at least one stage");
    double total = 0.0;
    double gain_before = 1.0;
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const auto& s = stages[k];
        if (!(s.noise_factor >= 1.0)) throw ValidationError("stages[" + std::to_string(k) + "].F", "must be >= 1");
        if (!(s.gain > 0.0)) throw ValidationError("stages[" + std::to_string(k) + "].G", "must be > 0");
        total += k == 0 ? s.noise_factor : (s.noise_factor - 1.0) / gain_before;
        gain_before *= s.gain;
    }
    return total;
}

double transducer_gain(const TwoPortRecord& rec, Complex gamma_s, Complex gamma_l) {
    const Complex denom = (1.0 - rec.s11 * gamma_s) * (1.0 - rec.s22 * gamma_l) -
                          rec.s12 * rec.s21 * gamma_s * gamma_l;
    return std::norm(rec.s21) * (1.0 - std::norm(gamma_s)) * (1.0 - std::norm(gamma_l)) / std::norm(denom);
}

// ---------------------------------------------------------------------------

namespace {

using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;

// Node order: 0 = C_in input terminal, 1..3 = model nodes.
Matrix4c admittance_matrix(const circuit::SmallSignalModel& m, double omega) {
    const Complex jw(0.0, omega);
    Matrix4c y = Matrix4c::Zero();
    auto branch = [&y](int a, int b, Complex adm) {
        y(a, a) += adm;
        y(b, b) += adm;
        y(a, b) -= adm;
        y(b, a) -= adm;
    };
    branch(0, 1, jw * m.c_in);
    branch(1, 2, jw * m.c_gd1);
    branch(2, 3, jw * m.c_gd2);
    y(1, 1) += jw * m.c_gs1 + 1.0 / (jw * m.l_g1);
    y(2, 2) += jw * m.c_gs2 + 1.0 / (jw * m.l_d2);
    y(3, 3) += jw * m.c_ds3 + 1.0 / (jw * m.l_d3);
    // Controlled sources sink g_m V_ctrl from the driven node to ground.
    y(2, 1) += m.g_m1;
    y(3, 2) += m.g_m2;
    return y;
}

template <typename Matrix, typename Vector>
Vector solve_checked(const Matrix& a, const Vector& rhs, double omega) {
    Eigen::FullPivLU<Matrix> lu(a);
    const double scale = a.cwiseAbs().maxCoeff();
    lu.setThreshold(1e-13);
    if (!lu.isInvertible() || !(scale > 0.0))
        throw NumericalError("singular nodal system at f = " + std::to_string(omega / (2.0 * kPi)) + " Hz");
    Vector x = lu.solve(rhs);
    if (!x.allFinite())
        throw NumericalError("singular nodal system at f = " + std::to_string(omega / (2.0 * kPi)) + " Hz");
    return x;
}

Complex reflection(Complex z, double z0) { return (z - z0) / (z + z0); }

}  // namespace

NodalResponse nodal_transfer(const circuit::SmallSignalModel& model, double omega, double z0) {
    model.validate();
    if (!std::isfinite(omega) || omega <= 0.0) throw ValidationError("omega", "must be > 0");
    if (!(z0 > 0.0)) throw ValidationError("Z0", "must be > 0");
    const Matrix4c y = admittance_matrix(model, omega);

    // Input terminal held at 1 V: move its column to the right-hand side.
    const Eigen::Matrix<Complex, 3, 3> y_int = y.bottomRightCorner<3, 3>();
    const Eigen::Matrix<Complex, 3, 1> rhs = -y.bottomLeftCorner<3, 1>();
    const Eigen::Matrix<Complex, 3, 1> v = solve_checked(y_int, rhs, omega);

    NodalResponse r;
    const Complex jw(0.0, omega);
    r.voltage_gain = v(2);
    r.transconductance = v(2) / (jw * model.l_d3);
    const Complex i_in = jw * model.c_in * (1.0 - v(0));
    // Gamma = (Z - z0)/(Z + z0) with Z = 1 / i_in, written to survive i_in = 0.
    r.gamma_in = (1.0 - z0 * i_in) / (1.0 + z0 * i_in);

    // Output impedance: input terminated in z0, 1 A injected at node 3.
    Matrix4c y_out = y;
    y_out(0, 0) += 1.0 / z0;
    Vector4c inj = Vector4c::Zero();
    inj(3) = 1.0;
    const Vector4c vo = solve_checked(y_out, inj, omega);
    r.gamma_out = reflection(vo(3), z0);
    return r;
}

TwoPortRecord sparams_at(const circuit::SmallSignalModel& model, double frequency, double z0) {
    model.validate();
    if (!std::isfinite(frequency) || frequency <= 0.0) throw ValidationError("frequency", "must be > 0");
    const double omega = 2.0 * kPi * frequency;
    Matrix4c y = admittance_matrix(model, omega);
    y(0, 0) += 1.0 / z0;
    y(3, 3) += 1.0 / z0;

    // Unit EMF behind z0 at each port in turn (Norton current 1/z0).
    Eigen::Matrix<Complex, 4, 2> rhs = Eigen::Matrix<Complex, 4, 2>::Zero();
    rhs(0, 0) = 1.0 / z0;
    rhs(3, 1) = 1.0 / z0;
    const Eigen::Matrix<Complex, 4, 2> v = solve_checked(y, rhs, omega);

    TwoPortRecord rec;
    rec.frequency = frequency;
    rec.z0 = z0;
    rec.s11 = 2.0 * v(0, 0) - 1.0;
    rec.s21 = 2.0 * v(3, 0);
    rec.s12 = 2.0 * v(0, 1);
    rec.s22 = 2.0 * v(3, 1) - 1.0;
    return rec;
}

std::vector<ModelSweepPoint> sparams_of_model(const circuit::SmallSignalModel& model,
                                              std::span<const double> frequencies, double z0) {
    model.validate();
    std::vector<ModelSweepPoint> out;
    out.reserve(frequencies.size());
    for (double f : frequencies) {
        ModelSweepPoint p;
        p.frequency = f;
        try {
            p.record = sparams_at(model, f, z0);
        } catch (const NumericalError& e) {
            p.error = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace qlna::rf
