#include "qlna/matching_optimizer.hpp"

#include "qlna/errors.hpp"

#include <cmath>
#include <numeric>

namespace qlna::matching {

namespace {

// Normalized reactance/susceptance at `frequency` for an element specified at `reference`.
double scale_element(double value, double frequency, double reference) {
    return value >= 0.0 ? value * frequency / reference : value * reference / frequency;
}

double weight_sum(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

MatchResult descend(const BandObjective& obj, const MatchSearchSpace& space, const optim::Objective& f,
                    std::vector<double> start, const optim::NelderMeadSettings& settings) {
    MatchResult out;
    out.start_objective = f(start);
    if (!(out.start_objective < kBarrier)) throw NumericalError("no feasible starting point for the match search");

    const auto nm = optim::nelder_mead(f, std::move(start), settings);
    out.params = nm.x;
    out.objective = nm.value;
    out.iterations = nm.iterations;
    out.evaluations = nm.evaluations;
    out.converged = nm.converged;
    out.history = nm.best_history;
    for (std::size_t i = 0; i < obj.frequencies.size(); ++i) {
        const Complex g = space.gamma_s(out.params, obj.frequencies[i]);
        out.gamma_s.push_back(g);
        out.nf_db.push_back(rf::nf_from_match(obj.noise[i], g, obj.variant));
    }
    return out;
}

}  // namespace

void MatchSearchSpace::validate() const {
    if (lower.size() != 2 || upper.size() != 2) throw ValidationError("bounds", "need two lower and two upper bounds");
    for (std::size_t k = 0; k < 2; ++k)
        if (!(lower[k] < upper[k])) throw ValidationError("bounds", "lower bound must be below upper bound");
    if (kind == Parameterization::LNetwork) {
        if (!(reference_frequency > 0.0)) throw ValidationError("reference_frequency", "must be > 0");
        if (!(z0 > 0.0)) throw ValidationError("Z0", "must be > 0");
    }
}

bool MatchSearchSpace::within_bounds(std::span<const double> p) const {
    if (p.size() != 2) return false;
    for (std::size_t k = 0; k < 2; ++k)
        if (!(p[k] >= lower[k] && p[k] <= upper[k])) return false;
    return true;
}

Complex MatchSearchSpace::gamma_s(std::span<const double> p, double frequency) const {
    if (p.size() != 2) throw ValidationError("params", "expected two parameters");
    if (kind == Parameterization::DirectGamma) return {p[0], p[1]};

    const double x = scale_element(p[0], frequency, reference_frequency);
    const double b = scale_element(p[1], frequency, reference_frequency);
    const Complex j(0.0, 1.0);
    Complex z;
    if (topology == LTopology::ShuntFirst) {
        z = 1.0 / (1.0 + j * b) + j * x;
    } else {
        z = 1.0 / (1.0 / (1.0 + j * x) + j * b);
    }
    return (z - 1.0) / (z + 1.0);
}

void BandObjective::validate() const {
    if (frequencies.empty()) throw ValidationError("band", "need at least one frequency");
    if (noise.size() != frequencies.size())
        throw ValidationError("noise", "one noise-parameter set per band frequency");
    if (weights.size() != frequencies.size())
        throw ValidationError("weights", "one weight per band frequency");
    for (double w : weights)
        if (!std::isfinite(w) || w < 0.0) throw ValidationError("weights", "must be >= 0");
    if (!(weight_sum(weights) > 0.0)) throw ValidationError("weights", "must sum to a positive value");
    for (double f : frequencies)
        if (!(f > 0.0)) throw ValidationError("band", "frequencies must be > 0");
    for (const auto& n : noise) n.validate();
}

BandObjective BandObjective::from_records(const std::vector<rf::NoiseRecord>& records,
                                          std::span<const double> frequencies,
                                          rf::NoiseFigureVariant variant) {
    BandObjective obj;
    obj.variant = variant;
    for (double f : frequencies) {
        obj.frequencies.push_back(f);
        obj.noise.push_back(rf::interpolate_noise(records, f));
        obj.weights.push_back(1.0);
    }
    obj.validate();
    return obj;
}

double band_nf(const BandObjective& obj, const MatchSearchSpace& space, std::span<const double> params) {
    if (!space.within_bounds(params)) return kBarrier + 1.0;
    double worst_excursion = -1.0;
    std::vector<Complex> gammas;
    gammas.reserve(obj.frequencies.size());
    for (double f : obj.frequencies) {
        const Complex g = space.gamma_s(params, f);
        worst_excursion = std::max(worst_excursion, std::abs(g) - 1.0);
        gammas.push_back(g);
    }
    if (worst_excursion >= 0.0) return kBarrier + worst_excursion;

    double acc = 0.0;
    for (std::size_t i = 0; i < gammas.size(); ++i)
        if (obj.weights[i] > 0.0) acc += obj.weights[i] * rf::nf_from_match(obj.noise[i], gammas[i], obj.variant);
    return acc / weight_sum(obj.weights);
}

MatchResult optimize_match(const BandObjective& obj, const MatchSearchSpace& space, std::vector<double> start,
                           const optim::NelderMeadSettings& settings) {
    obj.validate();
    space.validate();
    const optim::Objective f = [&](std::span<const double> p) { return band_nf(obj, space, p); };
    return descend(obj, space, f, std::move(start), settings);
}

double band_gain_db(const GainModel& gain, const MatchSearchSpace& space, std::span<const double> params) {
    if (gain.records.empty()) throw ValidationError("gain model", "no records");
    double acc = 0.0;
    for (const auto& rec : gain.records)
        acc += 10.0 * std::log10(rf::transducer_gain(rec, space.gamma_s(params, rec.frequency)));
    return acc / static_cast<double>(gain.records.size());
}

std::vector<TradeoffPoint> tradeoff_report(const BandObjective& obj, const MatchSearchSpace& space,
                                           const GainModel& gain, std::span<const double> nf_weights,
                                           const std::vector<double>& start,
                                           const optim::NelderMeadSettings& settings) {
    obj.validate();
    space.validate();
    if (gain.records.size() != obj.frequencies.size())
        throw ValidationError("gain model", "one two-port record per band frequency");
    for (std::size_t i = 0; i < gain.records.size(); ++i)
        if (gain.records[i].frequency != obj.frequencies[i])
            throw ValidationError("gain model", "record frequencies must match the band");

    const double wsum = weight_sum(obj.weights);
    const auto weighted_gain_db = [&](std::span<const double> p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < gain.records.size(); ++i)
            if (obj.weights[i] > 0.0)
                acc += obj.weights[i] *
                       10.0 * std::log10(rf::transducer_gain(gain.records[i], space.gamma_s(p, obj.frequencies[i])));
        return acc / wsum;
    };

    std::vector<TradeoffPoint> curve;
    for (double w : nf_weights) {
        if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("nf_weights", "each weight must lie in [0, 1]");
        TradeoffPoint pt;
        pt.nf_weight = w;
        pt.gain_weight = 1.0 - w;
        if (w == 1.0) {
            pt.run = optimize_match(obj, space, start, settings);
        } else {
            const optim::Objective f = [&](std::span<const double> p) {
                const double nf = band_nf(obj, space, p);
                if (nf >= kBarrier) return nf;
                const double g = weighted_gain_db(p);
                return std::isfinite(g) ? w * nf - (1.0 - w) * g : kBarrier;
            };
            pt.run = descend(obj, space, f, start, settings);
        }
        pt.params = pt.run.params;
        pt.mean_nf_db = band_nf(obj, space, pt.params);
        pt.mean_gain_db = weighted_gain_db(pt.params);
        curve.push_back(std::move(pt));
    }
    return curve;
}

std::string to_string(Parameterization p) { return p == Parameterization::DirectGamma ? "direct" : "l-network"; }

std::string to_string(LTopology t) { return t == LTopology::ShuntFirst ? "shunt-first" : "series-first"; }

}  // namespace qlna::matching
