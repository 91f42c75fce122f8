#include "qlna/nelder_mead.hpp"

#include "qlna/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qlna::optim {

namespace {

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

double spread(const std::vector<Vertex>& simplex) {
    double worst = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < simplex[0].x.size(); ++k) {
            const double d = simplex[i].x[k] - simplex[0].x[k];
            d2 += d * d;
        }
        worst = std::max(worst, std::sqrt(d2));
    }
    return worst;
}

class Descent {
public:
    Descent(const Objective& f, const NelderMeadSettings& s, NelderMeadResult& log) : f_(f), s_(s), log_(log) {}

    Vertex run(const Vertex& start) {
        const std::size_t n = start.x.size();
        std::vector<Vertex> simplex{start};
        for (std::size_t k = 0; k < n; ++k) {
            Vertex v{start.x, 0.0};
            v.x[k] += s_.initial_step;
            v.f = eval(v.x);
            simplex.push_back(std::move(v));
        }
        order(simplex);

        for (std::size_t it = 0; it < s_.max_iterations; ++it) {
            if (spread(simplex) < s_.tolerance) {
                converged_ = true;
                break;
            }
            step(simplex);
            order(simplex);
            ++log_.iterations;
            log_.best_history.push_back(simplex.front().f);
        }
        if (!converged_ && spread(simplex) < s_.tolerance) converged_ = true;
        return simplex.front();
    }

    bool converged() const { return converged_; }

private:
    double eval(const std::vector<double>& x) {
        ++log_.evaluations;
        const double v = f_(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    }

    static void order(std::vector<Vertex>& simplex) {
        std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    }

    std::vector<double> along(const std::vector<double>& centroid, const std::vector<double>& worst, double t) {
        std::vector<double> p(centroid.size());
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = centroid[k] + t * (worst[k] - centroid[k]);
        return p;
    }

    void step(std::vector<Vertex>& simplex) {
        const std::size_t n = simplex.size() - 1;
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i].x[k] / static_cast<double>(n);

        Vertex& worst = simplex.back();
        const double f_best = simplex.front().f;
        const double f_second = simplex[n - 1].f;

        Vertex r{along(centroid, worst.x, -1.0), 0.0};
        r.f = eval(r.x);
        if (r.f < f_best) {
            Vertex e{along(centroid, worst.x, -2.0), 0.0};
            e.f = eval(e.x);
            worst = e.f < r.f ? std::move(e) : std::move(r);
            return;
        }
        if (r.f < f_second) {
            worst = std::move(r);
            return;
        }
        // Outside contraction when the reflection beat the worst point, inside otherwise.
        const bool outside = r.f < worst.f;
        Vertex c{along(centroid, worst.x, outside ? -0.5 : 0.5), 0.0};
        c.f = eval(c.x);
        if (c.f < (outside ? r.f : worst.f)) {
            worst = std::move(c);
            return;
        }
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            for (std::size_t k = 0; k < n; ++k)
                simplex[i].x[k] = simplex[0].x[k] + 0.5 * (simplex[i].x[k] - simplex[0].x[k]);
            simplex[i].f = eval(simplex[i].x);
        }
    }

    const Objective& f_;
    const NelderMeadSettings& s_;
    NelderMeadResult& log_;
    bool converged_ = false;
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadSettings& settings) {
    if (start.empty()) throw ValidationError("start", "need at least one parameter");
    if (!(settings.initial_step > 0.0)) throw ValidationError("initial_step", "must be > 0");

    NelderMeadResult result;
    Vertex best{std::move(start), 0.0};
    best.f = f(best.x);
    ++result.evaluations;
    if (std::isnan(best.f)) best.f = std::numeric_limits<double>::infinity();

    bool converged = false;
    for (std::size_t pass = 0; pass <= settings.restarts; ++pass) {
        Descent descent(f, settings, result);
        Vertex found = descent.run(best);
        converged = descent.converged();
        const bool improved = found.f < best.f;
        if (found.f <= best.f) best = std::move(found);
        // A restart that cannot improve on the incumbent ends the search.
        if (pass > 0 && !improved) break;
    }
    result.x = std::move(best.x);
    result.value = best.f;
    result.converged = converged;
    return result;
}

}  // namespace qlna::optim
