#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qlna::optim {

struct NelderMeadSettings {
    std::size_t max_iterations = 500;  // per descent
    double tolerance = 1e-10;          // max vertex distance from the best vertex
    double initial_step = 0.1;         // simplex edge along each axis
    std::size_t restarts = 3;          // fresh simplices around the incumbent
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;   // summed over the initial descent and restarts
    std::size_t evaluations = 0;
    bool converged = false;
    std::vector<double> best_history;  // incumbent value after each iteration
};

using Objective = std::function<double(std::span<const double>)>;

/// Standard reflection/expansion/contraction/shrink simplex descent. The
/// returned value never exceeds f(start).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadSettings& settings = {});

}  // namespace qlna::optim
