#pragma once

// Derivative-free maximization of cavity resistance over parametric shape
// families. Two deterministic local methods (Nelder-Mead and a compass
// pattern search) driven from seeded multistart points; the family winner is
// re-scored on a finer grid.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cavres/resistance.hpp"

namespace cavres {

using Objective = std::function<double(const std::vector<double>&)>;

struct ParamBounds {
    double lo = 0.0;
    double hi = 1.0;
};

enum class ShapeFamily { Quadratic, Polyline };

struct SearchSpace {
    ShapeFamily family = ShapeFamily::Quadratic;
    std::vector<ParamBounds> bounds;
    double penalty = -10.0;  // score for shapes that fail to construct/trace

    // Quadratic walls: params (h, beta), default box h in [0.2, 4],
    // beta in [-2, 2].
    static SearchSpace quadratic();
    // Polyline with k/2 interior vertices: params (x1, y1, ..., xk/2, yk/2),
    // x in [-1/2, 1/2], y in [0, 3]. k must be even and >= 2.
    static SearchSpace polyline(int k);
};

struct OptSettings {
    int budget = 400;          // objective evaluations per run, counted exactly
    double tol = 1e-4;         // simplex diameter / poll step stopping size
    double initial_step = 0.25;  // first step as a fraction of each range
};

struct Incumbent {
    std::vector<double> params;
    double value = 0.0;
    int at_eval = 0;  // evaluation count when this incumbent was found
};

struct OptResult {
    std::string method;
    std::vector<double> start;
    std::vector<double> best_params;
    double best_value = 0.0;
    int evaluations = 0;
    std::vector<Incumbent> trace;  // monotone in value
};

// Both methods clip candidates to the bounds box, never exceed the budget,
// and return the best point seen (the start point when the budget allows a
// single evaluation). Throws only if the objective itself throws at x0.
OptResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                      const SearchSpace& space, const OptSettings& settings);
OptResult pattern_search(const Objective& f, const std::vector<double>& x0,
                         const SearchSpace& space, const OptSettings& settings);

struct FamilyOptConfig {
    OptSettings settings;
    int grid_n = 500;         // objective quadrature grid (grid_n x grid_n)
    int rescore_grid_n = 2000;  // winner re-scored on this grid
    int multistart = 8;
    std::uint64_t seed = 7;
    int threads = 0;
};

struct FamilyOptResult {
    OptResult best;
    double rescored_value = 0.0;
    std::vector<OptResult> runs;  // both methods for every start, in order
};

// Midpoint-quadrature resistance of the family shape at the given grid;
// construction failures and trace failures score space.penalty.
Objective resistance_objective(const SearchSpace& space, int grid_n,
                               int threads = 0);

// Seeded uniform starts (splitmix64), rejection-sampled to constructible
// shapes; runs Nelder-Mead and pattern search from every start. Fully
// deterministic for a fixed seed.
FamilyOptResult optimize_family(const SearchSpace& space,
                                const FamilyOptConfig& cfg);

std::string family_result_to_json(const FamilyOptResult& result);

}  // namespace cavres
