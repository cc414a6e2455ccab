#pragma once

#include <functional>
#include <vector>

#include "fabsim/rng.hpp"

namespace fabsim {

// Objective evaluations within one iteration may run concurrently; the
// callable must be thread-safe. Results are identical to sequential
// evaluation because sample draws and reductions are ordered by sample
// index, never by scheduling order.
using Objective = std::function<double(const std::vector<double>&)>;

struct OptTrace {
    struct Iter {
        double best = 0;          // best cost evaluated this iteration
        double mean = 0;          // mean cost over this iteration's population
        double best_so_far = 0;
    };
    std::vector<Iter> iters;
    std::vector<std::vector<double>> best_x_so_far;  // argument per iteration
    int restarts = 0;
};

struct OptResult {
    std::vector<double> best_x;
    double best_f = 0;
    OptTrace trace;
};

struct CemConfig {
    int iterations = 10;
    int population = 2000;
    double elite_frac = 0.1;
    double alpha = 0.1;  // smoothing toward the previous distribution
    std::vector<double> init_mean;  // empty = zeros
    std::vector<double> init_var;   // empty = 0.25 per coordinate
    std::vector<double> lo, hi;     // per-coordinate sample clamp; empty = unbounded
    // applied to each sample between the Gaussian draw and the bounds clamp,
    // serially in sample order on the sampler's own stream, so runs stay
    // seed-deterministic (used to mix corner snaps into pick coordinates)
    std::function<void(std::vector<double>&, Rng&)> mutate;
};

struct CmaEsConfig {
    int iterations = 250;
    int population = 12;
    std::vector<double> init_mean;  // empty = zeros
    std::vector<double> init_var;   // empty = 0.25 per coordinate
    std::vector<double> lo, hi;
};

// Cross-entropy method with a diagonal Gaussian. Each iteration refits the
// distribution to the lowest-cost elite fraction, smoothing both moments by
// alpha toward the previous iterate. The running mean is also evaluated as a
// best-so-far candidate (never joining the elite refit).
OptResult cem_minimize(const Objective& objective, int dim, const CemConfig& cfg, Rng& rng);

// Standard (mu/mu_w, lambda) CMA-ES with full covariance adaptation (rank-one
// plus rank-mu updates, cumulative step-size adaptation). Loss of positive-
// definiteness restarts from the initial distribution on a fresh seed stream
// and is counted in the trace.
OptResult cmaes_minimize(const Objective& objective, int dim, const CmaEsConfig& cfg, Rng& rng);

}  // namespace fabsim
