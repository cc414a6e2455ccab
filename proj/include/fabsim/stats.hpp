#pragma once

#include <vector>

#include "fabsim/plan.hpp"

namespace fabsim {

// per-batch episode aggregates; stds are sample standard deviations
struct Summary {
    int episodes = 0;
    double mean_final_coverage = 0.0, std_final_coverage = 0.0;
    double mean_max_coverage = 0.0, std_max_coverage = 0.0;
    double mean_actions = 0.0, std_actions = 0.0;
    double success_rate = 0.0;
};

// throws std::invalid_argument on an empty batch
Summary summarize(const std::vector<EpisodeResult>& episodes);

struct MannWhitney {
    double u = 0.0;  // rank-sum statistic of the first sample
    double p = 0.0;  // two-sided
    bool exact = false;
};

// Rank test for a location shift between two independent samples. Ties get
// midranks. Small pooled samples (n+m <= 20) are scored exactly against the
// full label-assignment distribution; larger ones use the tie-corrected
// normal approximation with a half-unit continuity correction. Throws
// std::invalid_argument when either sample is empty.
MannWhitney mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fabsim
