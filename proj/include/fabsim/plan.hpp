#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fabsim/action.hpp"
#include "fabsim/cost.hpp"
#include "fabsim/optimize.hpp"
#include "fabsim/render.hpp"

namespace fabsim {

enum class OptimizerKind { cem, cmaes };
enum class CostKind { pixel, vertex };
enum class Termination { success, out_of_bounds, max_actions };

struct PlannerConfig {
    int horizon = 5;
    OptimizerKind optimizer = OptimizerKind::cem;
    CostKind cost = CostKind::pixel;
    ActionBounds bounds{};
    int max_actions = 15;
    double coverage_success = 92.0;  // percent; smoothing termination only
    double corner_bias = 0.0;        // probability a sampled pick snaps onto a fabric corner
    CemConfig cem{};                 // empty init_mean/init_var/lo/hi are derived per goal
    CmaEsConfig cmaes{};
    ClothParams cloth{};
    ExecConfig exec{};          // executes the chosen action
    ExecConfig rollout_exec{};  // executes candidate rollouts; keep equal to exec
                                // unless trading rollout fidelity for speed
    RenderConfig render{};      // canonical; keep randomization off, planning compares
                                // candidate renders against goal.obs pixel for pixel
    SuccessThresholds thresholds{};  // folding termination
};

struct EpisodeResult {
    std::vector<PickPull> actions;
    std::vector<double> coverage;  // start value first, then one entry per action
    double final_cost = 0.0;
    Termination termination = Termination::max_actions;
    bool success = false;
    ClothState final_state;
};

// smooth: the flat rest state. fold1: one corner carried across the diagonal
// by a pinned drag and settled, a triangle covering half the plane. fold2:
// top-right corner to the center, settle, bottom-left corner to the center,
// settle, three layers stacked at the center. The drags move a pinned vertex
// directly, so goal construction is not limited by ActionBounds.
Goal make_goal(GoalKind kind, const ClothParams& params = {}, const RenderConfig& render = {});

// Rolls the actions out on a copy of state (execute + settle each) and
// returns the cost of the final state against the goal: pixel_l2 on a
// canonical render, vertex_l2 on the raw mesh. The input state is not
// modified. Leaving the fabric out of bounds mid-rollout stops the rollout
// and adds a penalty of 1e6 plus the number of unexecuted actions, so
// earlier escapes cost more.
double evaluate_sequence(const ClothState& state, const std::vector<PickPull>& actions,
                         const Goal& goal, CostKind cost, const ClothParams& params = {},
                         const ExecConfig& exec = {}, const RenderConfig& render = {});

// One receding-horizon step: optimize a horizon-length action sequence under
// evaluate_sequence and return the first action of the best sequence, clipped
// to the unit square and pull bounds. Every call optimizes from scratch;
// nothing is warm-started between steps.
PickPull plan_step(const ClothState& state, const Goal& goal, const PlannerConfig& cfg, Rng& rng);

// plan_step/execute until success (smoothing: coverage >= coverage_success;
// folding: classify_success on the rendered state), out of bounds, or
// max_actions.
EpisodeResult run_episode(const ClothState& start, const Goal& goal, const PlannerConfig& cfg,
                          Rng& rng);

// Same episode protocol with actions chosen by an arbitrary policy, so
// baselines share termination rules and bookkeeping with the planner.
using PlanPolicy = std::function<PickPull(const ClothState&, Rng&)>;
EpisodeResult run_policy_episode(const ClothState& start, const PlanPolicy& policy,
                                 const Goal& goal, const PlannerConfig& cfg, Rng& rng);

// Cost clusters from scripted folds (jittered fold constructions that should
// count as successes) and scripted non-folds (flat, crumpled, and partially
// folded states). Thresholds sit midway between the nearest cluster edges;
// separable reports whether the clusters leave a gap at all.
struct Calibration {
    SuccessThresholds thresholds;
    double pixel_success_max = 0.0;
    double pixel_failure_min = 0.0;
    double vertex_success_max = 0.0;
    double vertex_failure_min = 0.0;
    bool separable = false;
};
Calibration calibrate_thresholds(int per_cluster = 20, std::uint64_t seed = 20240901,
                                 const ClothParams& params = {}, const RenderConfig& render = {});

}  // namespace fabsim
