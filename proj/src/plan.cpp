#include "fabsim/plan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "fabsim/policy.hpp"

namespace fabsim {

namespace {

constexpr float kGoalSettleTol = 1e-4f;
constexpr int kGoalSettleSteps = 4000;
constexpr double kGoalDragStep = 0.0125;
constexpr double kGoalReleaseZ = 0.08;  // ends the arc above the stack so the
                                        // pin never plows through layers below
constexpr int kGoalHoldSteps = 150;     // strain relaxes against the pin before
                                        // release, or the fold pulls itself back

// Pin one vertex and carry it toward (tx, ty) along a lifted arc, hold, then
// release and settle. frac < 1 drops the vertex partway along the path (used
// to script near-misses).
void carry_corner(ClothState& s, const ClothParams& p, int idx, double tx, double ty,
                  double arc_height, double frac) {
    pin(s, idx);
    const Vec3 a = s.pos[idx];
    const double dx = (tx - a.x) * frac;
    const double dy = (ty - a.y) * frac;
    const double dist = std::sqrt(dx * dx + dy * dy);
    const int nsteps = std::max(1, int(std::ceil(dist / kGoalDragStep)));
    for (int i = 1; i <= nsteps; ++i) {
        const double t = double(i) / nsteps;
        const double ground = kGoalReleaseZ * t;
        const double z = ground + (arc_height - ground) * std::sin(3.141592653589793 * t);
        const Vec3 target{float(a.x + dx * t), float(a.y + dy * t), float(z)};
        s.pos[idx] = target;
        s.prev[idx] = target;
        step_inplace(s, p);
    }
    for (int i = 0; i < kGoalHoldSteps; ++i) step_inplace(s, p);
    unpin(s, idx);
    settle(s, p, kGoalSettleTol, kGoalSettleSteps);
}

struct FoldMove {
    int corner;  // corner_indices slot
    double tx, ty;
    double arc_height;
    double frac;
};

ClothState scripted_fold(const ClothParams& p, const std::vector<FoldMove>& moves) {
    ClothState s = init_flat(p);
    const std::array<int, 4> ci = corner_indices(s);
    for (const FoldMove& m : moves)
        carry_corner(s, p, ci[m.corner], m.tx, m.ty, m.arc_height, m.frac);
    return s;
}

// corner_indices slots: 0 = plane (0,0), 3 = plane (1,1) on the flat cloth
std::vector<FoldMove> fold1_moves(double jx = 0, double jy = 0, double hscale = 1,
                                  double frac = 1) {
    return {{0, 1.0 + jx, 1.0 + jy, 0.35 * hscale, frac}};
}

std::vector<FoldMove> fold2_moves(double jx1 = 0, double jy1 = 0, double jx2 = 0,
                                  double jy2 = 0, double frac2 = 1) {
    return {{3, 0.5 + jx1, 0.5 + jy1, 0.25, 1.0},
            {0, 0.5 + jx2, 0.5 + jy2, 0.30, frac2}};
}

bool episode_success(const EpisodeResult& ep, const Goal& goal, const PlannerConfig& cfg) {
    if (goal.kind == GoalKind::smooth) return ep.coverage.back() >= cfg.coverage_success;
    const Observation obs = render(ep.final_state, cfg.render);
    return classify_success(obs, &ep.final_state, goal, cfg.thresholds);
}

double goal_cost(const ClothState& s, const Goal& goal, CostKind cost,
                 const RenderConfig& render_cfg) {
    if (cost == CostKind::pixel) return pixel_l2(render(s, render_cfg), goal.obs);
    return vertex_l2(s, goal.mesh);
}

}  // namespace

Goal make_goal(GoalKind kind, const ClothParams& params, const RenderConfig& render_cfg) {
    Goal g;
    g.kind = kind;
    switch (kind) {
        case GoalKind::smooth: g.mesh = init_flat(params); break;
        case GoalKind::fold1: g.mesh = scripted_fold(params, fold1_moves()); break;
        case GoalKind::fold2: g.mesh = scripted_fold(params, fold2_moves()); break;
    }
    g.obs = render(g.mesh, render_cfg);
    return g;
}

double evaluate_sequence(const ClothState& state, const std::vector<PickPull>& actions,
                         const Goal& goal, CostKind cost, const ClothParams& params,
                         const ExecConfig& exec, const RenderConfig& render_cfg) {
    ClothState cur = state;
    double penalty = 0.0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        ExecResult r = execute(cur, actions[i], params, exec);
        cur = std::move(r.state);
        if (out_of_bounds(cur)) {
            penalty = 1e6 + double(actions.size() - 1 - i);
            break;
        }
    }
    return goal_cost(cur, goal, cost, render_cfg) + penalty;
}

PickPull plan_step(const ClothState& state, const Goal& goal, const PlannerConfig& cfg,
                   Rng& rng) {
    if (cfg.horizon < 1) throw std::invalid_argument("plan_step: horizon must be >= 1");
    const int H = cfg.horizon;
    const int dim = 4 * H;

    const Objective objective = [&](const std::vector<double>& v) {
        std::vector<PickPull> seq(H);
        for (int h = 0; h < H; ++h)
            seq[h] = PickPull{v[4 * h], v[4 * h + 1], v[4 * h + 2], v[4 * h + 3]};
        return evaluate_sequence(state, seq, goal, cfg.cost, cfg.cloth, cfg.rollout_exec,
                                 cfg.render);
    };

    // search box: picks inside the unit square, deltas inside the pull bounds;
    // the init mean is the do-nothing sequence (grasp the center, zero pull),
    // pick variance spans the square, delta variance is tighter for smoothing
    std::vector<double> lo(dim), hi(dim), mean(dim), var(dim);
    const double delta_var = goal.kind == GoalKind::smooth ? 0.04 : 0.08;
    for (int h = 0; h < H; ++h) {
        for (int d = 0; d < 2; ++d) {
            lo[4 * h + d] = 0.0;
            hi[4 * h + d] = 1.0;
            mean[4 * h + d] = 0.5;
            var[4 * h + d] = 0.25;
            lo[4 * h + 2 + d] = -cfg.bounds.max_pull;
            hi[4 * h + 2 + d] = cfg.bounds.max_pull;
            mean[4 * h + 2 + d] = 0.0;
            var[4 * h + 2 + d] = delta_var;
        }
    }

    OptResult res;
    if (cfg.optimizer == OptimizerKind::cem) {
        CemConfig c = cfg.cem;
        if (c.init_mean.empty()) c.init_mean = mean;
        if (c.init_var.empty()) c.init_var = var;
        if (c.lo.empty()) c.lo = lo;
        if (c.hi.empty()) c.hi = hi;
        if (cfg.corner_bias > 0.0 && !c.mutate) {
            // snap sampled picks onto the fabric corners of the state being
            // planned from; later picks in the sequence reuse the same
            // positions since candidate futures are unknown at sample time
            const std::array<int, 4> ci = corner_indices(state);
            std::array<double, 8> corners;
            for (int k = 0; k < 4; ++k) {
                corners[2 * k] = state.pos[ci[k]].x;
                corners[2 * k + 1] = state.pos[ci[k]].y;
            }
            const double bias = cfg.corner_bias;
            c.mutate = [corners, bias, H](std::vector<double>& v, Rng& r) {
                for (int h = 0; h < H; ++h) {
                    const double u = r.uniform();
                    const int k = r.uniform_int(4);
                    if (u < bias) {
                        v[4 * h] = corners[2 * k];
                        v[4 * h + 1] = corners[2 * k + 1];
                    }
                }
            };
        }
        res = cem_minimize(objective, dim, c, rng);
    } else {
        CmaEsConfig c = cfg.cmaes;
        if (c.init_mean.empty()) c.init_mean = mean;
        if (c.init_var.empty()) c.init_var = var;
        if (c.lo.empty()) c.lo = lo;
        if (c.hi.empty()) c.hi = hi;
        res = cmaes_minimize(objective, dim, c, rng);
    }

    PickPull a{res.best_x[0], res.best_x[1], res.best_x[2], res.best_x[3]};
    a.x = std::clamp(a.x, 0.0, 1.0);
    a.y = std::clamp(a.y, 0.0, 1.0);
    a.dx = std::clamp(a.dx, -cfg.bounds.max_pull, cfg.bounds.max_pull);
    a.dy = std::clamp(a.dy, -cfg.bounds.max_pull, cfg.bounds.max_pull);
    return a;
}

EpisodeResult run_policy_episode(const ClothState& start, const PlanPolicy& policy,
                                 const Goal& goal, const PlannerConfig& cfg, Rng& rng) {
    if (cfg.max_actions < 1) throw std::invalid_argument("run episode: max_actions must be >= 1");
    EpisodeResult ep;
    ep.final_state = start;
    ep.coverage.push_back(coverage(ep.final_state));
    for (;;) {
        if (episode_success(ep, goal, cfg)) {
            ep.termination = Termination::success;
            ep.success = true;
            break;
        }
        if (out_of_bounds(ep.final_state)) {
            ep.termination = Termination::out_of_bounds;
            break;
        }
        if (int(ep.actions.size()) >= cfg.max_actions) {
            ep.termination = Termination::max_actions;
            break;
        }
        const PickPull a = policy(ep.final_state, rng);
        ExecResult r = execute(ep.final_state, a, cfg.cloth, cfg.exec);
        ep.final_state = std::move(r.state);
        ep.actions.push_back(a);
        ep.coverage.push_back(coverage(ep.final_state));
    }
    ep.final_cost = goal_cost(ep.final_state, goal, cfg.cost, cfg.render);
    return ep;
}

EpisodeResult run_episode(const ClothState& start, const Goal& goal, const PlannerConfig& cfg,
                          Rng& rng) {
    const PlanPolicy planner = [&goal, &cfg](const ClothState& s, Rng& r) {
        return plan_step(s, goal, cfg, r);
    };
    return run_policy_episode(start, planner, goal, cfg, rng);
}

Calibration calibrate_thresholds(int per_cluster, std::uint64_t seed, const ClothParams& params,
                                 const RenderConfig& render_cfg) {
    if (per_cluster < 2) throw std::invalid_argument("calibrate_thresholds: need >= 2 per cluster");
    const Goal g1 = make_goal(GoalKind::fold1, params, render_cfg);
    const Goal g2 = make_goal(GoalKind::fold2, params, render_cfg);
    Rng rng(seed);

    std::vector<double> px_succ, vx_succ, px_fail, vx_fail;
    const auto push = [&](const ClothState& s, const Goal& g, bool success) {
        const double px = pixel_l2(render(s, render_cfg), g.obs);
        const double vx = vertex_l2(s, g.mesh);
        (success ? px_succ : px_fail).push_back(px);
        (success ? vx_succ : vx_fail).push_back(vx);
    };

    // success cluster: jittered reruns of the scripted fold constructions,
    // alternating between the two fold goals
    for (int i = 0; i < per_cluster; ++i) {
        Rng r = rng.fork(i);
        const double jx = r.uniform(-0.05, 0.05);
        const double jy = r.uniform(-0.05, 0.05);
        if (i % 2 == 0) {
            const double hscale = r.uniform(0.85, 1.15);
            push(scripted_fold(params, fold1_moves(jx, jy, hscale)), g1, true);
        } else {
            const double jx2 = r.uniform(-0.04, 0.04);
            const double jy2 = r.uniform(-0.04, 0.04);
            push(scripted_fold(params, fold2_moves(jx, jy, jx2, jy2)), g2, true);
        }
    }

    // failure cluster: flat starts, crumpled tier states, partial folds, and
    // (for the double fold) states where only the first corner was folded
    for (int i = 0; i < per_cluster; ++i) {
        Rng r = rng.fork(1000 + i);
        const Goal& g = (i % 2 == 0) ? g1 : g2;
        switch (i % 5) {
            case 0: push(init_flat(params), g, false); break;
            case 1:
            case 3: push(tier_start(1 + i % 3, r, params), g, false); break;
            case 2: {
                const double frac = r.uniform(0.35, 0.6);
                push(scripted_fold(params, fold1_moves(0, 0, 1, frac)), g, false);
                break;
            }
            case 4: {
                if (i % 2 == 0) {
                    push(scripted_fold(params, fold1_moves(0.3, -0.3)), g, false);
                } else {
                    const double frac = r.uniform(0.0, 0.5);
                    push(scripted_fold(params, fold2_moves(0, 0, 0, 0, frac)), g, false);
                }
                break;
            }
        }
    }

    Calibration out;
    out.pixel_success_max = *std::max_element(px_succ.begin(), px_succ.end());
    out.pixel_failure_min = *std::min_element(px_fail.begin(), px_fail.end());
    out.vertex_success_max = *std::max_element(vx_succ.begin(), vx_succ.end());
    out.vertex_failure_min = *std::min_element(vx_fail.begin(), vx_fail.end());
    out.thresholds.pixel = 0.5 * (out.pixel_success_max + out.pixel_failure_min);
    out.thresholds.vertex = 0.5 * (out.vertex_success_max + out.vertex_failure_min);
    out.separable = out.pixel_failure_min > out.pixel_success_max &&
                    out.vertex_failure_min > out.vertex_success_max;
    return out;
}

}  // namespace fabsim
