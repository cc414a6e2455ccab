#include "fabsim/action.hpp"

#include <algorithm>
#include <cmath>

namespace fabsim {

std::array<float, 4> fabric_bbox(const ClothState& state) {
    std::array<float, 4> bb = {state.pos[0].x, state.pos[0].y, state.pos[0].x, state.pos[0].y};
    for (const Vec3& p : state.pos) {
        bb[0] = std::min(bb[0], p.x);
        bb[1] = std::min(bb[1], p.y);
        bb[2] = std::max(bb[2], p.x);
        bb[3] = std::max(bb[3], p.y);
    }
    return bb;
}

std::array<int, 4> corner_indices(const ClothState& state) {
    const int n = state.n;
    return {state.index(0, 0), state.index(0, n - 1), state.index(n - 1, 0),
            state.index(n - 1, n - 1)};
}

std::optional<PickPull> sample_action(const ClothState& state, const ActionBounds& bounds,
                                      double corner_bias, Rng& rng, bool* picked_corner) {
    if (picked_corner) *picked_corner = false;
    auto bb = fabric_bbox(state);
    double lox = std::max(0.0f, bb[0]), hix = std::min(1.0f, bb[2]);
    double loy = std::max(0.0f, bb[1]), hiy = std::min(1.0f, bb[3]);
    if (lox > hix || loy > hiy) return std::nullopt;
    if (hix - lox <= 0.0 || hiy - loy <= 0.0) return std::nullopt;  // degenerate projection

    PickPull a;
    bool corner = rng.uniform() < corner_bias;
    if (corner) {
        int c = rng.uniform_int(4);
        const Vec3& p = state.pos[corner_indices(state)[c]];
        a.x = std::clamp(double(p.x), 0.0, 1.0);
        a.y = std::clamp(double(p.y), 0.0, 1.0);
        if (picked_corner) *picked_corner = true;
    } else {
        a.x = rng.uniform(lox, hix);
        a.y = rng.uniform(loy, hiy);
    }
    // deltas are stored post-clip: the pull endpoint stays on the plane
    a.dx = std::clamp(a.x + rng.uniform(-bounds.max_pull, bounds.max_pull), 0.0, 1.0) - a.x;
    a.dy = std::clamp(a.y + rng.uniform(-bounds.max_pull, bounds.max_pull), 0.0, 1.0) - a.y;
    return a;
}

ExecResult execute(const ClothState& state, const PickPull& action,
                   const ClothParams& params, const ExecConfig& cfg) {
    ExecResult res;
    res.state = state;
    ClothState& s = res.state;

    double ex = std::clamp(action.x + action.dx, 0.0, 1.0);
    double ey = std::clamp(action.y + action.dy, 0.0, 1.0);
    float dx = float(ex - action.x), dy = float(ey - action.y);
    res.truncated = (ex != action.x + action.dx) || (ey != action.y + action.dy);

    // grasp: points near the pick in the plane, top layer only
    const float px = float(action.x), py = float(action.y);
    const float r2 = cfg.grasp_radius * cfg.grasp_radius;
    std::vector<int> candidates;
    float zmax = -1.0f;
    for (int i = 0; i < s.npoints(); ++i) {
        float ddx = s.pos[i].x - px, ddy = s.pos[i].y - py;
        if (ddx * ddx + ddy * ddy <= r2) {
            candidates.push_back(i);
            zmax = std::max(zmax, s.pos[i].z);
        }
    }
    std::vector<int> pins;
    for (int i : candidates)
        if (s.pos[i].z >= zmax - cfg.top_layer_band && !s.pinned[i]) pins.push_back(i);
    if (pins.empty()) return res;
    res.grasped = true;
    res.pinned_count = int(pins.size());
    for (int i : pins) pin(s, i);

    auto move_pins = [&](float mx, float my, float mz) {
        for (int i : pins) {
            s.pos[i] += Vec3(mx, my, mz);
            s.prev[i] = s.pos[i];
        }
    };

    // lift straight up, then drag at fixed height
    float dist = std::sqrt(dx * dx + dy * dy);
    float height = std::min(cfg.lift_max, cfg.lift_height + cfg.lift_per_pull * dist);
    float lift = height - zmax;
    if (lift > 0.0f) {
        int steps = std::max(1, int(std::ceil(lift / cfg.drag_step)));
        for (int t = 0; t < steps; ++t) {
            move_pins(0.0f, 0.0f, lift / float(steps));
            step_inplace(s, params);
        }
    }
    if (dist > 0.0f) {
        int steps = std::max(1, int(std::ceil(dist / cfg.drag_step)));
        for (int t = 0; t < steps; ++t) {
            move_pins(dx / float(steps), dy / float(steps), 0.0f);
            step_inplace(s, params);
        }
    }

    for (int t = 0; t < cfg.hold_steps; ++t) step_inplace(s, params);
    for (int i : pins) unpin(s, i);
    settle(s, params, cfg.settle_tol, cfg.settle_max_steps);
    return res;
}

}  // namespace fabsim
