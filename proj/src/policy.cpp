#include "fabsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fabsim/render.hpp"

namespace fabsim {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Rigid rotation of the whole cloth about a horizontal axis through its
// centroid, then raised so the lowest point sits at base_z.
void tilt_and_raise(ClothState& s, float angle, float axis_angle, float base_z) {
    float cx = 0, cy = 0, cz = 0;
    for (const Vec3& p : s.pos) { cx += p.x; cy += p.y; cz += p.z; }
    float inv = 1.0f / float(s.npoints());
    cx *= inv; cy *= inv; cz *= inv;
    float ax = std::cos(axis_angle), ay = std::sin(axis_angle);
    float ca = std::cos(angle), sa = std::sin(angle);
    float zmin = 1e30f;
    for (Vec3& p : s.pos) {
        float rx = p.x - cx, ry = p.y - cy, rz = p.z - cz;
        // Rodrigues rotation about unit axis (ax, ay, 0)
        float dot = rx * ax + ry * ay;
        float crx = ay * rz, cry = -ax * rz, crz = ax * ry - ay * rx;
        Vec3 q{cx + rx * ca + crx * sa + ax * dot * (1 - ca),
               cy + ry * ca + cry * sa + ay * dot * (1 - ca),
               cz + rz * ca + crz * sa};
        p = q;
        zmin = std::min(zmin, q.z);
    }
    for (Vec3& p : s.pos) {
        p.z += base_z - zmin;
        p.z = std::max(p.z, 0.0f);
    }
    for (size_t i = 0; i < s.pos.size(); ++i) s.prev[i] = s.pos[i];
}

ClothState tier1_attempt(Rng& rng, const ClothParams& params, const TierParams& tp,
                         const ExecConfig& base) {
    ClothState s = init_flat(params);
    ExecConfig e = base;
    e.grasp_radius = tp.t1_grasp;
    e.lift_height = tp.t1_lift;
    e.lift_per_pull = 0;
    e.hold_steps = 0;
    for (int k = 0; k < tp.t1_actions; ++k) {
        auto bb = fabric_bbox(s);
        double x = rng.uniform(std::max(0.0f, bb[0]), std::min(1.0f, bb[2]));
        double y = rng.uniform(std::max(0.0f, bb[1]), std::min(1.0f, bb[3]));
        double sx = rng.uniform() < 0.5 ? -1 : 1;
        double mx = rng.uniform(tp.t1_mag_lo, tp.t1_mag_hi);
        double sy = rng.uniform() < 0.5 ? -1 : 1;
        double my = rng.uniform(tp.t1_mag_lo, tp.t1_mag_hi);
        s = execute(s, PickPull{x, y, sx * mx, sy * my}, params, e).state;
    }
    return s;
}

ClothState tier2_attempt(Rng& rng, const ClothParams& params, const TierParams& tp,
                         const ExecConfig& base) {
    ClothState s = init_flat(params);
    float angle = float(rng.uniform(tp.t2_angle_lo, tp.t2_angle_hi));
    float axis = float(rng.uniform(0.0, kTwoPi));
    tilt_and_raise(s, angle, axis, tp.t2_drop_base);
    settle(s, params, base.settle_tol, tp.t2_drop_settle);
    ExecConfig e = base;
    e.grasp_radius = tp.t2_grasp;
    e.lift_height = tp.t2_lift;
    e.lift_per_pull = 0;
    e.hold_steps = 0;
    s = execute(s, PickPull{s.pos[0].x, s.pos[0].y, tp.t2_fold_pull, tp.t2_fold_pull}, params, e)
            .state;
    int edge = s.index(0, s.n / 3);
    s = execute(s,
                PickPull{s.pos[edge].x, s.pos[edge].y, -tp.t2_drag_pull, tp.t2_drag_pull},
                params, e)
            .state;
    return s;
}

ClothState tier3_attempt(Rng& rng, const ClothParams& params, const TierParams& tp,
                         const ExecConfig& base) {
    ClothState s = init_flat(params);
    double cx = 0.5 + rng.uniform(-tp.t3_center_jitter, tp.t3_center_jitter);
    double cy = 0.5 + rng.uniform(-tp.t3_center_jitter, tp.t3_center_jitter);
    double ang = rng.uniform(0.0, kTwoPi);
    ExecConfig e = base;
    e.grasp_radius = tp.t3_grasp;
    e.lift_height = tp.t3_lift;
    e.lift_per_pull = 0;
    e.lift_max = tp.t3_lift_max;
    e.hold_steps = 0;
    return execute(s,
                   PickPull{cx, cy, tp.t3_translate * std::cos(ang),
                            tp.t3_translate * std::sin(ang)},
                   params, e)
        .state;
}

}  // namespace

ClothState tier_start(int tier, Rng& rng, const ClothParams& params, const TierParams& tp) {
    if (tier < 0 || tier > 3) throw std::invalid_argument("tier must be in 0..3");
    if (tier == 0) return init_flat(params);

    const ExecConfig base{};
    ClothState out = init_flat(params);
    for (int attempt = 0; attempt < tp.max_attempts; ++attempt) {
        Rng r = rng.fork(uint64_t(attempt));
        switch (tier) {
            case 1: out = tier1_attempt(r, params, tp, base); break;
            case 2: out = tier2_attempt(r, params, tp, base); break;
            default: out = tier3_attempt(r, params, tp, base); break;
        }
        double cov = coverage(out);
        if (cov >= tp.band_lo[tier] && cov <= tp.band_hi[tier]) break;
    }
    return out;
}

PickPull random_policy(const ClothState& state, const ActionBounds& bounds, Rng& rng) {
    auto a = sample_action(state, bounds, 0.0, rng);
    return a ? *a : PickPull{0.5, 0.5, 0.0, 0.0};
}

namespace {

PickPull pull_toward(const ClothState& state, int idx, double tx, double ty,
                     const ActionBounds& bounds) {
    const Vec3& p = state.pos[idx];
    double x = std::clamp(double(p.x), 0.0, 1.0);
    double y = std::clamp(double(p.y), 0.0, 1.0);
    double dx = std::clamp(tx - double(p.x), -bounds.max_pull, bounds.max_pull);
    double dy = std::clamp(ty - double(p.y), -bounds.max_pull, bounds.max_pull);
    return PickPull{x, y, dx, dy};
}

}  // namespace

PickPull highest_policy(const ClothState& state, const ActionBounds& bounds) {
    int best = 0;
    for (int i = 1; i < state.npoints(); ++i)
        if (state.pos[i].z > state.pos[best].z) best = i;
    float h = 1.0f / float(state.n - 1);
    int r = best / state.n, c = best % state.n;
    return pull_toward(state, best, c * h, r * h, bounds);
}

PickPull corner_pull_policy(const ClothState& state, const ActionBounds& bounds) {
    auto ci = corner_indices(state);
    const double tx[4] = {0, 1, 0, 1};
    const double ty[4] = {0, 0, 1, 1};
    int best = 0;
    double bd = -1;
    for (int k = 0; k < 4; ++k) {
        const Vec3& p = state.pos[ci[k]];
        double d = std::hypot(p.x - tx[k], p.y - ty[k]);
        if (d > bd) { bd = d; best = k; }
    }
    return pull_toward(state, ci[best], tx[best], ty[best], bounds);
}

PickPull wrinkle_policy(const ClothState& state, const ActionBounds& bounds) {
    const int n = state.n;
    const float kRidgeThreshold = 0.005f;
    std::vector<float> score(state.npoints(), 0.0f);
    int peak = -1;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            float sum = 0;
            int cnt = 0;
            if (r > 0) { sum += state.pos[state.index(r - 1, c)].z; ++cnt; }
            if (r + 1 < n) { sum += state.pos[state.index(r + 1, c)].z; ++cnt; }
            if (c > 0) { sum += state.pos[state.index(r, c - 1)].z; ++cnt; }
            if (c + 1 < n) { sum += state.pos[state.index(r, c + 1)].z; ++cnt; }
            int i = state.index(r, c);
            score[i] = state.pos[i].z - sum / float(cnt);
            if (score[i] > kRidgeThreshold && (peak < 0 || score[i] > score[peak])) peak = i;
        }
    }
    if (peak < 0) return corner_pull_policy(state, bounds);

    // flood-fill the above-threshold component containing the peak
    std::vector<int> set, stack{peak};
    std::vector<uint8_t> seen(state.npoints(), 0);
    seen[peak] = 1;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        set.push_back(i);
        int r = i / n, c = i % n;
        const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
            int rr = r + dr[k], cc = c + dc[k];
            if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
            int j = state.index(rr, cc);
            if (!seen[j] && score[j] > kRidgeThreshold) {
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }

    double mx = 0, my = 0;
    for (int i : set) { mx += state.pos[i].x; my += state.pos[i].y; }
    mx /= double(set.size());
    my /= double(set.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (int i : set) {
        double dx = state.pos[i].x - mx, dy = state.pos[i].y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    sxx /= double(set.size());
    sxy /= double(set.size());
    syy /= double(set.size());

    // principal axis of the 2x2 covariance: ridge direction and extent
    double tr = sxx + syy;
    double disc = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) + 4 * sxy * sxy));
    double lmax = 0.5 * (tr + disc);
    double ex, ey;
    if (std::abs(sxy) > 1e-12) {
        ex = lmax - syy;
        ey = sxy;
    } else {
        ex = sxx >= syy ? 1 : 0;
        ey = sxx >= syy ? 0 : 1;
    }
    double el = std::hypot(ex, ey);
    ex /= el;
    ey /= el;
    double px = -ey, py = ex;  // perpendicular to the ridge

    // nearest boundary vertex to either perpendicular ray from the centroid
    int pick = -1;
    double pick_d = 1e30;
    double pick_sign = 1;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (r != 0 && r != n - 1 && c != 0 && c != n - 1) continue;
            const Vec3& p = state.pos[state.index(r, c)];
            double vx = p.x - mx, vy = p.y - my;
            for (double sign : {1.0, -1.0}) {
                double t = vx * px * sign + vy * py * sign;
                if (t < 0) continue;
                double qx = vx - t * px * sign, qy = vy - t * py * sign;
                double d = std::hypot(qx, qy);
                if (d < pick_d) {
                    pick_d = d;
                    pick = state.index(r, c);
                    pick_sign = sign;
                }
            }
        }
    }
    if (pick < 0) return corner_pull_policy(state, bounds);

    double extent = 3.0 * std::sqrt(lmax);
    double mag = std::clamp(extent, 0.05, bounds.max_pull);
    const Vec3& p = state.pos[pick];
    return pull_toward(state, pick, p.x + px * pick_sign * mag, p.y + py * pick_sign * mag,
                       bounds);
}

}  // namespace fabsim
