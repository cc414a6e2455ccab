#include "fabsim/cloth.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fabsim {

namespace {

// dense 2D cell grid for self-collision candidate lookup
constexpr float kGridLo = -1.0f;
constexpr float kGridHi = 2.0f;

struct StepWorkspace {
    std::vector<Vec3> force;
    std::vector<int> head;
    std::vector<int> next;
    std::vector<int> touched;
    int cells_per_side = 0;
};

StepWorkspace& workspace() {
    thread_local StepWorkspace ws;
    return ws;
}

inline int cell_coord(float v, float inv_cell, int cells) {
    int c = int((v - kGridLo) * inv_cell);
    if (c < 0) c = 0;
    if (c >= cells) c = cells - 1;
    return c;
}

void build_grid(StepWorkspace& ws, const ClothState& s, float radius) {
    const float inv_cell = 1.0f / radius;
    const int cells = int((kGridHi - kGridLo) * inv_cell) + 1;
    if (ws.cells_per_side != cells) {
        ws.cells_per_side = cells;
        ws.head.assign(size_t(cells) * cells, -1);
    } else {
        for (int c : ws.touched) ws.head[c] = -1;
    }
    ws.touched.clear();
    const int np = s.npoints();
    ws.next.resize(np);
    for (int i = 0; i < np; ++i) {
        int cx = cell_coord(s.pos[i].x, inv_cell, cells);
        int cy = cell_coord(s.pos[i].y, inv_cell, cells);
        int c = cy * cells + cx;
        if (ws.head[c] < 0) ws.touched.push_back(c);
        ws.next[i] = ws.head[c];
        ws.head[c] = i;
    }
}

inline Vec3 point_force(const ClothState& s, const ClothParams& p,
                        const StepWorkspace& ws, int i) {
    const SpringTopology& topo = *s.topo;
    const Vec3 pi = s.pos[i];
    Vec3 f(0.0f, 0.0f, -p.gravity * p.mass);
    const float ks[2] = {p.k_struct, p.k_shear};
    for (int e = topo.offset[i]; e < topo.offset[i + 1]; ++e) {
        Vec3 d = pi - s.pos[topo.nbr[e]];
        float len = d.norm();
        if (len > 0.0f) f += d * (ks[topo.shear[e]] * (topo.rest[e] - len) / len);
    }

    const float r = p.self_collision_radius;
    const float r2 = r * r;
    const float inv_cell = 1.0f / r;
    const float damp_gain = p.self_collision_damp * p.mass / (p.dt * p.dt);
    const int cells = ws.cells_per_side;
    const int cx = cell_coord(pi.x, inv_cell, cells);
    const int cy = cell_coord(pi.y, inv_cell, cells);
    const int x0 = cx > 0 ? cx - 1 : 0, x1 = cx < cells - 1 ? cx + 1 : cells - 1;
    const int y0 = cy > 0 ? cy - 1 : 0, y1 = cy < cells - 1 ? cy + 1 : cells - 1;
    for (int gy = y0; gy <= y1; ++gy)
        for (int gx = x0; gx <= x1; ++gx)
            for (int j = ws.head[gy * cells + gx]; j >= 0; j = ws.next[j]) {
                if (j == i) continue;
                Vec3 d = pi - s.pos[j];
                float d2 = d.norm2();
                if (d2 >= r2 || d2 < 1e-12f) continue;
                float len = std::sqrt(d2);
                f += d * (p.self_collision_k * (r - len) / len);
                Vec3 rel = (s.pos[j] - s.prev[j]) - (pi - s.prev[i]);
                f += rel * damp_gain;
            }
    return f;
}

inline float integrate_point(ClothState& s, const ClothParams& p,
                             const Vec3* force, int i) {
    if (s.pinned[i]) {
        s.prev[i] = s.pos[i];
        return 0.0f;
    }
    const Vec3 pos = s.pos[i];
    const Vec3 vel = (pos - s.prev[i]) * p.damping;
    const float dt2_over_m = p.dt * p.dt / p.mass;
    Vec3 cand = pos + vel + force[i] * dt2_over_m;
    Vec3 np, nprev;
    if (cand.z < 0.0f) {
        np = Vec3(cand.x, cand.y, 0.0f);
        nprev = Vec3(np.x - p.friction_retain * (np.x - pos.x),
                     np.y - p.friction_retain * (np.y - pos.y), 0.0f);
    } else {
        np = cand;
        nprev = pos;
    }
    s.pos[i] = np;
    s.prev[i] = nprev;
    return (np - pos).norm2();
}

template <bool Parallel>
float step_impl(ClothState& s, const ClothParams& p) {
    StepWorkspace& ws = workspace();
    build_grid(ws, s, p.self_collision_radius);
    const int np = s.npoints();
    ws.force.resize(np);
    Vec3* force = ws.force.data();
    float max_d2 = 0.0f;
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < np; ++i) force[i] = point_force(s, p, ws, i);
#pragma omp parallel for schedule(static) reduction(max : max_d2)
        for (int i = 0; i < np; ++i) {
            float d2 = integrate_point(s, p, force, i);
            if (d2 > max_d2) max_d2 = d2;
        }
    } else {
        for (int i = 0; i < np; ++i) force[i] = point_force(s, p, ws, i);
        for (int i = 0; i < np; ++i) {
            float d2 = integrate_point(s, p, force, i);
            if (d2 > max_d2) max_d2 = d2;
        }
    }
    return max_d2;
}

}  // namespace

ClothState init_flat(const ClothParams& params) {
    if (params.n < 2) throw std::invalid_argument("init_flat: n must be >= 2");
    if (!(params.side > 0.0f) || !(params.mass > 0.0f) || !(params.dt > 0.0f))
        throw std::invalid_argument("init_flat: side, mass, dt must be positive");
    const int n = params.n;
    ClothState s;
    s.n = n;
    s.pos.resize(size_t(n) * n);
    const float h = params.side / float(n - 1);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) s.pos[s.index(r, c)] = Vec3(c * h, r * h, 0.0f);
    s.prev = s.pos;
    s.pinned.assign(s.pos.size(), 0);

    auto topo = std::make_shared<SpringTopology>();
    topo->n = n;
    topo->offset.resize(s.pos.size() + 1, 0);
    // rest lengths are measured from the flat grid so the flat state carries
    // exactly zero spring force
    const int dr[8] = {0, 0, -1, 1, -1, -1, 1, 1};
    const int dc[8] = {-1, 1, 0, 0, -1, 1, -1, 1};
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            int i = s.index(r, c);
            for (int k = 0; k < 8; ++k) {
                int rr = r + dr[k], cc = c + dc[k];
                if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
                int j = s.index(rr, cc);
                topo->nbr.push_back(j);
                topo->rest.push_back((s.pos[i] - s.pos[j]).norm());
                topo->shear.push_back(k >= 4 ? 1 : 0);
            }
            topo->offset[i + 1] = int(topo->nbr.size());
        }
    s.topo = std::move(topo);
    return s;
}

float step_inplace(ClothState& state, const ClothParams& params) {
    return step_impl<false>(state, params);
}

float step_inplace_parallel(ClothState& state, const ClothParams& params) {
    return step_impl<true>(state, params);
}

ClothState step(const ClothState& state, const ClothParams& params) {
    ClothState out = state;
    step_inplace(out, params);
    return out;
}

ClothState step_parallel(const ClothState& state, const ClothParams& params) {
    ClothState out = state;
    step_inplace_parallel(out, params);
    return out;
}

int settle(ClothState& state, const ClothParams& params, float tol, int max_steps) {
    const float tol2 = tol * tol;
    for (int i = 0; i < max_steps; ++i)
        if (step_inplace(state, params) <= tol2) return i + 1;
    return max_steps;
}

void pin(ClothState& state, int index) {
    if (index < 0 || index >= state.npoints())
        throw std::out_of_range("pin: index out of range");
    state.pinned[index] = 1;
}

void unpin(ClothState& state, int index) {
    if (index < 0 || index >= state.npoints())
        throw std::out_of_range("unpin: index out of range");
    state.pinned[index] = 0;
}

float min_separation(const ClothState& state) {
    const SpringTopology& topo = *state.topo;
    const int np = state.npoints();
    float best = std::numeric_limits<float>::max();
    for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j) {
            bool adjacent = false;
            for (int e = topo.offset[i]; e < topo.offset[i + 1]; ++e)
                if (topo.nbr[e] == j) { adjacent = true; break; }
            if (adjacent) continue;
            float d2 = (state.pos[i] - state.pos[j]).norm2();
            if (d2 < best) best = d2;
        }
    return std::sqrt(best);
}

}  // namespace fabsim
