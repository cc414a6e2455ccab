// scratch calibration probe, not part of the shipped tool set
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "fabsim/action.hpp"
#include "fabsim/render.hpp"
#include "fabsim/policy.hpp"
#include "fabsim/optimize.hpp"
#include "fabsim/plan.hpp"
#include "fabsim/cloth.hpp"
#include "fabsim/rng.hpp"

using namespace fabsim;

static double coverage_pct(const ClothState& s) { return coverage(s); }

static float max_stretch(const ClothState& s) {
    const SpringTopology& t = *s.topo;
    float worst = 0.0f;
    for (int i = 0; i < s.npoints(); ++i)
        for (int e = t.offset[i]; e < t.offset[i + 1]; ++e) {
            float len = (s.pos[i] - s.pos[t.nbr[e]]).norm();
            worst = std::max(worst, len / t.rest[e]);
        }
    return worst;
}

static float max_abs_z(const ClothState& s) {
    float m = 0;
    for (auto& p : s.pos) m = std::max(m, std::abs(p.z));
    return m;
}

static bool blown_up(const ClothState& s) {
    for (auto& p : s.pos)
        if (!p.finite() || std::abs(p.x) > 10 || std::abs(p.y) > 10 || std::abs(p.z) > 10)
            return true;
    return false;
}

// rigid rotate about horizontal axis through centroid, then place above plane
static void tilt_and_raise(ClothState& s, float angle, float axis_angle, float base_z) {
    float cx = 0, cy = 0;
    for (auto& p : s.pos) { cx += p.x; cy += p.y; }
    cx /= s.npoints(); cy /= s.npoints();
    float ax = std::cos(axis_angle), ay = std::sin(axis_angle);
    float ca = std::cos(angle), sa = std::sin(angle);
    float zmin = 1e9f;
    for (auto& p : s.pos) {
        float rx = p.x - cx, ry = p.y - cy;
        float along = rx * ax + ry * ay;      // unchanged component
        float perp = -rx * ay + ry * ax;      // rotates into z
        float nperp = perp * ca;
        float nz = perp * sa;
        p.x = cx + along * ax - nperp * ay;
        p.y = cy + along * ay + nperp * ax;
        p.z = nz;
        zmin = std::min(zmin, p.z);
    }
    for (auto& p : s.pos) p.z += base_z - zmin;
    for (size_t i = 0; i < s.pos.size(); ++i) s.prev[i] = s.pos[i];
}

int main(int argc, char** argv) {
    std::string mode = argc > 1 ? argv[1] : "all";
    ClothParams P;
    ExecConfig E;

    if (mode == "time" || mode == "all") {
        ClothState s = init_flat(P);
        // crumple it first so self-collision has work to do
        Rng rng(7);
        for (int k = 0; k < 3; ++k) {
            auto a = sample_action(s, {0.4}, 0.0, rng);
            if (a) s = execute(s, *a, P, E).state;
        }
        auto t0 = std::chrono::steady_clock::now();
        const int N = 20000;
        for (int i = 0; i < N; ++i) step_inplace(s, P);
        auto t1 = std::chrono::steady_clock::now();
        double us = std::chrono::duration<double, std::micro>(t1 - t0).count() / N;
        printf("[time] %.2f us/step (crumpled, n=%d)\n", us, P.n);
    }

    if (mode == "flat" || mode == "all") {
        ClothState s = init_flat(P);
        ClothState s2 = s;
        float d = 0;
        for (int i = 0; i < 100; ++i) d = std::max(d, step_inplace(s2, P));
        bool same = std::memcmp(s.pos.data(), s2.pos.data(), s.pos.size() * sizeof(Vec3)) == 0;
        printf("[flat] bitwise stationary=%d maxdisp=%g cov=%.2f\n", int(same), d, coverage_pct(s2));
    }

    if (mode == "drop" || mode == "all") {
        ClothState s = init_flat(P);
        for (auto& p : s.pos) p.z += 0.1f;
        for (size_t i = 0; i < s.pos.size(); ++i) s.prev[i] = s.pos[i];
        int steps = settle(s, P, E.settle_tol, 2000);
        printf("[drop0.1] settle=%d maxz=%g stretch=%.3f blown=%d cov=%.2f\n", steps,
               max_abs_z(s), max_stretch(s), int(blown_up(s)), coverage_pct(s));
    }

    if (mode == "fold" || mode == "all") {
        ClothState s = init_flat(P);
        PickPull a{0.0, 0.0, 0.95, 0.95};
        auto t0 = std::chrono::steady_clock::now();
        auto r = execute(s, a, P, E);
        auto t1 = std::chrono::steady_clock::now();
        printf("[fold] grasped=%d pins=%d cov=%.2f stretch=%.3f blown=%d exec_ms=%.2f\n",
               int(r.grasped), r.pinned_count, coverage_pct(r.state), max_stretch(r.state),
               int(blown_up(r.state)),
               std::chrono::duration<double, std::milli>(t1 - t0).count());
        // second fold on top for the double-fold shape
        ClothState s2 = r.state;
        PickPull b{1.0, 1.0, -0.5, -0.5};
        auto r2 = execute(s2, b, P, E);
        printf("[fold2] grasped=%d cov=%.2f stretch=%.3f\n", int(r2.grasped),
               coverage_pct(r2.state), max_stretch(r2.state));
        // half fold: corner to center
        ClothState s3 = init_flat(P);
        auto r3 = execute(s3, PickPull{0.0, 0.0, 0.5, 0.5}, P, E);
        printf("[fold_half] cov=%.2f\n", coverage_pct(r3.state));
    }

    if (mode == "tier1" || mode == "all") {
        double sum = 0, mn = 1e9, mx = -1e9;
        const int K = 20;
        for (int seed = 0; seed < K; ++seed) {
            Rng rng(1000 + seed);
            ClothState s = tier_start(1, rng, P);
            double c = coverage_pct(s);
            sum += c; mn = std::min(mn, c); mx = std::max(mx, c);
        }
        printf("[tier1] mean=%.1f min=%.1f max=%.1f (target band 68..88)\n", sum / K, mn, mx);
    }

    if (mode == "tier2" || mode == "all") {
        double sum = 0, mn = 1e9, mx = -1e9;
        const int K = 20;
        for (int seed = 0; seed < K; ++seed) {
            Rng rng(2000 + seed);
            ClothState s = tier_start(2, rng, P);
            double c = coverage_pct(s);
            sum += c; mn = std::min(mn, c); mx = std::max(mx, c);
        }
        printf("[tier2] mean=%.1f min=%.1f max=%.1f (target band 47..68)\n", sum / K, mn, mx);
    }

    if (mode == "tier3" || mode == "all") {
        double sum = 0, mn = 1e9, mx = -1e9;
        const int K = 20;
        for (int seed = 0; seed < K; ++seed) {
            Rng rng(3000 + seed);
            ClothState s = tier_start(3, rng, P);
            double c = coverage_pct(s);
            sum += c; mn = std::min(mn, c); mx = std::max(mx, c);
        }
        printf("[tier3] mean=%.1f min=%.1f max=%.1f (target band 31..51)\n", sum / K, mn, mx);
    }

    if (mode == "t1fric") {
        for (float grasp : {0.04f, 0.06f, 0.08f}) {
            for (float lift : {0.3f, 0.4f}) {
                ClothParams pf = P;
                double sum = 0, mn = 1e9, mx = -1e9;
                const int K = 16;
                for (int seed = 0; seed < K; ++seed) {
                    Rng rng(1000 + seed);
                    ClothState s = init_flat(pf);
                    ExecConfig e1 = E;
                    e1.lift_height = lift; e1.lift_per_pull = 0;
                    e1.grasp_radius = grasp;
                    int boundary = 0;
                    for (int k = 0; k < 2; ++k) {
                        double x, y;
                        if (boundary) {
                            // pick a boundary vertex
                            int m = s.n - 1;
                            int side_pick = rng.uniform_int(4);
                            int t = rng.uniform_int(s.n);
                            int idx = side_pick == 0 ? s.index(0, t)
                                    : side_pick == 1 ? s.index(m, t)
                                    : side_pick == 2 ? s.index(t, 0)
                                                     : s.index(t, m);
                            x = std::clamp(double(s.pos[idx].x), 0.0, 1.0);
                            y = std::clamp(double(s.pos[idx].y), 0.0, 1.0);
                        } else {
                            auto bb = fabric_bbox(s);
                            x = rng.uniform(std::max(0.0f, bb[0]), std::min(1.0f, bb[2]));
                            y = rng.uniform(std::max(0.0f, bb[1]), std::min(1.0f, bb[3]));
                        }
                        double dx = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.15, 0.2);
                        double dy = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.15, 0.2);
                        s = execute(s, PickPull{x, y, dx, dy}, pf, e1).state;
                    }
                    double c = coverage_pct(s);
                    sum += c; mn = std::min(mn, c); mx = std::max(mx, c);
                }
                printf("[t1fric] grasp=%.2f lift=%.2f mean=%.1f min=%.1f max=%.1f\n", grasp,
                       lift, sum / K, mn, mx);
            }
        }
    }

    if (mode == "t1var") {
        // tier1 variants: lift height x delta magnitude range
        for (float lift : {0.05f, 0.15f, 0.25f, 0.35f}) {
            for (double dlo : {0.0, 0.12}) {
                double sum = 0, mn = 1e9, mx = -1e9;
                const int K = 16;
                for (int seed = 0; seed < K; ++seed) {
                    Rng rng(1000 + seed);
                    ClothState s = init_flat(P);
                    ExecConfig e1 = E;
                    e1.lift_height = lift; e1.lift_per_pull = 0; e1.grasp_radius = 0.04f;
                    for (int k = 0; k < 2; ++k) {
                        auto bb = fabric_bbox(s);
                        double x = rng.uniform(std::max(0.0f, bb[0]), std::min(1.0f, bb[2]));
                        double y = rng.uniform(std::max(0.0f, bb[1]), std::min(1.0f, bb[3]));
                        double mag = rng.uniform(dlo, 0.2);
                        double sgnx = rng.uniform() < 0.5 ? -1 : 1;
                        double sgny = rng.uniform() < 0.5 ? -1 : 1;
                        double dx = sgnx * mag, dy = sgny * rng.uniform(dlo, 0.2);
                        s = execute(s, PickPull{x, y, dx, dy}, P, e1).state;
                    }
                    double c = coverage_pct(s);
                    sum += c; mn = std::min(mn, c); mx = std::max(mx, c);
                }
                printf("[t1var] lift=%.2f dlo=%.2f mean=%.1f min=%.1f max=%.1f\n", lift, dlo,
                       sum / K, mn, mx);
            }
        }
    }

    if (mode == "t3var") {
        for (float grasp : {0.03f, 0.06f}) {
            for (int hold : {0, 30}) {
              for (double tmag : {0.25, 0.35}) {
                float lift = 0.8f;
                double sum = 0, mn = 1e9, mx = -1e9;
                const int K = 12;
                for (int seed = 0; seed < K; ++seed) {
                    Rng rng(3000 + seed);
                    ClothState s = init_flat(P);
                    double cx = 0.5 + rng.uniform(-0.04, 0.04);
                    double cy = 0.5 + rng.uniform(-0.04, 0.04);
                    double ang = rng.uniform(0, 6.283);
                    double tx = tmag * std::cos(ang), ty = tmag * std::sin(ang);
                    ExecConfig e3 = E;
                    e3.lift_height = lift; e3.lift_per_pull = 0; e3.lift_max = 1.0f;
                    e3.grasp_radius = grasp; e3.hold_steps = hold;
                    auto r = execute(s, PickPull{cx, cy, tx, ty}, P, e3);
                    double c = coverage_pct(r.state);
                    sum += c; mn = std::min(mn, c); mx = std::max(mx, c);
                }
                printf("[t3var] grasp=%.2f hold=%d tmag=%.2f mean=%.1f min=%.1f max=%.1f\n",
                       grasp, hold, tmag, sum / K, mn, mx);
              }
            }
        }
    }

    if (mode == "foldshape") {
        ClothState s = init_flat(P);
        auto r = execute(s, PickPull{0.0, 0.0, 0.95, 0.95}, P, E);
        const ClothState& f = r.state;
        auto bb = fabric_bbox(f);
        printf("bbox [%.3f %.3f]x[%.3f %.3f] cov=%.2f\n", bb[0], bb[2], bb[1], bb[3],
               coverage_pct(f));
        for (int c : corner_indices(f))
            printf("corner %d: (%.3f %.3f %.3f)\n", c, f.pos[c].x, f.pos[c].y, f.pos[c].z);
        // z map, 25x25 coarse
        for (int rr = f.n - 1; rr >= 0; rr -= 2) {
            for (int cc = 0; cc < f.n; cc += 2) {
                float z = f.pos[f.index(rr, cc)].z;
                putchar(z > 0.03f ? '#' : (z > 0.012f ? '+' : (z > 0.004f ? '.' : ' ')));
            }
            putchar('\n');
        }
    }

    if (mode == "cgrid") {
        const float tx[4] = {0, 1, 0, 1}, ty[4] = {0, 0, 1, 1};
        for (int variant = 0; variant < 4; ++variant) {
            {
                ClothParams pg = P;
                ExecConfig ec = E;
                if (variant == 0) { ec.lift_per_pull = 0; ec.lift_height = 0.45f; }
                if (variant == 1) { ec.lift_height = 0.05f; ec.lift_per_pull = 1.0f; ec.lift_max = 0.9f; }
                if (variant == 2) { ec.lift_height = 0.03f; ec.lift_per_pull = 0.8f; ec.lift_max = 0.6f; ec.hold_steps = 30; }
                if (variant == 3) { ec.lift_height = 0.05f; ec.lift_per_pull = 1.2f; ec.lift_max = 0.7f; ec.hold_steps = 30; }
                for (int tier = 2; tier <= 3; ++tier) {
                    double sum = 0; int acts = 0; const int K = 6;
                    for (int seed = 0; seed < K; ++seed) {
                        Rng rng(4000 + 97 * seed + tier);
                        ClothState s = init_flat(pg);
                        if (tier == 2) {
                            float angle = float(rng.uniform(1.05, 1.4));
                            float axis = float(rng.uniform(0, 6.283));
                            tilt_and_raise(s, angle, axis, 0.05f);
                            settle(s, pg, E.settle_tol, 3000);
                            s = execute(s, PickPull{s.pos[0].x, s.pos[0].y, 0.3, 0.3}, pg, E).state;
                            int edge = s.index(0, s.n / 3);
                            s = execute(s, PickPull{s.pos[edge].x, s.pos[edge].y, -0.15, 0.15}, pg, E).state;
                        } else {
                            ExecConfig e3 = E;
                            e3.lift_height = 0.8f; e3.lift_per_pull = 0; e3.lift_max = 1.0f;
                            double ang = rng.uniform(0, 6.283);
                            s = execute(s, PickPull{0.5 + rng.uniform(-0.04, 0.04),
                                                    0.5 + rng.uniform(-0.04, 0.04),
                                                    0.35 * std::cos(ang), 0.35 * std::sin(ang)},
                                        pg, e3).state;
                        }
                        double cov = coverage_pct(s);
                        for (int a = 0; a < 15 && cov < 92.0; ++a) {
                            auto ci = corner_indices(s);
                            int best = 0; double bd = -1;
                            for (int c = 0; c < 4; ++c) {
                                double d = std::hypot(s.pos[ci[c]].x - tx[c], s.pos[ci[c]].y - ty[c]);
                                if (d > bd) { bd = d; best = c; }
                            }
                            const Vec3& p = s.pos[ci[best]];
                            double dx = std::clamp(double(tx[best] - p.x), -0.4, 0.4);
                            double dy = std::clamp(double(ty[best] - p.y), -0.4, 0.4);
                            s = execute(s, PickPull{std::clamp(double(p.x), 0.0, 1.0),
                                                    std::clamp(double(p.y), 0.0, 1.0), dx, dy},
                                        pg, ec).state;
                            cov = coverage_pct(s);
                            ++acts;
                        }
                        sum += cov;
                    }
                    printf("[cgrid] variant=%d tier%d mean=%.1f acts=%.1f\n", variant, tier, sum / K, double(acts) / K);
                }
            }
        }
    }

    if (mode == "retract") {
        for (float drag : {0.0125f, 0.005f}) {
            for (int hold : {0, 40}) {
                for (float lift : {0.05f, 0.3f}) {
                    ClothState s = init_flat(P);
                    ExecConfig ec = E;
                    ec.drag_step = drag;
                    ec.lift_height = lift; ec.lift_per_pull = 0;
                    ec.hold_steps = hold;
                    auto r = execute(s, PickPull{0.0, 0.0, 0.5, 0.5}, P, ec);
                    const Vec3& c0 = r.state.pos[0];
                    printf("[retract] drag=%.4f hold=%d lift=%.2f corner=(%.3f %.3f) miss=%.3f cov=%.1f\n",
                           drag, hold, lift, c0.x, c0.y, std::hypot(c0.x - 0.5, c0.y - 0.5),
                           coverage_pct(r.state));
                }
            }
        }
    }

    if (mode == "cshape") {
        const float tx[4] = {0, 1, 0, 1}, ty[4] = {0, 0, 1, 1};
        ExecConfig ec = E;
        ec.lift_height = 0.45f; ec.lift_per_pull = 0;
        for (int tier : {2, 3}) {
            Rng rng(4000 + 97 * 2 + tier);
            ClothState s = init_flat(P);
            if (tier == 2) {
                float angle = float(rng.uniform(1.05, 1.4));
                float axis = float(rng.uniform(0, 6.283));
                tilt_and_raise(s, angle, axis, 0.05f);
                settle(s, P, E.settle_tol, 3000);
            } else {
                ExecConfig e3 = E;
                e3.lift_height = 0.8f; e3.lift_per_pull = 0; e3.lift_max = 1.0f;
                double ang = rng.uniform(0, 6.283);
                s = execute(s, PickPull{0.5, 0.5, 0.35 * std::cos(ang), 0.35 * std::sin(ang)},
                            P, e3).state;
            }
            double cov = coverage_pct(s);
            printf("tier%d start cov=%.1f\n", tier, cov);
            for (int a = 0; a < 15 && cov < 92.0; ++a) {
                auto ci = corner_indices(s);
                int best = 0; double bd = -1;
                for (int c = 0; c < 4; ++c) {
                    double d = std::hypot(s.pos[ci[c]].x - tx[c], s.pos[ci[c]].y - ty[c]);
                    if (d > bd) { bd = d; best = c; }
                }
                const Vec3& p = s.pos[ci[best]];
                double dx = std::clamp(double(tx[best] - p.x), -0.4, 0.4);
                double dy = std::clamp(double(ty[best] - p.y), -0.4, 0.4);
                s = execute(s, PickPull{std::clamp(double(p.x), 0.0, 1.0),
                                        std::clamp(double(p.y), 0.0, 1.0), dx, dy}, P, ec).state;
                cov = coverage_pct(s);
                printf("  act%d corner%d dist=%.2f -> cov=%.1f\n", a, best, bd, cov);
            }
            auto ci = corner_indices(s);
            for (int c = 0; c < 4; ++c)
                printf("  corner%d at (%.3f %.3f) target (%.0f %.0f)\n", c, s.pos[ci[c]].x,
                       s.pos[ci[c]].y, tx[c], ty[c]);
            auto bb = fabric_bbox(s);
            printf("  bbox [%.3f %.3f]x[%.3f %.3f]\n", bb[0], bb[2], bb[1], bb[3]);
            for (int rr = s.n - 1; rr >= 0; rr -= 2) {
                for (int cc = 0; cc < s.n; cc += 2) {
                    float z = s.pos[s.index(rr, cc)].z;
                    putchar(z > 0.03f ? '#' : (z > 0.012f ? '+' : (z > 0.004f ? '.' : ' ')));
                }
                putchar('\n');
            }
        }
    }

    if (mode == "cgrid3") {
        for (int variant : {0, 1, 2}) {
            ExecConfig ec = E;
            ec.lift_height = 0.20f;
            if (variant == 1) { ec.hold_steps = 40; ec.settle_max_steps = 600; }
            if (variant == 2) { ec.lift_per_pull = 1.5f; ec.lift_max = 0.8f; }
            float lh = float(variant);
            ClothState f = init_flat(P);
            f = execute(f, corner_pull_policy(f), P, ec).state;
            printf("[cgrid3] lift=%.2f tier0 after_corner_pull cov=%.2f\n", lh, coverage_pct(f));
            for (int tier = 1; tier <= 3; ++tier) {
                double sum = 0; int acts = 0; const int K = 40;
                for (int seed = 0; seed < K; ++seed) {
                    Rng rng(4000 + 97 * seed + tier);
                    ClothState s = tier_start(tier, rng, P);
                    double cov = coverage_pct(s);
                    for (int a = 0; a < 15 && cov < 92.0; ++a) {
                        s = execute(s, corner_pull_policy(s), P, ec).state;
                        cov = coverage_pct(s);
                        ++acts;
                    }
                    sum += cov;
                }
                printf("[cgrid3] lift=%.2f tier%d mean=%.1f acts=%.1f\n", lh, tier, sum / K,
                       double(acts) / K);
            }
        }
    }

    if (mode == "opt") {
        auto sphere = [](const std::vector<double>& x) {
            double s = 0;
            for (double v : x) s += v * v;
            return s;
        };
        {
            Rng rng(1);
            auto r = cem_minimize(sphere, 20, {}, rng);
            printf("[opt] cem sphere20 best=%.3g (need <1e-4)\n", r.best_f);
        }
        {
            Rng rng(2);
            auto r = cmaes_minimize(sphere, 20, {}, rng);
            printf("[opt] cma sphere20 best=%.3g restarts=%d (need <1e-6)\n", r.best_f,
                   r.trace.restarts);
        }
        {
            auto rosen = [](const std::vector<double>& x) {
                double s = 0;
                for (size_t i = 0; i + 1 < x.size(); ++i) {
                    double a = x[i + 1] - x[i] * x[i], b = 1 - x[i];
                    s += 100 * a * a + b * b;
                }
                return s;
            };
            Rng rng(3);
            auto r = cmaes_minimize(rosen, 4, {}, rng);
            printf("[opt] cma rosen4 best=%.3g (need <1e-4)\n", r.best_f);
        }
        {
            auto shifted = [](const std::vector<double>& x) {
                double s = 0;
                for (double v : x) s += (v - 0.3) * (v - 0.3);
                return s;
            };
            Rng rng(4);
            CemConfig cc;
            auto r = cem_minimize(shifted, 1, cc, rng);
            printf("[opt] cem quad1 best_x=%.4f (need 0.3 +- 1e-2)\n", r.best_x[0]);
            Rng rng2(5);
            auto r2 = cmaes_minimize(shifted, 20, {}, rng2);
            double worst = 0;
            for (double v : r2.best_x) worst = std::max(worst, std::abs(v - 0.3));
            printf("[opt] cma shift20 max|x-0.3|=%.3g (need <1e-2)\n", worst);
        }
        {
            auto sphere2 = [](const std::vector<double>& x) {
                double s = 0;
                for (double v : x) s += v * v;
                return s;
            };
            Rng rng(7);
            CemConfig cc;
            cc.init_mean.assign(20, 1.0);
            auto r = cem_minimize(sphere2, 20, cc, rng);
            printf("[opt] cem sphere20 from ones best=%.3g (need <1e-4)\n", r.best_f);
        }
        {
            auto shifted4 = [](const std::vector<double>& x) {
                double s = 0;
                for (double v : x) s += (v - 0.3) * (v - 0.3);
                return s;
            };
            Rng rng(8);
            auto r = cem_minimize(shifted4, 4, {}, rng);
            double worst = 0;
            for (double v : r.best_x) worst = std::max(worst, std::abs(v - 0.3));
            printf("[opt] cem shift4 max|x-0.3|=%.3g (need <1e-2)\n", worst);
        }
        {
            auto con = [](const std::vector<double>&) { return 7.5; };
            Rng rng(6);
            auto r = cmaes_minimize(con, 6, {}, rng);
            printf("[opt] cma const best=%.2f restarts=%d\n", r.best_f, r.trace.restarts);
        }
    }

    if (mode == "cgrid2") {
        for (float lh : {0.05f, 0.12f, 0.20f}) {
            for (float ds : {0.0125f, 0.008f}) {
                ExecConfig ec = E;
                ec.lift_height = lh; ec.drag_step = ds;
                for (int tier = 2; tier <= 3; ++tier) {
                    double sum = 0; int acts = 0; const int K = 12;
                    for (int seed = 0; seed < K; ++seed) {
                        Rng rng(4000 + 97 * seed + tier);
                        ClothState s = tier_start(tier, rng, P);
                        double cov = coverage_pct(s);
                        for (int a = 0; a < 15 && cov < 92.0; ++a) {
                            s = execute(s, corner_pull_policy(s), P, ec).state;
                            cov = coverage_pct(s);
                            ++acts;
                        }
                        sum += cov;
                    }
                    printf("[cgrid2] lift=%.2f drag=%.4f tier%d mean=%.1f acts=%.1f\n",
                           lh, ds, tier, sum / K, double(acts) / K);
                }
            }
        }
    }

    if (mode == "ctrace") {
        for (int tier = 2; tier <= 3; ++tier) {
            for (int seed = 0; seed < 3; ++seed) {
                Rng rng(4000 + 97 * seed + tier);
                ClothState s = tier_start(tier, rng, P);
                double cov = coverage_pct(s);
                printf("[ctrace] tier%d seed%d start cov=%.1f\n", tier, seed, cov);
                for (int a = 0; a < 15 && cov < 92.0; ++a) {
                    PickPull act = corner_pull_policy(s);
                    auto res = execute(s, act, P, E);
                    s = res.state;
                    cov = coverage_pct(s);
                    auto ci = corner_indices(s);
                    const double tx[4] = {0, 1, 0, 1}, ty[4] = {0, 0, 1, 1};
                    double worst = 0;
                    for (int k = 0; k < 4; ++k)
                        worst = std::max(worst,
                                         std::hypot(s.pos[ci[k]].x - tx[k], s.pos[ci[k]].y - ty[k]));
                    printf("  a%02d cov=%.1f pull=(%.2f,%.2f) grasp=%d worstcorner=%.3f maxz=%.3f\n",
                           a, cov, act.dx, act.dy, int(res.pinned_count), worst, max_abs_z(s));
                }
            }
        }
    }

    if (mode == "corner" || mode == "damp") {
        ClothParams pd = P;
        if (mode == "damp") pd.damping = 0.99f;
        for (int tier = 1; tier <= 3; ++tier) {
            double sum = 0; int acts = 0; const int K = 20;
            auto t0 = std::chrono::steady_clock::now();
            for (int seed = 0; seed < K; ++seed) {
                Rng rng(4000 + 97 * seed + tier);
                ClothState s = tier_start(tier, rng, pd);
                double cov = coverage_pct(s);
                for (int a = 0; a < 15 && cov < 92.0; ++a) {
                    PickPull act = corner_pull_policy(s);
                    s = execute(s, act, pd, E).state;
                    cov = coverage_pct(s);
                    ++acts;
                }
                sum += cov;
            }
            auto t1 = std::chrono::steady_clock::now();
            printf("[%s] tier%d mean_final=%.1f actions_avg=%.1f wall_s=%.1f\n", mode.c_str(),
                   tier, sum / K, double(acts) / K,
                   std::chrono::duration<double>(t1 - t0).count());
        }
    }


    if (mode == "raise" || mode == "all") {
        ClothParams p0 = P;
        p0.gravity = 0.0f;
        ClothState s = init_flat(p0);
        int mid = s.index(12, 12);
        s.pos[mid].z += 0.01f;
        s.prev[mid] = s.pos[mid];
        float z0 = s.pos[mid].z;
        step_inplace(s, p0);
        printf("[raise] z before=%g after=%g (must decrease)\n", z0, s.pos[mid].z);
    }

    if (mode == "goal") {
        RenderConfig R;
        for (int k = 0; k < 3; ++k) {
            auto t0 = std::chrono::steady_clock::now();
            Goal g = make_goal(GoalKind(k), P, R);
            auto t1 = std::chrono::steady_clock::now();
            double cov = coverage(g.mesh);
            // center depth vs a flat sheet's depth at the same pixel
            int ci = g.obs.height / 2 * g.obs.width + g.obs.width / 2;
            float depth = g.obs.px[ci * 4 + 3];
            std::vector<PickPull> zeros(5);
            double czp = evaluate_sequence(g.mesh, zeros, g, CostKind::pixel, P, E, R);
            double czv = evaluate_sequence(g.mesh, zeros, g, CostKind::vertex, P, E, R);
            printf("[goal%d] cov=%.2f center_depth=%.1f zeroseq px=%.2f vx=%.4f (%.1fs)\n", k,
                   cov, depth, czp, czv,
                   std::chrono::duration<double>(t1 - t0).count());
        }
    }

    if (mode == "goaldbg") {
        RenderConfig R;
        for (int k = 1; k < 3; ++k) {
            Goal g = make_goal(GoalKind(k), P, R);
            float cx = 0, cy = 0, zmax = 0;
            for (auto& p : g.mesh.pos) { cx += p.x; cy += p.y; zmax = std::max(zmax, p.z); }
            cx /= g.mesh.npoints(); cy /= g.mesh.npoints();
            // stack height near plane center: max z among points within 0.08
            float zc = 0; int nn = 0;
            for (auto& p : g.mesh.pos)
                if (std::abs(p.x - 0.5f) < 0.08f && std::abs(p.y - 0.5f) < 0.08f) { zc = std::max(zc, p.z); ++nn; }
            auto c4 = corner_indices(g.mesh);
            printf("[goaldbg%d] centroid=(%.3f,%.3f) zmax=%.3f z@center=%.3f npts@center=%d\n", k,
                   cx, cy, zmax, zc, nn);
            printf("  corners:");
            for (int q = 0; q < 4; ++q)
                printf(" (%.2f,%.2f,%.3f)", g.mesh.pos[c4[q]].x, g.mesh.pos[c4[q]].y, g.mesh.pos[c4[q]].z);
            printf("\n  depth rows (every 8px):\n");
            for (int r = 4; r < 56; r += 8) {
                printf("   ");
                for (int c = 4; c < 56; c += 4) printf("%4.0f", g.obs.at(r, c, 3));
                printf("\n");
            }
        }
    }

    if (mode == "f2dbg") {
        // rebuild fold2 move by move, mapping point counts and max z per cell
        ClothState s = init_flat(P);
        auto ci = corner_indices(s);
        auto report = [&](const ClothState& q, const char* tag) {
            int cnt[7][7] = {};
            float zm[7][7] = {};
            for (auto& p : q.pos) {
                int cx = std::clamp(int(p.x * 7), 0, 6);
                int cy = std::clamp(int(p.y * 7), 0, 6);
                cnt[cy][cx]++;
                zm[cy][cx] = std::max(zm[cy][cx], p.z);
            }
            printf("-- %s: counts | maxz*100\n", tag);
            for (int r = 6; r >= 0; --r) {
                printf("   ");
                for (int c = 0; c < 7; ++c) printf("%4d", cnt[r][c]);
                printf("   |");
                for (int c = 0; c < 7; ++c) printf("%4.0f", zm[r][c] * 100);
                printf("\n");
            }
        };
        report(s, "flat");
        {
            ClothState t = s;
            // inline carry of corner 3 to center, mirroring plan.cpp constants
            pin(t, ci[3]);
            Vec3 a = t.pos[ci[3]];
            double dx = 0.5 - a.x, dy = 0.5 - a.y;
            double dist = std::sqrt(dx * dx + dy * dy);
            int nsteps = std::max(1, int(std::ceil(dist / 0.0125)));
            for (int i = 1; i <= nsteps; ++i) {
                double tt = double(i) / nsteps;
                double ground = 0.08 * tt;
                double z = ground + (0.25 - ground) * std::sin(3.141592653589793 * tt);
                t.pos[ci[3]] = {float(a.x + dx * tt), float(a.y + dy * tt), float(z)};
                t.prev[ci[3]] = t.pos[ci[3]];
                step_inplace(t, P);
            }
            report(t, "dragged, pinned at 0.08");
            for (int i = 0; i < 150; ++i) step_inplace(t, P);
            report(t, "held 150");
            unpin(t, ci[3]);
            int st = settle(t, P, 1e-4f, 4000);
            printf("   settle=%d\n", st);
            report(t, "released+settled");
            s = t;
        }
    }

    if (mode == "calib") {
        auto t0 = std::chrono::steady_clock::now();
        Calibration c = calibrate_thresholds(20);
        auto t1 = std::chrono::steady_clock::now();
        printf("[calib] px succ_max=%.2f fail_min=%.2f th=%.2f | vx succ_max=%.4f fail_min=%.4f th=%.4f | sep=%d (%.1fs)\n",
               c.pixel_success_max, c.pixel_failure_min, c.thresholds.pixel,
               c.vertex_success_max, c.vertex_failure_min, c.thresholds.vertex,
               int(c.separable), std::chrono::duration<double>(t1 - t0).count());
    }

    if (mode == "mpc") {
        int tier = argc > 2 ? atoi(argv[2]) : 1;
        int nep = argc > 3 ? atoi(argv[3]) : 1;
        int coarse = argc > 4 ? atoi(argv[4]) : 0;
        PlannerConfig C;
        C.cem.population = 400;
        C.cem.iterations = 5;
        if (coarse == 1) {
            C.rollout_exec.drag_step = 0.03f;
            C.rollout_exec.hold_steps = 4;
            C.rollout_exec.settle_tol = 1e-3f;
            C.rollout_exec.settle_max_steps = 120;
        } else if (coarse == 2) {
            C.rollout_exec.drag_step = 0.05f;
            C.rollout_exec.hold_steps = 2;
            C.rollout_exec.settle_tol = 2e-3f;
            C.rollout_exec.settle_max_steps = 60;
        }
        Goal g = make_goal(GoalKind::smooth, P, C.render);
        double sum = 0;
        for (int ep = 0; ep < nep; ++ep) {
            Rng rng(900 + 31 * ep);
            ClothState s = tier_start(tier, rng, P);
            auto t0 = std::chrono::steady_clock::now();
            Rng prng = rng.fork(77);
            EpisodeResult r = run_episode(s, g, C, prng);
            auto t1 = std::chrono::steady_clock::now();
            sum += r.coverage.back();
            printf("[mpc t%d ep%d] cov %.1f -> %.1f actions=%zu term=%d (%.1fs)\n", tier, ep,
                   r.coverage.front(), r.coverage.back(), r.actions.size(), int(r.termination),
                   std::chrono::duration<double>(t1 - t0).count());
        }
        printf("[mpc t%d] mean final cov=%.2f over %d\n", tier, sum / nep, nep);
    }

    if (mode == "planstep") {
        PlannerConfig C;
        C.cem.population = 400;
        C.cem.iterations = 5;
        Goal g = make_goal(GoalKind::smooth, P, C.render);
        Rng rng(900);
        ClothState s = tier_start(1, rng, P);
        Rng prng = rng.fork(77);
        auto t0 = std::chrono::steady_clock::now();
        PickPull a = plan_step(s, g, C, prng);
        auto t1 = std::chrono::steady_clock::now();
        printf("[planstep] a=(%.3f,%.3f,%.3f,%.3f) %.1fs for %d evals\n", a.x, a.y, a.dx, a.dy,
               std::chrono::duration<double>(t1 - t0).count(),
               C.cem.population * C.cem.iterations + C.cem.iterations + 1);
    }

    if (mode == "foldplan") {
        int nep = argc > 2 ? atoi(argv[2]) : 3;
        double thpx = argc > 3 ? atof(argv[3]) : 0.0;
        double thvx = argc > 4 ? atof(argv[4]) : 0.0;
        PlannerConfig C;
        C.bounds.max_pull = 0.6;
        C.corner_bias = 0.3;
        C.cem.population = 300;
        C.cem.iterations = 5;
        C.max_actions = 3;
        C.thresholds = {thpx, thvx};
        Goal g = make_goal(GoalKind::fold1, P, C.render);
        int wins = 0;
        for (int ep = 0; ep < nep; ++ep) {
            ClothState s = init_flat(P);
            Rng prng(1200 + 17 * ep);
            auto t0 = std::chrono::steady_clock::now();
            EpisodeResult r = run_episode(s, g, C, prng);
            auto t1 = std::chrono::steady_clock::now();
            wins += r.success;
            printf("[foldplan ep%d] success=%d actions=%zu cost=%.2f (%.1fs)\n", ep,
                   int(r.success), r.actions.size(), r.final_cost,
                   std::chrono::duration<double>(t1 - t0).count());
        }
        printf("[foldplan] %d/%d\n", wins, nep);
    }
    return 0;
}
