#include "fabsim/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fabsim {

std::vector<std::array<int, 3>> mesh_triangles(int n) {
    std::vector<std::array<int, 3>> tris;
    tris.reserve(size_t(2) * (n - 1) * (n - 1));
    for (int r = 0; r < n - 1; ++r) {
        for (int c = 0; c < n - 1; ++c) {
            int a = r * n + c;
            int b = r * n + c + 1;
            int d = (r + 1) * n + c + 1;
            int e = (r + 1) * n + c;
            tris.push_back({a, b, d});
            tris.push_back({a, d, e});
        }
    }
    return tris;
}

bool tri_hit(const Vec3& a, const Vec3& b, const Vec3& c, double sx, double sy, double* z_out) {
    double e0 = (double(b.x) - a.x) * (sy - a.y) - (double(b.y) - a.y) * (sx - a.x);
    double e1 = (double(c.x) - b.x) * (sy - b.y) - (double(c.y) - b.y) * (sx - b.x);
    double e2 = (double(a.x) - c.x) * (sy - c.y) - (double(a.y) - c.y) * (sx - c.x);
    bool inside = (e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0);
    if (!inside) return false;
    double area = e0 + e1 + e2;  // equals twice the signed triangle area
    if (area == 0) return false;
    if (z_out) {
        // barycentric weights: the edge function opposite each vertex
        *z_out = (e1 * a.z + e2 * b.z + e0 * c.z) / area;
    }
    return true;
}

void rasterize_triangles(const std::vector<Vec3>& pts,
                         const std::vector<std::array<int, 3>>& tris, int w, int h, float jx,
                         float jy, std::vector<RasterHit>& out) {
    out.assign(size_t(w) * h, RasterHit{});
    for (int t = 0; t < int(tris.size()); ++t) {
        const Vec3& a = pts[tris[t][0]];
        const Vec3& b = pts[tris[t][1]];
        const Vec3& c = pts[tris[t][2]];
        float xmin = std::min({a.x, b.x, c.x}) - jx;
        float xmax = std::max({a.x, b.x, c.x}) - jx;
        float ymin = std::min({a.y, b.y, c.y}) - jy;
        float ymax = std::max({a.y, b.y, c.y}) - jy;
        // pixel centers at (p + 0.5)/w + jitter; cover the triangle's bbox
        int c0 = std::max(0, int(std::floor(xmin * w - 0.5f)) - 1);
        int c1 = std::min(w - 1, int(std::ceil(xmax * w - 0.5f)) + 1);
        int r0 = std::max(0, int(std::floor(ymin * h - 0.5f)) - 1);
        int r1 = std::min(h - 1, int(std::ceil(ymax * h - 0.5f)) + 1);
        for (int r = r0; r <= r1; ++r) {
            double sy = (r + 0.5) / h + jy;
            for (int cc = c0; cc <= c1; ++cc) {
                double sx = (cc + 0.5) / w + jx;
                double z;
                if (!tri_hit(a, b, c, sx, sy, &z)) continue;
                RasterHit& hit = out[size_t(r) * w + cc];
                if (hit.tri < 0 || z > hit.z) hit = RasterHit{t, float(z)};
            }
        }
    }
}

Observation render(const ClothState& state, const RenderConfig& cfg) {
    auto tris = mesh_triangles(state.n);
    std::vector<RasterHit> hits;
    rasterize_triangles(state.pos, tris, Observation::width, Observation::height,
                        cfg.camera_jitter[0], cfg.camera_jitter[1], hits);

    std::vector<uint8_t> up(tris.size());
    for (size_t t = 0; t < tris.size(); ++t) {
        const Vec3& a = state.pos[tris[t][0]];
        const Vec3& b = state.pos[tris[t][1]];
        const Vec3& c = state.pos[tris[t][2]];
        double area2 = (double(b.x) - a.x) * (double(c.y) - a.y)
                     - (double(b.y) - a.y) * (double(c.x) - a.x);
        up[t] = area2 >= 0;
    }

    Observation obs;
    for (int r = 0; r < Observation::height; ++r) {
        for (int c = 0; c < Observation::width; ++c) {
            const RasterHit& hit = hits[size_t(r) * Observation::width + c];
            const std::array<float, 3>* rgb = &cfg.plane_rgb;
            float z = 0.0f;
            if (hit.tri >= 0) {
                rgb = up[hit.tri] ? &cfg.fabric_rgb_top : &cfg.fabric_rgb_bottom;
                z = hit.z;
            }
            for (int ch = 0; ch < 3; ++ch) obs.at(r, c, ch) = (*rgb)[ch];
            obs.at(r, c, 3) = cfg.depth_offset + z * kDepthSlope;
        }
    }

    if (cfg.gamma != 1.0f) {
        for (int r = 0; r < Observation::height; ++r)
            for (int c = 0; c < Observation::width; ++c)
                for (int ch = 0; ch < 3; ++ch) {
                    float v = std::clamp(obs.at(r, c, ch), 0.0f, 255.0f);
                    obs.at(r, c, ch) = 255.0f * std::pow(v / 255.0f, cfg.gamma);
                }
    }

    if (cfg.pixel_noise_amp != 0.0f) {
        Rng noise(cfg.rng_seed);
        double amp = cfg.pixel_noise_amp;
        for (float& v : obs.px) v += float(noise.uniform(-amp, amp));
    }

    for (float& v : obs.px) v = std::clamp(v, 0.0f, 255.0f);
    return obs;
}

double coverage(const ClothState& state) {
    auto tris = mesh_triangles(state.n);
    std::vector<RasterHit> hits;
    rasterize_triangles(state.pos, tris, kCoverageGrid, kCoverageGrid, 0.0f, 0.0f, hits);
    size_t covered = 0;
    for (const RasterHit& h : hits) covered += h.tri >= 0;
    return 100.0 * double(covered) / double(hits.size());
}

bool out_of_bounds(const ClothState& state) {
    for (const Vec3& p : state.pos) {
        if (p.x < -kOobMargin || p.x > 1.0f + kOobMargin) return true;
        if (p.y < -kOobMargin || p.y > 1.0f + kOobMargin) return true;
    }
    return false;
}

RenderConfig randomize_render(const RenderConfig& base, const RandomizeRanges& ranges, Rng& rng) {
    bool fabric = ranges.fabric_lo != ranges.fabric_hi;
    bool plane = ranges.plane_lo != ranges.plane_hi;
    bool gamma = ranges.gamma_lo != ranges.gamma_hi;
    bool depth = ranges.depth_lo != ranges.depth_hi;
    bool jitter = ranges.jitter_std != 0.0f;
    if (!fabric && !plane && !gamma && !depth && !jitter) return base;

    RenderConfig out = base;
    if (fabric) {
        for (int ch = 0; ch < 3; ++ch) {
            out.fabric_rgb_top[ch] =
                float(rng.uniform(ranges.fabric_lo[ch], ranges.fabric_hi[ch]));
            out.fabric_rgb_bottom[ch] = std::max(0.0f, out.fabric_rgb_top[ch] - kUndersideDelta);
        }
    }
    if (plane) {
        for (int ch = 0; ch < 3; ++ch)
            out.plane_rgb[ch] = float(rng.uniform(ranges.plane_lo[ch], ranges.plane_hi[ch]));
    }
    if (gamma) out.gamma = float(rng.uniform(ranges.gamma_lo, ranges.gamma_hi));
    if (depth) out.depth_offset = float(rng.uniform(ranges.depth_lo, ranges.depth_hi));
    if (jitter) {
        out.camera_jitter[0] = float(rng.normal(0.0, ranges.jitter_std));
        out.camera_jitter[1] = float(rng.normal(0.0, ranges.jitter_std));
    }
    out.pixel_noise_amp = ranges.noise_amp;
    out.rng_seed = rng.bits();
    return out;
}

static void write_pnm(const std::string& path, const Observation& obs, bool color) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "P%c\n%d %d\n255\n", color ? '6' : '5', Observation::width,
                 Observation::height);
    for (int r = 0; r < Observation::height; ++r) {
        for (int c = 0; c < Observation::width; ++c) {
            if (color) {
                for (int ch = 0; ch < 3; ++ch) {
                    uint8_t b = uint8_t(std::clamp(obs.at(r, c, ch), 0.0f, 255.0f) + 0.5f);
                    std::fputc(b, f);
                }
            } else {
                uint8_t b = uint8_t(std::clamp(obs.at(r, c, 3), 0.0f, 255.0f) + 0.5f);
                std::fputc(b, f);
            }
        }
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

void write_ppm(const std::string& path, const Observation& obs) { write_pnm(path, obs, true); }

void write_pgm(const std::string& path, const Observation& obs) { write_pnm(path, obs, false); }

}  // namespace fabsim
