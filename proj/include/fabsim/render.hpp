#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fabsim/cloth.hpp"
#include "fabsim/rng.hpp"

namespace fabsim {

struct Observation {
    static constexpr int width = 56;
    static constexpr int height = 56;
    static constexpr int channels = 4;

    std::vector<float> px;  // row-major, channel-interleaved, values in [0,255]

    Observation() : px(size_t(width) * height * channels, 0.0f) {}

    float& at(int row, int col, int c) {
        return px[(size_t(row) * width + col) * channels + c];
    }
    float at(int row, int col, int c) const {
        return px[(size_t(row) * width + col) * channels + c];
    }
};

struct RenderConfig {
    std::array<float, 3> fabric_rgb_top{25.0f, 89.0f, 217.0f};
    std::array<float, 3> fabric_rgb_bottom{0.0f, 29.0f, 157.0f};
    std::array<float, 3> plane_rgb{128.0f, 128.0f, 128.0f};
    float gamma = 1.0f;
    float depth_offset = 40.0f;      // depth value of the support plane (z = 0)
    float pixel_noise_amp = 0.0f;
    std::array<float, 2> camera_jitter{0.0f, 0.0f};
    uint64_t rng_seed = 0;
};

// Sampling ranges for per-episode randomization. A zero-width range keeps the
// base value for that field and consumes no rng draws.
struct RandomizeRanges {
    std::array<float, 3> fabric_lo{0.0f, 0.0f, 128.0f};
    std::array<float, 3> fabric_hi{115.0f, 179.0f, 255.0f};
    std::array<float, 3> plane_lo{102.0f, 102.0f, 102.0f};
    std::array<float, 3> plane_hi{153.0f, 153.0f, 153.0f};
    float gamma_lo = 0.7f, gamma_hi = 1.3f;
    float depth_lo = 40.0f, depth_hi = 50.0f;
    float jitter_std = 0.04f;
    float noise_amp = 15.0f;
};

// Fixed RGB delta between the top and bottom fabric faces.
inline constexpr float kUndersideDelta = 60.0f;

// Depth channel: plane at depth_offset, slope chosen so z = 0.2 maps to 255
// when the offset sits at its default of 40.
inline constexpr float kDepthSlope = (255.0f - 40.0f) / 0.2f;

inline constexpr float kOobMargin = 0.25f;
inline constexpr int kCoverageGrid = 200;

// One grid quad splits along its main diagonal into two triangles, both
// counterclockwise in the plane for a flat cloth.
std::vector<std::array<int, 3>> mesh_triangles(int n);

struct RasterHit {
    int tri = -1;    // -1 where no triangle covers the pixel center
    float z = 0.0f;  // surface height of the topmost triangle
};

// Inclusive point-in-triangle test plus barycentric height, in double
// precision. Shared by the rasterizer and the brute-force test oracle so the
// two agree bit for bit.
bool tri_hit(const Vec3& a, const Vec3& b, const Vec3& c, double sx, double sy, double* z_out);

// Z-buffered rasterization over a w x h grid of pixel centers spanning
// [0,1]^2, each shifted by (jx, jy). Ties in z keep the lower triangle index.
void rasterize_triangles(const std::vector<Vec3>& pts,
                         const std::vector<std::array<int, 3>>& tris, int w, int h, float jx,
                         float jy, std::vector<RasterHit>& out);

Observation render(const ClothState& state, const RenderConfig& cfg);

// Percentage of coverage-grid cell centers inside any projected triangle.
double coverage(const ClothState& state);

// True when any point strays outside the margin around the unit plane.
bool out_of_bounds(const ClothState& state);

RenderConfig randomize_render(const RenderConfig& base, const RandomizeRanges& ranges, Rng& rng);

void write_ppm(const std::string& path, const Observation& obs);
void write_pgm(const std::string& path, const Observation& obs);

}  // namespace fabsim
