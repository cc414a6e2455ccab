#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <vector>

#include "fabsim/action.hpp"
#include "fabsim/render.hpp"

using namespace fabsim;

namespace {

// per-pixel reference: loop every triangle at every pixel center, keep the
// highest hit, break z ties toward the lower triangle index
void rasterize_reference(const std::vector<Vec3>& pts,
                         const std::vector<std::array<int, 3>>& tris, int w, int h, float jx,
                         float jy, std::vector<RasterHit>& out) {
    out.assign(size_t(w) * h, {});
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) {
            const double sx = (col + 0.5) / w + jx;
            const double sy = (row + 0.5) / h + jy;
            RasterHit best;
            for (int t = 0; t < int(tris.size()); ++t) {
                double z;
                if (!tri_hit(pts[tris[t][0]], pts[tris[t][1]], pts[tris[t][2]], sx, sy, &z))
                    continue;
                if (best.tri < 0 || z > best.z) best = {t, float(z)};
            }
            out[size_t(row) * w + col] = best;
        }
}

}  // namespace

TEST_CASE("mesh triangulation covers the grid") {
    const auto tris = mesh_triangles(25);
    CHECK(tris.size() == size_t(24 * 24 * 2));
    for (const auto& t : tris)
        for (int v : t) {
            CHECK(v >= 0);
            CHECK(v < 625);
        }
}

TEST_CASE("rasterizer matches the per-pixel reference") {
    Rng rng(21);
    for (int scene = 0; scene < 40; ++scene) {
        const int ntris = 1 + rng.uniform_int(4);
        std::vector<Vec3> pts;
        std::vector<std::array<int, 3>> tris;
        for (int t = 0; t < ntris; ++t) {
            for (int v = 0; v < 3; ++v)
                pts.push_back({float(rng.uniform(-0.2, 1.2)), float(rng.uniform(-0.2, 1.2)),
                               float(rng.uniform(0.0, 0.2))});
            tris.push_back({3 * t, 3 * t + 1, 3 * t + 2});
        }
        const float jx = float(rng.uniform(-0.02, 0.02));
        const float jy = float(rng.uniform(-0.02, 0.02));
        std::vector<RasterHit> fast, slow;
        rasterize_triangles(pts, tris, 56, 56, jx, jy, fast);
        rasterize_reference(pts, tris, 56, 56, jx, jy, slow);
        REQUIRE(fast.size() == slow.size());
        for (size_t i = 0; i < fast.size(); ++i) {
            REQUIRE(fast[i].tri == slow[i].tri);
            if (fast[i].tri >= 0) REQUIRE(fast[i].z == slow[i].z);
        }
    }
}

TEST_CASE("empty scene hits nothing") {
    std::vector<RasterHit> hits;
    rasterize_triangles({}, {}, 56, 56, 0.0f, 0.0f, hits);
    for (const auto& h : hits) CHECK(h.tri == -1);
}

TEST_CASE("flat cloth renders as the top face over the whole frame") {
    const ClothParams p;
    const ClothState s = init_flat(p);
    const RenderConfig cfg;
    const Observation o = render(s, cfg);
    for (int row = 0; row < Observation::height; ++row)
        for (int col = 0; col < Observation::width; ++col) {
            REQUIRE(o.at(row, col, 0) == doctest::Approx(cfg.fabric_rgb_top[0]));
            REQUIRE(o.at(row, col, 1) == doctest::Approx(cfg.fabric_rgb_top[1]));
            REQUIRE(o.at(row, col, 2) == doctest::Approx(cfg.fabric_rgb_top[2]));
            REQUIRE(o.at(row, col, 3) == doctest::Approx(cfg.depth_offset).epsilon(0.05));
        }
}

TEST_CASE("plane shows through where the fabric is not") {
    const ClothParams p;
    ClothState s = init_flat(p);
    for (auto& q : s.pos) {
        q.x *= 0.4f;
        q.y *= 0.4f;
    }
    s.prev = s.pos;
    const RenderConfig cfg;
    const Observation o = render(s, cfg);
    // far corner of the frame is bare plane
    CHECK(o.at(50, 50, 0) == doctest::Approx(cfg.plane_rgb[0]));
    CHECK(o.at(50, 50, 1) == doctest::Approx(cfg.plane_rgb[1]));
    CHECK(o.at(50, 50, 2) == doctest::Approx(cfg.plane_rgb[2]));
    CHECK(o.at(50, 50, 3) == doctest::Approx(cfg.depth_offset));
}

TEST_CASE("diagonal fold shows the bottom face exactly on the folded triangle") {
    const ClothParams p;
    ClothState s = init_flat(p);
    // mirror everything past the main diagonal and float it slightly above
    for (auto& q : s.pos)
        if (q.x + q.y > 1.0f) {
            const float nx = 1.0f - q.y, ny = 1.0f - q.x;
            q.x = nx;
            q.y = ny;
            q.z = 0.01f;
        }
    s.prev = s.pos;
    const RenderConfig cfg;
    const Observation o = render(s, cfg);

    const double margin = 2.5 / 56.0;
    int folded_checked = 0, base_checked = 0;
    for (int row = 0; row < 56; ++row)
        for (int col = 0; col < 56; ++col) {
            const double sx = (col + 0.5) / 56.0;
            const double sy = (row + 0.5) / 56.0;
            // stay clear of the crease and the outer boundary
            if (sx < margin || sy < margin || sx > 1.0 - margin || sy > 1.0 - margin) continue;
            const double diag = 1.0 - sx - sy;
            if (std::abs(diag) < margin) continue;
            // lower triangle: the flap floats above the base layer facing
            // down, so its underside color wins the z-buffer; upper triangle:
            // the fabric left, leaving bare plane
            const auto& want = diag > 0 ? cfg.fabric_rgb_bottom : cfg.plane_rgb;
            for (int c = 0; c < 3; ++c) REQUIRE(o.at(row, col, c) == doctest::Approx(want[c]));
            (diag > 0 ? folded_checked : base_checked) += 1;
        }
    CHECK(folded_checked > 200);
    CHECK(base_checked > 200);
}

TEST_CASE("coverage of the flat cloth and a half-shifted cloth") {
    const ClothParams p;
    ClothState s = init_flat(p);
    CHECK(coverage(s) == doctest::Approx(100.0).epsilon(0.005));
    for (auto& q : s.pos) q.x += 0.5f;
    s.prev = s.pos;
    CHECK(coverage(s) == doctest::Approx(50.0).epsilon(0.02));
}

TEST_CASE("out of bounds trips only past the margin") {
    const ClothParams p;
    ClothState s = init_flat(p);
    CHECK_FALSE(out_of_bounds(s));
    s.pos[0].x = 1.0f + 2.0f * kOobMargin;
    CHECK(out_of_bounds(s));
}

TEST_CASE("full corner pull stays in bounds") {
    const ClothParams p;
    ClothState s = init_flat(p);
    const ExecResult r = execute(s, {0.0, 0.0, 0.6, 0.6}, p);
    REQUIRE(r.grasped);
    CHECK_FALSE(out_of_bounds(r.state));
}

TEST_CASE("depth channel tracks height") {
    const ClothParams p;
    ClothState s = init_flat(p);
    for (auto& q : s.pos) q.z = 0.2f;
    s.prev = s.pos;
    const RenderConfig cfg;
    const Observation o = render(s, cfg);
    CHECK(o.at(28, 28, 3) == doctest::Approx(255.0).epsilon(0.01));
}

TEST_CASE("render randomization") {
    const RenderConfig base;
    RandomizeRanges ranges;

    SUBCASE("zero-width ranges leave the base untouched") {
        ranges.fabric_lo = ranges.fabric_hi = base.fabric_rgb_top;
        ranges.plane_lo = ranges.plane_hi = base.plane_rgb;
        ranges.gamma_lo = ranges.gamma_hi = base.gamma;
        ranges.depth_lo = ranges.depth_hi = base.depth_offset;
        ranges.jitter_std = 0.0f;
        ranges.noise_amp = 0.0f;
        Rng rng(31);
        const RenderConfig out = randomize_render(base, ranges, rng);
        CHECK(out.fabric_rgb_top == base.fabric_rgb_top);
        CHECK(out.plane_rgb == base.plane_rgb);
        CHECK(out.gamma == base.gamma);
        CHECK(out.depth_offset == base.depth_offset);
        CHECK(out.camera_jitter == base.camera_jitter);
        CHECK(out.pixel_noise_amp == base.pixel_noise_amp);
        // and no draws were burned deciding that
        Rng twin(31);
        CHECK(rng.uniform() == twin.uniform());
    }

    SUBCASE("gamma stays in its sampling range") {
        Rng rng(32);
        for (int i = 0; i < 10000; ++i) {
            const RenderConfig out = randomize_render(base, ranges, rng);
            REQUIRE(out.gamma >= 0.7f);
            REQUIRE(out.gamma <= 1.3f);
        }
    }

    SUBCASE("same seed gives the same config") {
        Rng a(33), b(33);
        const RenderConfig x = randomize_render(base, ranges, a);
        const RenderConfig y = randomize_render(base, ranges, b);
        CHECK(x.fabric_rgb_top == y.fabric_rgb_top);
        CHECK(x.fabric_rgb_bottom == y.fabric_rgb_bottom);
        CHECK(x.plane_rgb == y.plane_rgb);
        CHECK(x.gamma == y.gamma);
        CHECK(x.depth_offset == y.depth_offset);
        CHECK(x.camera_jitter == y.camera_jitter);
        CHECK(x.pixel_noise_amp == y.pixel_noise_amp);
        CHECK(x.rng_seed == y.rng_seed);
    }
}

TEST_CASE("noisy renders are reproducible through the config seed") {
    const ClothParams p;
    const ClothState s = init_flat(p);
    RenderConfig cfg;
    cfg.pixel_noise_amp = 15.0f;
    cfg.rng_seed = 99;
    const Observation a = render(s, cfg);
    const Observation b = render(s, cfg);
    CHECK(a.px == b.px);
    cfg.rng_seed = 100;
    const Observation c = render(s, cfg);
    CHECK(a.px != c.px);
}

TEST_CASE("image files carry the right headers") {
    const ClothParams p;
    const ClothState s = init_flat(p);
    const Observation o = render(s, {});
    const std::string ppm = "test_render_out.ppm";
    const std::string pgm = "test_render_out.pgm";
    write_ppm(ppm, o);
    write_pgm(pgm, o);

    std::ifstream fp(ppm, std::ios::binary);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    fp >> magic >> w >> h >> maxval;
    CHECK(magic == "P6");
    CHECK(w == 56);
    CHECK(h == 56);
    CHECK(maxval == 255);
    fp.get();
    std::vector<unsigned char> rgb(56 * 56 * 3);
    fp.read(reinterpret_cast<char*>(rgb.data()), rgb.size());
    CHECK(fp.gcount() == std::streamsize(rgb.size()));

    std::ifstream gp(pgm, std::ios::binary);
    gp >> magic >> w >> h >> maxval;
    CHECK(magic == "P5");
    CHECK(w == 56);
    CHECK(h == 56);

    std::remove(ppm.c_str());
    std::remove(pgm.c_str());
}
