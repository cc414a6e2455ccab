#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "fabsim/cost.hpp"
#include "fabsim/data.hpp"

using namespace fabsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

EpisodeRecord random_record(std::uint64_t seed, int n = 5, int T = 12) {
    Rng rng(seed);
    EpisodeRecord rec;
    rec.n = n;
    rec.T = T;
    rec.seed = seed * 31 + 7;
    const std::size_t frames = std::size_t(T) + 1;
    rec.meshes.resize(frames * rec.mesh_floats());
    rec.observations.resize(frames * rec.obs_floats());
    rec.actions.resize(std::size_t(T) * 4);
    rec.coverage.resize(frames);
    for (float& v : rec.meshes) v = float(rng.uniform(-1.0, 1.0));
    for (float& v : rec.observations) v = float(rng.uniform(0.0, 255.0));
    for (float& v : rec.actions) v = float(rng.uniform(-0.6, 0.6));
    for (float& v : rec.coverage) v = float(rng.uniform(0.0, 100.0));
    rec.render.gamma = 1.1f;
    rec.render.pixel_noise_amp = 9.5f;
    rec.render.camera_jitter = {0.01f, -0.02f};
    rec.render.rng_seed = 424242;
    return rec;
}

std::vector<char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("episode file size formula") {
    TempDir dir("fabsim_test_size");
    const EpisodeRecord rec = random_record(1);
    const fs::path path = dir.path / "ep.fvsf";
    write_episode(rec, path.string());
    CHECK(fs::file_size(path) == episode_file_size(rec.n, rec.T, rec.obs_w, rec.obs_h,
                                                    rec.obs_c));
    // spelled out for the default observation shape
    const std::size_t expected = 28 +
                                 std::size_t(rec.T + 1) * (rec.n * rec.n * 12 + 56 * 56 * 4 * 4) +
                                 std::size_t(rec.T) * 16 + (rec.T + 1) * 4 + 14 * 4 + 8 + 8;
    CHECK(fs::file_size(path) == expected);
}

TEST_CASE("write then read is the identity") {
    TempDir dir("fabsim_test_roundtrip");
    const EpisodeRecord rec = random_record(2);
    const fs::path path = dir.path / "ep.fvsf";
    write_episode(rec, path.string());
    const EpisodeRecord back = read_episode(path.string());
    CHECK(back.n == rec.n);
    CHECK(back.T == rec.T);
    CHECK(back.obs_w == rec.obs_w);
    CHECK(back.obs_h == rec.obs_h);
    CHECK(back.obs_c == rec.obs_c);
    CHECK(back.meshes == rec.meshes);
    CHECK(back.observations == rec.observations);
    CHECK(back.actions == rec.actions);
    CHECK(back.coverage == rec.coverage);
    CHECK(back.render.fabric_rgb_top == rec.render.fabric_rgb_top);
    CHECK(back.render.fabric_rgb_bottom == rec.render.fabric_rgb_bottom);
    CHECK(back.render.plane_rgb == rec.render.plane_rgb);
    CHECK(back.render.gamma == rec.render.gamma);
    CHECK(back.render.depth_offset == rec.render.depth_offset);
    CHECK(back.render.pixel_noise_amp == rec.render.pixel_noise_amp);
    CHECK(back.render.camera_jitter == rec.render.camera_jitter);
    CHECK(back.render.rng_seed == rec.render.rng_seed);
    CHECK(back.seed == rec.seed);
}

TEST_CASE("malformed files are reported, not crashed on") {
    TempDir dir("fabsim_test_malformed");
    const EpisodeRecord rec = random_record(3);
    const fs::path path = dir.path / "ep.fvsf";
    write_episode(rec, path.string());

    SUBCASE("truncated in the middle of the observations") {
        const std::vector<char> bytes = slurp(path);
        const fs::path cut = dir.path / "cut.fvsf";
        std::ofstream out(cut, std::ios::binary);
        out.write(bytes.data(), std::streamsize(bytes.size() / 2));
        out.close();
        CHECK_THROWS_WITH_AS(read_episode(cut.string()),
                             doctest::Contains("truncated"), std::runtime_error);
    }

    SUBCASE("bad magic") {
        std::vector<char> bytes = slurp(path);
        bytes[0] = 'X';
        const fs::path bad = dir.path / "bad.fvsf";
        std::ofstream out(bad, std::ios::binary);
        out.write(bytes.data(), std::streamsize(bytes.size()));
        out.close();
        CHECK_THROWS_WITH_AS(read_episode(bad.string()), doctest::Contains("magic"),
                             std::runtime_error);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_episode((dir.path / "nope.fvsf").string()), std::runtime_error);
    }
}

TEST_CASE("observation slices rebuild renderer frames") {
    Rng rng(4);
    EpisodeRecord rec;
    rec.n = 25;
    rec.T = 1;
    rec.meshes.resize(2 * rec.mesh_floats());
    rec.observations.resize(2 * rec.obs_floats());
    rec.actions.resize(4);
    rec.coverage.resize(2);
    for (float& v : rec.observations) v = float(rng.uniform(0.0, 255.0));
    const Observation o = rec.obs_at(1);
    CHECK(o.px == std::vector<float>(rec.observations.begin() + rec.obs_floats(),
                                     rec.observations.end()));
}

TEST_CASE("dataset recipes") {
    const DatasetConfig old_cfg = dataset_old();
    CHECK(old_cfg.episode_len == 15);
    CHECK(old_cfg.bounds.max_pull == 0.4);
    CHECK(old_cfg.corner_bias == 0.0);
    const DatasetConfig new_cfg = dataset_new();
    CHECK(new_cfg.episode_len == 10);
    CHECK(new_cfg.bounds.max_pull == 0.6);
    CHECK(new_cfg.corner_bias == 0.3);
}

TEST_CASE("dataset generation writes what the manifest says") {
    TempDir dir("fabsim_test_gen");
    DatasetConfig cfg = dataset_old(2, 9);
    cfg.episode_len = 3;
    const DatasetManifest m = generate_dataset(cfg, dir.path.string());
    REQUIRE(m.files.size() == 2);
    int episode_files = 0, manifests = 0;
    for (const auto& e : fs::directory_iterator(dir.path)) {
        if (e.path().extension() == ".fvsf") ++episode_files;
        if (e.path().filename() == "manifest.json") ++manifests;
    }
    CHECK(episode_files == 2);
    CHECK(manifests == 1);

    for (const std::string& f : m.files) {
        const EpisodeRecord rec = read_episode((dir.path / f).string());
        CHECK(rec.T == cfg.episode_len);
        CHECK(rec.n == cfg.cloth.n);
        for (std::size_t i = 0; i < rec.actions.size(); i += 4) {
            CHECK(std::abs(rec.actions[i + 2]) <= cfg.bounds.max_pull + 1e-6);
            CHECK(std::abs(rec.actions[i + 3]) <= cfg.bounds.max_pull + 1e-6);
        }
    }
    CHECK(m.max_abs_delta <= cfg.bounds.max_pull + 1e-6);
}

TEST_CASE("dataset generation is byte deterministic") {
    TempDir a("fabsim_test_det_a");
    TempDir b("fabsim_test_det_b");
    DatasetConfig cfg = dataset_new(3, 77);
    cfg.episode_len = 2;
    const DatasetManifest ma = generate_dataset(cfg, a.path.string());
    const DatasetManifest mb = generate_dataset(cfg, b.path.string());
    REQUIRE(ma.files == mb.files);
    for (const std::string& f : ma.files) CHECK(slurp(a.path / f) == slurp(b.path / f));
    CHECK(slurp(a.path / "manifest.json") == slurp(b.path / "manifest.json"));

    DatasetConfig other = cfg;
    other.seed = 78;
    TempDir c("fabsim_test_det_c");
    generate_dataset(other, c.path.string());
    CHECK(slurp(a.path / ma.files[0]) != slurp(c.path / ma.files[0]));
}

TEST_CASE("corner-pick bookkeeping tracks the bias") {
    TempDir dir("fabsim_test_bias");
    DatasetConfig cfg = dataset_new(30, 5);
    const DatasetManifest m = generate_dataset(cfg, dir.path.string());
    CHECK(m.corner_pick_fraction >= 0.20);
    CHECK(m.corner_pick_fraction <= 0.40);

    TempDir dir2("fabsim_test_bias0");
    DatasetConfig none = dataset_old(4, 5);
    none.episode_len = 3;
    const DatasetManifest m0 = generate_dataset(none, dir2.path.string());
    CHECK(m0.corner_pick_fraction == 0.0);
}

TEST_CASE("cost pair sampling") {
    SUBCASE("identical meshes label zero and the flip pattern holds") {
        EpisodeRecord rec;
        rec.n = 4;
        rec.T = 9;
        rec.meshes.assign(std::size_t(rec.T + 1) * rec.mesh_floats(), 0.5f);
        rec.observations.resize(std::size_t(rec.T + 1) * rec.obs_floats(), 0.0f);
        rec.actions.resize(std::size_t(rec.T) * 4, 0.0f);
        rec.coverage.resize(rec.T + 1, 100.0f);
        const auto pairs = sample_cost_pairs(rec);
        REQUIRE(pairs.size() == 10);
        int flipped = 0;
        for (const auto& p : pairs) {
            CHECK(p.label == 0.0);
            flipped += p.flipped ? 1 : 0;
        }
        CHECK(flipped == 5);
        // the fixed probe schedule, with every second pair stored reversed
        CHECK(pairs[0].a == 0);
        CHECK(pairs[0].b == 1);
        CHECK(pairs[1].a == 2);
        CHECK(pairs[1].b == 0);
        CHECK(pairs[4].a == 5);
        CHECK(pairs[4].b == 7);
    }

    SUBCASE("labels match the mesh distance oracle") {
        const EpisodeRecord rec = random_record(6, 25, 9);
        const auto pairs = sample_cost_pairs(rec);
        const int npts = rec.n * rec.n;
        for (const auto& p : pairs) {
            const float* ma = rec.mesh_at(p.a);
            const float* mb = rec.mesh_at(p.b);
            double want = 0.0;
            for (int k = 0; k < npts; ++k) {
                const double dx = double(ma[3 * k]) - double(mb[3 * k]);
                const double dy = double(ma[3 * k + 1]) - double(mb[3 * k + 1]);
                const double dz = double(ma[3 * k + 2]) - double(mb[3 * k + 2]);
                want += dx * dx + dy * dy + dz * dz;
            }
            CHECK(std::abs(p.label - want) <= 1e-9 * std::max(1.0, want));
        }
    }

    SUBCASE("too-short episodes are rejected") {
        EpisodeRecord rec = random_record(7, 4, 8);  // 9 states, need 10
        CHECK_THROWS_AS(sample_cost_pairs(rec), std::invalid_argument);
    }
}

TEST_CASE("cost pair export") {
    TempDir dir("fabsim_test_pairs");
    std::vector<EpisodeRecord> recs = {random_record(8, 6, 11), random_record(9, 6, 11)};
    const fs::path path = dir.path / "pairs.fvcp";
    export_cost_pairs(recs, path.string());

    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "FVCP");
    std::uint32_t version = 0, count = 0, w = 0, h = 0, c = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&count), 4);
    in.read(reinterpret_cast<char*>(&w), 4);
    in.read(reinterpret_cast<char*>(&h), 4);
    in.read(reinterpret_cast<char*>(&c), 4);
    CHECK(version == 1);
    CHECK(count == 20);
    CHECK(w == 56);
    CHECK(h == 56);
    CHECK(c == 4);

    const std::size_t frame = std::size_t(56) * 56 * 4 * 4;
    CHECK(fs::file_size(path) == 24 + count * (2 * frame + 4));

    // labels are scaled into [0, 1] by the largest pair distance on export
    float max_label = 0.0f;
    for (std::uint32_t i = 0; i < count; ++i) {
        in.seekg(std::streamoff(24 + (i + 1) * (2 * frame + 4) - 4));
        float label = -1.0f;
        in.read(reinterpret_cast<char*>(&label), 4);
        CHECK(label >= 0.0f);
        CHECK(label <= 1.0f);
        max_label = std::max(max_label, label);
    }
    CHECK(max_label == 1.0f);
}
