#include "fabsim/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fabsim/cost.hpp"
#include "fabsim/policy.hpp"

static_assert(std::endian::native == std::endian::little,
              "episode files are little-endian and written with raw stores");

namespace fabsim {

namespace {

struct File {
    FILE* f = nullptr;
    explicit File(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {
        if (!f) throw std::runtime_error("cannot open " + path);
    }
    ~File() {
        if (f) std::fclose(f);
    }
    File(const File&) = delete;
    File& operator=(const File&) = delete;
};

void put_bytes(FILE* f, const void* p, std::size_t bytes) {
    if (std::fwrite(p, 1, bytes, f) != bytes) throw std::runtime_error("short write");
}

void put_u32(FILE* f, std::uint32_t v) { put_bytes(f, &v, 4); }
void put_u64(FILE* f, std::uint64_t v) { put_bytes(f, &v, 8); }
void put_f32(FILE* f, float v) { put_bytes(f, &v, 4); }

void get_bytes(FILE* f, void* p, std::size_t bytes, const char* field) {
    if (std::fread(p, 1, bytes, f) != bytes)
        throw std::runtime_error(std::string("episode file truncated reading ") + field);
}

std::uint32_t get_u32(FILE* f, const char* field) {
    std::uint32_t v;
    get_bytes(f, &v, 4, field);
    return v;
}

std::uint64_t get_u64(FILE* f, const char* field) {
    std::uint64_t v;
    get_bytes(f, &v, 8, field);
    return v;
}

// the 14 scalar render fields in declared order
void render_block(const RenderConfig& r, float out[14]) {
    int k = 0;
    for (int i = 0; i < 3; ++i) out[k++] = r.fabric_rgb_top[i];
    for (int i = 0; i < 3; ++i) out[k++] = r.fabric_rgb_bottom[i];
    for (int i = 0; i < 3; ++i) out[k++] = r.plane_rgb[i];
    out[k++] = r.gamma;
    out[k++] = r.depth_offset;
    out[k++] = r.pixel_noise_amp;
    out[k++] = r.camera_jitter[0];
    out[k++] = r.camera_jitter[1];
}

void unrender_block(const float in[14], RenderConfig& r) {
    int k = 0;
    for (int i = 0; i < 3; ++i) r.fabric_rgb_top[i] = in[k++];
    for (int i = 0; i < 3; ++i) r.fabric_rgb_bottom[i] = in[k++];
    for (int i = 0; i < 3; ++i) r.plane_rgb[i] = in[k++];
    r.gamma = in[k++];
    r.depth_offset = in[k++];
    r.pixel_noise_amp = in[k++];
    r.camera_jitter[0] = in[k++];
    r.camera_jitter[1] = in[k++];
}

}  // namespace

Observation EpisodeRecord::obs_at(int t) const {
    if (obs_w != Observation::width || obs_h != Observation::height ||
        obs_c != Observation::channels)
        throw std::runtime_error("episode observation shape does not match the renderer");
    Observation o;
    const float* base = observations.data() + size_t(t) * obs_floats();
    o.px.assign(base, base + obs_floats());
    return o;
}

std::size_t episode_file_size(int n, int T, int obs_w, int obs_h, int obs_c) {
    const std::size_t frames = std::size_t(T) + 1;
    return 28 + frames * (std::size_t(n) * n * 12 + std::size_t(obs_h) * obs_w * obs_c * 4) +
           std::size_t(T) * 16 + frames * 4 + 14 * 4 + 8 + 8;
}

void write_episode(const EpisodeRecord& rec, const std::string& path) {
    const std::size_t frames = std::size_t(rec.T) + 1;
    if (rec.meshes.size() != frames * rec.mesh_floats() ||
        rec.observations.size() != frames * rec.obs_floats() ||
        rec.actions.size() != std::size_t(rec.T) * 4 || rec.coverage.size() != frames)
        throw std::runtime_error("write_episode: inconsistent array lengths");
    File out(path, "wb");
    put_bytes(out.f, kEpisodeMagic, 4);
    put_u32(out.f, kEpisodeVersion);
    put_u32(out.f, std::uint32_t(rec.n));
    put_u32(out.f, std::uint32_t(rec.T));
    put_u32(out.f, std::uint32_t(rec.obs_w));
    put_u32(out.f, std::uint32_t(rec.obs_h));
    put_u32(out.f, std::uint32_t(rec.obs_c));
    put_bytes(out.f, rec.meshes.data(), rec.meshes.size() * 4);
    put_bytes(out.f, rec.observations.data(), rec.observations.size() * 4);
    put_bytes(out.f, rec.actions.data(), rec.actions.size() * 4);
    put_bytes(out.f, rec.coverage.data(), rec.coverage.size() * 4);
    float block[14];
    render_block(rec.render, block);
    put_bytes(out.f, block, sizeof block);
    put_u64(out.f, rec.render.rng_seed);
    put_u64(out.f, rec.seed);
    if (std::fflush(out.f) != 0) throw std::runtime_error("cannot flush " + path);
}

EpisodeRecord read_episode(const std::string& path) {
    File in(path, "rb");
    char magic[4];
    get_bytes(in.f, magic, 4, "magic");
    if (std::memcmp(magic, kEpisodeMagic, 4) != 0)
        throw std::runtime_error("bad magic in " + path);
    const std::uint32_t version = get_u32(in.f, "version");
    if (version != kEpisodeVersion)
        throw std::runtime_error("unsupported episode version " + std::to_string(version));
    EpisodeRecord rec;
    rec.n = int(get_u32(in.f, "n"));
    rec.T = int(get_u32(in.f, "T"));
    rec.obs_w = int(get_u32(in.f, "obs_w"));
    rec.obs_h = int(get_u32(in.f, "obs_h"));
    rec.obs_c = int(get_u32(in.f, "obs_c"));
    if (rec.n < 2 || rec.n > 4096) throw std::runtime_error("episode field n out of range");
    if (rec.T < 1 || rec.T > 1000000) throw std::runtime_error("episode field T out of range");
    if (rec.obs_w < 1 || rec.obs_w > 16384 || rec.obs_h < 1 || rec.obs_h > 16384 ||
        rec.obs_c < 1 || rec.obs_c > 16)
        throw std::runtime_error("episode observation dimensions out of range");
    const std::size_t frames = std::size_t(rec.T) + 1;
    rec.meshes.resize(frames * rec.mesh_floats());
    rec.observations.resize(frames * rec.obs_floats());
    rec.actions.resize(std::size_t(rec.T) * 4);
    rec.coverage.resize(frames);
    get_bytes(in.f, rec.meshes.data(), rec.meshes.size() * 4, "meshes");
    get_bytes(in.f, rec.observations.data(), rec.observations.size() * 4, "observations");
    get_bytes(in.f, rec.actions.data(), rec.actions.size() * 4, "actions");
    get_bytes(in.f, rec.coverage.data(), rec.coverage.size() * 4, "coverage");
    float block[14];
    get_bytes(in.f, block, sizeof block, "render config");
    unrender_block(block, rec.render);
    rec.render.rng_seed = get_u64(in.f, "render rng_seed");
    rec.seed = get_u64(in.f, "seed");
    for (float c : rec.coverage)
        if (!(c >= 0.0f && c <= 100.0f)) throw std::runtime_error("episode coverage out of range");
    return rec;
}

DatasetConfig dataset_old(int episodes, std::uint64_t seed) {
    DatasetConfig cfg;
    cfg.episodes = episodes;
    cfg.episode_len = 15;
    cfg.bounds.max_pull = 0.4;
    cfg.corner_bias = 0.0;
    cfg.seed = seed;
    return cfg;
}

DatasetConfig dataset_new(int episodes, std::uint64_t seed) {
    DatasetConfig cfg;
    cfg.episodes = episodes;
    cfg.episode_len = 10;
    cfg.bounds.max_pull = 0.6;
    cfg.corner_bias = 0.3;
    cfg.seed = seed;
    return cfg;
}

namespace {

struct RollCounters {
    int corner_picks = 0;
    float max_abs_delta = 0.0f;
};

EpisodeRecord roll_episode(const DatasetConfig& cfg, int index, RollCounters& counters) {
    Rng rng = Rng(cfg.seed).fork(std::uint64_t(index));
    EpisodeRecord rec;
    rec.n = cfg.cloth.n;
    rec.T = cfg.episode_len;
    rec.seed = rng.seed();

    const int tier = rng.uniform_int(4);
    ClothState s = tier_start(tier, rng, cfg.cloth);
    RenderConfig rcfg;
    if (cfg.randomize_render) randomize_render(rcfg, RandomizeRanges{}, rng);
    rec.render = rcfg;

    const std::size_t frames = std::size_t(rec.T) + 1;
    rec.meshes.reserve(frames * rec.mesh_floats());
    rec.observations.reserve(frames * rec.obs_floats());
    rec.actions.reserve(std::size_t(rec.T) * 4);
    rec.coverage.reserve(frames);

    const auto push_state = [&](const ClothState& st, int t) {
        for (const Vec3& p : st.pos) {
            rec.meshes.push_back(p.x);
            rec.meshes.push_back(p.y);
            rec.meshes.push_back(p.z);
        }
        RenderConfig rt = rcfg;
        rt.rng_seed = rcfg.rng_seed + std::uint64_t(t);
        const Observation o = render(st, rt);
        rec.observations.insert(rec.observations.end(), o.px.begin(), o.px.end());
        rec.coverage.push_back(float(coverage(st)));
    };

    push_state(s, 0);
    for (int t = 0; t < rec.T; ++t) {
        bool corner = false;
        const auto sampled = sample_action(s, cfg.bounds, cfg.corner_bias, rng, &corner);
        const PickPull a = sampled ? *sampled : PickPull{0.5, 0.5, 0.0, 0.0};
        counters.corner_picks += corner ? 1 : 0;
        counters.max_abs_delta = std::max({counters.max_abs_delta, std::abs(float(a.dx)),
                                           std::abs(float(a.dy))});
        rec.actions.push_back(float(a.x));
        rec.actions.push_back(float(a.y));
        rec.actions.push_back(float(a.dx));
        rec.actions.push_back(float(a.dy));
        s = execute(s, a, cfg.cloth, cfg.exec).state;
        push_state(s, t + 1);
    }
    return rec;
}

std::string episode_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "episode_%05d.fvsf", index);
    return buf;
}

}  // namespace

DatasetManifest generate_dataset(const DatasetConfig& cfg, const std::string& out_dir) {
    if (cfg.episodes < 1) throw std::invalid_argument("generate_dataset: episodes must be >= 1");
    if (cfg.episode_len < 1)
        throw std::invalid_argument("generate_dataset: episode_len must be >= 1");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir + ": " + ec.message());

    DatasetManifest manifest;
    manifest.config = cfg;
    manifest.files.resize(cfg.episodes);
    for (int i = 0; i < cfg.episodes; ++i) manifest.files[i] = episode_name(i);

    int corner_picks = 0;
    float max_delta = 0.0f;
#pragma omp parallel for schedule(dynamic) reduction(+ : corner_picks) reduction(max : max_delta)
    for (int i = 0; i < cfg.episodes; ++i) {
        RollCounters counters;
        const EpisodeRecord rec = roll_episode(cfg, i, counters);
        write_episode(rec, (std::filesystem::path(out_dir) / manifest.files[i]).string());
        corner_picks += counters.corner_picks;
        max_delta = std::max(max_delta, counters.max_abs_delta);
    }
    manifest.corner_pick_fraction =
        double(corner_picks) / (double(cfg.episodes) * cfg.episode_len);
    manifest.max_abs_delta = max_delta;

    nlohmann::ordered_json j;
    j["format_version"] = manifest.format_version;
    j["config"] = {{"episodes", cfg.episodes},
                   {"episode_len", cfg.episode_len},
                   {"max_pull", cfg.bounds.max_pull},
                   {"corner_bias", cfg.corner_bias},
                   {"randomize_render", cfg.randomize_render},
                   {"seed", cfg.seed},
                   {"tiers", "uniform(0,3)"}};
    j["corner_pick_fraction"] = manifest.corner_pick_fraction;
    j["max_abs_delta"] = manifest.max_abs_delta;
    j["files"] = manifest.files;
    const std::string mpath = (std::filesystem::path(out_dir) / "manifest.json").string();
    File mf(mpath, "wb");
    const std::string text = j.dump(2) + "\n";
    put_bytes(mf.f, text.data(), text.size());
    return manifest;
}

std::vector<CostPair> sample_cost_pairs(const EpisodeRecord& rec) {
    if (rec.T + 1 < 10)
        throw std::invalid_argument("sample_cost_pairs: episode has fewer than 10 states");
    static constexpr int kProbePairs[10][2] = {{1, 2}, {1, 3}, {1, 5}, {1, 9}, {6, 8},
                                               {6, 10}, {6, 7}, {3, 4}, {3, 7}, {3, 9}};
    const int npts = rec.n * rec.n;
    const auto mesh_points = [&](int t) {
        std::vector<Vec3> pts(npts);
        const float* m = rec.mesh_at(t);
        for (int k = 0; k < npts; ++k) pts[k] = {m[3 * k], m[3 * k + 1], m[3 * k + 2]};
        return pts;
    };
    std::vector<CostPair> out;
    out.reserve(10);
    for (int i = 0; i < 10; ++i) {
        CostPair pair;
        pair.a = kProbePairs[i][0] - 1;
        pair.b = kProbePairs[i][1] - 1;
        pair.flipped = i % 2 == 1;
        if (pair.flipped) std::swap(pair.a, pair.b);
        pair.label = vertex_l2(mesh_points(pair.a), mesh_points(pair.b));
        out.push_back(pair);
    }
    return out;
}

void export_cost_pairs(const std::vector<EpisodeRecord>& recs, const std::string& path) {
    if (recs.empty()) throw std::invalid_argument("export_cost_pairs: no episodes");
    for (const EpisodeRecord& r : recs)
        if (r.obs_w != recs[0].obs_w || r.obs_h != recs[0].obs_h || r.obs_c != recs[0].obs_c)
            throw std::invalid_argument("export_cost_pairs: mixed observation dimensions");

    std::vector<std::pair<const EpisodeRecord*, CostPair>> pairs;
    double max_label = 0.0;
    for (const EpisodeRecord& r : recs)
        for (const CostPair& p : sample_cost_pairs(r)) {
            max_label = std::max(max_label, p.label);
            pairs.emplace_back(&r, p);
        }
    const double scale = max_label > 0.0 ? max_label : 1.0;

    File out(path, "wb");
    put_bytes(out.f, "FVCP", 4);
    put_u32(out.f, 1);
    put_u32(out.f, std::uint32_t(pairs.size()));
    put_u32(out.f, std::uint32_t(recs[0].obs_w));
    put_u32(out.f, std::uint32_t(recs[0].obs_h));
    put_u32(out.f, std::uint32_t(recs[0].obs_c));
    for (const auto& [rec, p] : pairs) {
        const std::size_t nf = rec->obs_floats();
        put_bytes(out.f, rec->observations.data() + p.a * nf, nf * 4);
        put_bytes(out.f, rec->observations.data() + p.b * nf, nf * 4);
        put_f32(out.f, float(p.label / scale));
    }
}

}  // namespace fabsim
