#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fabsim/action.hpp"
#include "fabsim/render.hpp"

namespace fabsim {

// One recorded episode: T actions over T+1 states. Meshes are row-major
// xyz-interleaved f32, observations row-major channel-interleaved f32 in
// [0,255], matching the in-memory Observation layout.
struct EpisodeRecord {
    int n = 0;  // mesh grid side
    int T = 0;  // action count
    int obs_w = 56, obs_h = 56, obs_c = 4;
    std::vector<float> meshes;        // (T+1) * n*n * 3
    std::vector<float> observations;  // (T+1) * obs_h*obs_w*obs_c
    std::vector<float> actions;       // T * 4, as (x, y, dx, dy)
    std::vector<float> coverage;      // T+1, percent
    RenderConfig render;              // per-episode draw; frame t was rendered
                                      // with rng_seed = render.rng_seed + t
    std::uint64_t seed = 0;           // episode stream seed

    int mesh_floats() const { return n * n * 3; }
    int obs_floats() const { return obs_h * obs_w * obs_c; }
    const float* mesh_at(int t) const { return meshes.data() + size_t(t) * mesh_floats(); }
    Observation obs_at(int t) const;
};

// Binary episode layout, little-endian, single-pass parseable:
//   "FVSF"; u32 version=1; u32 n; u32 T; u32 obs_w; u32 obs_h; u32 obs_c;
//   f32 meshes; f32 observations; f32 actions; f32 coverage;
//   render block: 14 f32 in declared field order (fabric_rgb_top x3,
//   fabric_rgb_bottom x3, plane_rgb x3, gamma, depth_offset, pixel_noise_amp,
//   camera_jitter x2) then u64 rng_seed; u64 episode seed.
inline constexpr char kEpisodeMagic[4] = {'F', 'V', 'S', 'F'};
inline constexpr std::uint32_t kEpisodeVersion = 1;

// total bytes of an episode file with these dimensions
std::size_t episode_file_size(int n, int T, int obs_w = 56, int obs_h = 56, int obs_c = 4);

// throws std::runtime_error on I/O failure
void write_episode(const EpisodeRecord& rec, const std::string& path);
// throws std::runtime_error naming the offending field on malformed input
EpisodeRecord read_episode(const std::string& path);

struct DatasetConfig {
    int episodes = 100;
    int episode_len = 15;
    ActionBounds bounds{0.4};
    double corner_bias = 0.0;
    bool randomize_render = true;  // draw per-episode colors/gamma/jitter/noise
    std::uint64_t seed = 0;
    ClothParams cloth{};
    ExecConfig exec{};
};

// the two collection recipes: long episodes with small pulls, and shorter
// corner-biased episodes with a wider pull range
DatasetConfig dataset_old(int episodes = 100, std::uint64_t seed = 0);
DatasetConfig dataset_new(int episodes = 100, std::uint64_t seed = 0);

struct DatasetManifest {
    DatasetConfig config;
    std::vector<std::string> files;  // relative to out_dir
    double corner_pick_fraction = 0.0;
    double max_abs_delta = 0.0;
    std::uint32_t format_version = kEpisodeVersion;
};

// Rolls the random policy for episode_len actions per episode (tier drawn
// uniformly over 0-3, render config drawn once per episode) and writes one
// episode file per episode plus manifest.json. Episode streams are forked
// from (seed, episode index), so output bytes do not depend on --jobs.
// Throws std::runtime_error if out_dir cannot be written.
DatasetManifest generate_dataset(const DatasetConfig& cfg, const std::string& out_dir);

// observation index pair (stored order, 0-based) with its mesh distance
struct CostPair {
    int a = 0, b = 0;
    double label = 0.0;
    bool flipped = false;
};

// The fixed probe pairs (1-indexed observations (1,2), (1,3), (1,5), (1,9),
// (6,8), (6,10), (6,7), (3,4), (3,7), (3,9)), each labeled with the summed
// squared mesh distance; every second pair is stored flipped. Throws
// std::invalid_argument when the episode has fewer than 10 states.
std::vector<CostPair> sample_cost_pairs(const EpisodeRecord& rec);

// Cost-pair export, one "FVCP" file: u32 version=1; u32 count; u32 obs_w;
// u32 obs_h; u32 obs_c; then per pair obs_a, obs_b (f32 frames) and the
// label as f32, normalized by the largest label in the export.
void export_cost_pairs(const std::vector<EpisodeRecord>& recs, const std::string& path);

}  // namespace fabsim
