#pragma once

#include <array>
#include <optional>

#include "fabsim/cloth.hpp"
#include "fabsim/rng.hpp"

namespace fabsim {

// pick point (x, y) in plane coordinates, pull offset (dx, dy)
struct PickPull {
    double x = 0.0;
    double y = 0.0;
    double dx = 0.0;
    double dy = 0.0;
};

struct ActionBounds {
    double max_pull = 0.4;  // |dx|, |dy| <= max_pull
};

struct ExecConfig {
    float grasp_radius = 0.06f;
    float top_layer_band = 0.01f;  // grasp only points within this band of the top z
    // lift = min(lift_height + lift_per_pull * |pull|, lift_max): long pulls need
    // height to unfurl piled fabric, and even short corrective pulls need enough
    // base lift to release a tucked fold before re-placing it
    float lift_height = 0.20f;
    float lift_per_pull = 1.2f;
    float lift_max = 0.7f;
    float drag_step = 0.0125f;     // max pin movement per substep while dragging
    float settle_tol = 1e-4f;      // must sit below gravity*dt^2 or airborne
                                   // cloth counts as settled after one step
    int settle_max_steps = 400;
    int hold_steps = 30;           // steps with the grasp still pinned before release,
                                   // lets strain relax around the pin

};

struct ExecResult {
    ClothState state;
    bool grasped = false;
    int pinned_count = 0;
    bool truncated = false;  // pull endpoint was clipped to the unit square
};

// uniform pick over the cloth's plane bounding box intersected with [0,1]^2,
// deltas uniform in [-max_pull, max_pull]; with probability corner_bias the
// pick snaps to the plane projection of a uniformly chosen cloth corner.
// Returns nullopt when the bounding box does not meet the unit square.
// picked_corner, when given, reports whether the corner branch was taken.
std::optional<PickPull> sample_action(const ClothState& state, const ActionBounds& bounds,
                                      double corner_bias, Rng& rng,
                                      bool* picked_corner = nullptr);

// grasp, lift, drag, release, settle; an empty grasp returns the input state
ExecResult execute(const ClothState& state, const PickPull& action,
                   const ClothParams& params, const ExecConfig& cfg = {});

// axis-aligned bounding box of the cloth's plane projection: {xmin,ymin,xmax,ymax}
std::array<float, 4> fabric_bbox(const ClothState& state);

// grid corner indices in order (0,0), (0,n-1), (n-1,0), (n-1,n-1)
std::array<int, 4> corner_indices(const ClothState& state);

}  // namespace fabsim
