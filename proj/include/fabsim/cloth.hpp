#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "fabsim/vec3.hpp"

namespace fabsim {

struct ClothParams {
    int n = 25;                          // grid points per side
    float side = 1.0f;                   // cloth side length, plane units
    float mass = 1.0f;                   // per point
    float k_struct = 600.0f;             // structural spring stiffness
    float k_shear = 600.0f;              // shear (diagonal) spring stiffness
    float damping = 0.95f;               // velocity retained per step
    float dt = 0.02f;
    float gravity = 1.0f;
    float self_collision_radius = 0.02f;
    float self_collision_k = 800.0f;     // repulsion stiffness
    float self_collision_damp = 0.05f;   // velocity matching between contact pairs
                                         // (inter-layer friction; pure repulsion
                                         // leaves stacked layers frictionless)
    float friction_retain = 0.7f;        // in-plane velocity retained on plane contact
};

// Per-point neighbor table, springs stored twice (once per endpoint) so force
// accumulation is a gather with a fixed per-point summation order.
struct SpringTopology {
    int n = 0;
    // springs for point i: entries [offset[i], offset[i+1])
    std::vector<int> offset;
    std::vector<int> nbr;
    std::vector<float> rest;
    std::vector<std::uint8_t> shear;  // 0 structural, 1 shear
};

struct ClothState {
    int n = 0;
    std::vector<Vec3> pos;
    std::vector<Vec3> prev;  // previous positions (Verlet)
    std::vector<std::uint8_t> pinned;
    std::shared_ptr<const SpringTopology> topo;

    int npoints() const { return n * n; }
    int index(int row, int col) const { return row * n + col; }
};

// throws std::invalid_argument on non-positive sizes or n < 2
ClothState init_flat(const ClothParams& params);

// one Verlet step; returns the max squared per-point displacement of the step
float step_inplace(ClothState& state, const ClothParams& params);
// same update, force gather parallelized with OpenMP; bit-identical to step_inplace
float step_inplace_parallel(ClothState& state, const ClothParams& params);

ClothState step(const ClothState& state, const ClothParams& params);
ClothState step_parallel(const ClothState& state, const ClothParams& params);

// steps until max per-point displacement <= tol or max_steps; returns steps taken
int settle(ClothState& state, const ClothParams& params, float tol, int max_steps);

// throws std::out_of_range on a bad index
void pin(ClothState& state, int index);
void unpin(ClothState& state, int index);

// smallest distance between any non-adjacent point pair (adjacent = shares a
// spring); used by the self-collision separation checks
float min_separation(const ClothState& state);

}  // namespace fabsim
