#pragma once

#include <cstdint>
#include <string>

#include "gaussocc/grid.hpp"

namespace gaussocc {

inline constexpr double kScaleMin = 1e-3;   // lower clamp on Gaussian scales, meters
inline constexpr double kMahalanobisCutoff = 40.0;  // kernel treated as exact 0 beyond this

/// Pipeline configuration with desk-scale defaults. The full-scale settings
/// (P=25600, grid 200x200x16) are accepted but not exercised by the tests.
struct RunConfig {
    VoxelGridSpec grid{Vec3(-16.0, -16.0, -2.0), 0.5, 64, 64, 8};
    int gaussian_count = 512;   // P
    int class_count = 16;       // C, semantic channels only
    int embed_dim = 64;         // D
    int blocks = 2;             // B
    int ref_points = 7;         // R
    int samples = 4;            // S per reference point
    int knn = 4;                // k for 3D value gathering
    double k_sigma = 3.0;
    double alpha = 1.0;         // sigma-point spread
    double tau_occ = 0.05;      // occupancy threshold for classify
    double eps_dist = 1e-6;     // distance floor in inverse-distance gather
    int hidden_dim = 32;        // MLP hidden layer width
    std::uint64_t seed = 42;
    int num_cameras = 4;
    int image_width = 64;
    int image_height = 48;
    int frame_count = 2;
    int workers = 1;
    bool deterministic_reduction = true;
    bool tsa_before_ica = true;  // swap for ablation
    bool force_degenerate_history = false;
};

}  // namespace gaussocc
