#pragma once

#include <optional>
#include <vector>

#include "gaussocc/refinement.hpp"

namespace gaussocc {

struct FrameInput {
    CameraRig rig;
    RigidPose ego_pose;  // ego -> world
    int timestamp = 0;
};

/// State threaded from frame t-1: the refined Gaussians, their queries and
/// the ego pose they were expressed in.
struct HistoryState {
    GaussianSet gaussians;
    QueryMatrix queries;
    RigidPose ego_pose;
};

/// Moves the history into the ego frame of pose_t. Geometry only: means and
/// rotations transform by the relative pose, scales, logits and query
/// features are untouched.
HistoryState align_history(const HistoryState& hist, const RigidPose& pose_t);

/// Seeded initial scene: means on a jittered lattice spanning the grid,
/// scales of two voxels, identity rotations, zero logits; queries uniform in
/// +-1/sqrt(D).
std::pair<GaussianSet, QueryMatrix> init_gaussians(const RunConfig& cfg);

struct FrameResult {
    GaussianSet gaussians;
    QueryMatrix queries;
    SemanticVoxelGrid grid;
};

FrameResult process_frame(const FrameInput& input, const std::optional<HistoryState>& hist,
                          const ModelWeights& weights, const RunConfig& cfg);

struct FrameReport {
    double wall_time_ms = 0.0;
    std::size_t gaussian_floats = 0;  // P * (10 + C)
    std::size_t dense_floats = 0;     // X * Y * Z * C
    double memory_ratio = 0.0;
};

struct SequenceResult {
    std::vector<SemanticVoxelGrid> grids;
    std::vector<FrameReport> reports;
    HistoryState final_state;
};

SequenceResult run_sequence(const std::vector<FrameInput>& frames, const ModelWeights& weights,
                            const RunConfig& cfg);

/// Storage-count ratio of the Gaussian representation vs a dense semantic
/// grid: P*(10+C) / (X*Y*Z*C).
double memory_ratio(int gaussian_count, int class_count, const VoxelGridSpec& spec);

}  // namespace gaussocc
