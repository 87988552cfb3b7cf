#pragma once

#include <map>
#include <string>
#include <vector>

#include "gaussocc/refinement.hpp"
#include "gaussocc/temporal.hpp"

namespace gaussocc {

/// Flat binary grid layout: nx, ny, nz as little-endian u32, voxel_size f32,
/// origin 3x f32, channel count u32, then row-major x-then-y-then-z float32
/// values with channels innermost. A JSON sidecar mirrors the metadata.
void save_grid(const SemanticVoxelGrid& grid, const std::string& path,
               bool write_sidecar = true);
SemanticVoxelGrid load_grid(const std::string& path);

/// Named-tensor container: u32 magic, u32 tensor count, then per tensor
/// u32 name length, name bytes, u32 rank, u32 dims, float32 payload.
struct NamedTensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;
};

void save_tensors(const std::map<std::string, NamedTensor>& tensors, const std::string& path);
std::map<std::string, NamedTensor> load_tensors(const std::string& path);

void save_feature_map(const FeatureMap& f, const std::string& path);
FeatureMap load_feature_map(const std::string& path);

void save_model_weights(const ModelWeights& weights, const std::string& path);
/// Loads into a weight structure of matching architecture.
void load_model_weights(ModelWeights& weights, const std::string& path);

/// Gaussian set as JSON: [{"mean", "scale", "rotation" (w,x,y,z), "logits"}].
void save_gaussian_set(const GaussianSet& set, const std::string& path);
GaussianSet load_gaussian_set(const std::string& path);

void save_config(const RunConfig& cfg, const std::string& path);
RunConfig load_config(const std::string& path);

/// Sequence manifest: per-frame ego pose, camera parameters, and feature-map
/// file paths (relative to the manifest directory).
void save_sequence(const std::vector<FrameInput>& frames, const std::string& dir,
                   const std::string& manifest_name = "sequence.json");
std::vector<FrameInput> load_sequence(const std::string& manifest_path);

struct MetricsRecord {
    std::vector<double> per_class_iou;
    double miou = 0.0;
    double sc_iou = 0.0;
    int gaussian_count = 0;
    double memory_ratio = 0.0;
    double wall_time_ms = 0.0;
};

void save_metrics(const MetricsRecord& rec, const std::string& path);

/// Point cloud of Gaussian means, class-colored, for external viewers.
void dump_ply(const GaussianSet& set, double tau_occ, const std::string& path);

}  // namespace gaussocc
