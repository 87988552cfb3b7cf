#pragma once

#include <vector>

#include "gaussocc/metrics.hpp"
#include "gaussocc/temporal.hpp"

namespace gaussocc {

/// Ellipsoidal object with an optional constant velocity, meters per frame.
struct SceneObject {
    Vec3 center = Vec3::Zero();
    Vec3 semi_axes = Vec3::Ones();
    UnitQuaternion orientation;
    int label = 0;
    Vec3 velocity = Vec3::Zero();

    Vec3 center_at(int frame) const { return center + frame * velocity; }

    /// Membership test in world coordinates at a given frame.
    bool contains(const Vec3& p, int frame) const;
};

struct SyntheticScene {
    std::vector<SceneObject> objects;
    int class_count = 16;
};

/// Random seeded scene: object_count ellipsoids inside the grid volume with
/// a minimum pairwise center separation.
SyntheticScene make_random_scene(const RunConfig& cfg, int object_count, std::uint64_t seed,
                                 bool moving = false);

/// Ground truth at one frame: a voxel takes an object's class when its
/// center lies inside the ellipsoid; ties go to the nearest object center.
LabelGrid scene_ground_truth(const SyntheticScene& scene, const VoxelGridSpec& spec, int frame);

/// Inward-looking ring of cameras around the grid volume.
std::vector<CameraModel> make_camera_ring(const RunConfig& cfg);

/// Class-coded feature render: each pixel carries a one-hot embedding (in
/// the first C channels of D) of the front-most object along its ray, zero
/// for background.
FeatureMap render_feature_map(const SyntheticScene& scene, const CameraModel& cam, int dim,
                              int frame);

/// Full synthetic sequence: per-frame inputs and ground-truth label grids.
struct GeneratedSequence {
    SyntheticScene scene;
    std::vector<FrameInput> frames;
    std::vector<LabelGrid> ground_truth;
};

GeneratedSequence generate_scene(const RunConfig& cfg, std::uint64_t seed, int object_count = 5,
                                 bool moving = false);

/// One Gaussian per object, sized so the tau_occ level set of the kernel
/// coincides with the ellipsoid surface.
GaussianSet fit_scene_gaussians(const SyntheticScene& scene, const RunConfig& cfg, int frame);

}  // namespace gaussocc
