#include "gaussocc/scene.hpp"

#include <cmath>
#include <random>

namespace gaussocc {

bool SceneObject::contains(const Vec3& p, int frame) const {
    const Vec3 q = quat_to_rot(orientation).transpose() * (p - center_at(frame));
    return q.cwiseQuotient(semi_axes).squaredNorm() <= 1.0;
}

SyntheticScene make_random_scene(const RunConfig& cfg, int object_count, std::uint64_t seed,
                                 bool moving) {
    std::mt19937_64 rng(seed);
    const auto& spec = cfg.grid;
    const Vec3 lo = spec.origin;
    const Vec3 hi = spec.origin + spec.voxel_size * Vec3(spec.nx, spec.ny, spec.nz);
    const Vec3 mid = 0.5 * (lo + hi);
    const Vec3 half = 0.5 * (hi - lo);

    std::uniform_real_distribution<double> ux(-0.6, 0.6);
    std::uniform_real_distribution<double> axis_xy(1.0, 2.5);
    const double z_cap = std::min(1.0, 0.4 * half.z());
    std::uniform_real_distribution<double> axis_z(0.5 * z_cap, z_cap);
    std::uniform_real_distribution<double> yaw(0.0, 2.0 * M_PI);
    std::uniform_int_distribution<int> label(0, cfg.class_count - 1);
    std::uniform_int_distribution<int> vel_axis(0, 1);
    std::uniform_int_distribution<int> vel_sign(0, 1);

    SyntheticScene scene;
    scene.class_count = cfg.class_count;
    int attempts = 0;
    while (static_cast<int>(scene.objects.size()) < object_count && attempts < 10000) {
        ++attempts;
        SceneObject obj;
        obj.center = mid + Vec3(ux(rng) * half.x(), ux(rng) * half.y(), ux(rng) * 0.4 * half.z());
        obj.semi_axes = Vec3(axis_xy(rng), axis_xy(rng), axis_z(rng));
        obj.orientation = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), yaw(rng));
        obj.label = label(rng);
        if (moving) {
            obj.velocity = Vec3::Zero();
            obj.velocity[vel_axis(rng)] = (vel_sign(rng) ? 1.0 : -1.0) * spec.voxel_size;
        }
        bool ok = true;
        for (const auto& other : scene.objects) {
            const double sep = (obj.center - other.center).norm();
            if (sep < obj.semi_axes.maxCoeff() + other.semi_axes.maxCoeff() + spec.voxel_size) {
                ok = false;
                break;
            }
        }
        if (ok) {
            scene.objects.push_back(obj);
        }
    }
    return scene;
}

LabelGrid scene_ground_truth(const SyntheticScene& scene, const VoxelGridSpec& spec, int frame) {
    LabelGrid gt(spec);
    for (int ix = 0; ix < spec.nx; ++ix) {
        for (int iy = 0; iy < spec.ny; ++iy) {
            for (int iz = 0; iz < spec.nz; ++iz) {
                const Vec3 c = spec.center(ix, iy, iz);
                int best = kEmptyLabel;
                double best_dist = 0.0;
                for (const auto& obj : scene.objects) {
                    if (!obj.contains(c, frame)) continue;
                    const double d = (c - obj.center_at(frame)).norm();
                    if (best == kEmptyLabel || d < best_dist) {
                        best = obj.label;
                        best_dist = d;
                    }
                }
                gt.at(ix, iy, iz) = best;
            }
        }
    }
    return gt;
}

std::vector<CameraModel> make_camera_ring(const RunConfig& cfg) {
    const auto& spec = cfg.grid;
    const Vec3 lo = spec.origin;
    const Vec3 hi = spec.origin + spec.voxel_size * Vec3(spec.nx, spec.ny, spec.nz);
    const Vec3 mid = 0.5 * (lo + hi);
    const double radius = 1.1 * std::max(0.5 * (hi.x() - lo.x()), 0.5 * (hi.y() - lo.y()));

    std::vector<CameraModel> cams;
    for (int n = 0; n < cfg.num_cameras; ++n) {
        const double angle = 2.0 * M_PI * n / cfg.num_cameras;
        const Vec3 pos = mid + Vec3(radius * std::cos(angle), radius * std::sin(angle),
                                    0.4 * (hi.z() - mid.z()));
        const Vec3 forward = (mid - pos).normalized();
        // camera frame: x right, y down, z forward, world z up
        Vec3 right = forward.cross(Vec3::UnitZ());
        if (right.norm() < 1e-9) {
            right = Vec3::UnitX();
        }
        right.normalize();
        const Vec3 down = forward.cross(right);
        Mat3 r_wc;
        r_wc.row(0) = right.transpose();
        r_wc.row(1) = down.transpose();
        r_wc.row(2) = forward.transpose();

        RigidPose extr{UnitQuaternion::from_matrix(r_wc), -(r_wc * pos)};
        Mat3 k = Mat3::Identity();
        k(0, 0) = k(1, 1) = 0.5 * cfg.image_width;  // ~90 degree horizontal fov
        k(0, 2) = 0.5 * (cfg.image_width - 1);
        k(1, 2) = 0.5 * (cfg.image_height - 1);
        cams.emplace_back(k, extr, cfg.image_width, cfg.image_height);
    }
    return cams;
}

namespace {

/// Smallest positive ray parameter hitting the ellipsoid, or negative.
double ray_ellipsoid(const Vec3& origin, const Vec3& dir, const SceneObject& obj, int frame) {
    const Mat3 rt = quat_to_rot(obj.orientation).transpose();
    const Vec3 o = (rt * (origin - obj.center_at(frame))).cwiseQuotient(obj.semi_axes);
    const Vec3 d = (rt * dir).cwiseQuotient(obj.semi_axes);
    const double a = d.squaredNorm();
    const double b = 2.0 * o.dot(d);
    const double c = o.squaredNorm() - 1.0;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return -1.0;
    const double sq = std::sqrt(disc);
    const double t0 = (-b - sq) / (2.0 * a);
    if (t0 > 0.0) return t0;
    const double t1 = (-b + sq) / (2.0 * a);
    return t1 > 0.0 ? t1 : -1.0;
}

}  // namespace

FeatureMap render_feature_map(const SyntheticScene& scene, const CameraModel& cam, int dim,
                              int frame) {
    if (dim < scene.class_count) {
        throw std::invalid_argument("render_feature_map: dim must be >= class count");
    }
    FeatureMap f(cam.width, cam.height, dim);
    const RigidPose cam_to_world = pose_inverse(cam.extrinsics);
    const Vec3 origin = cam_to_world.translation;
    const Mat3 r_cw = quat_to_rot(cam_to_world.rotation);
    const double fx = cam.intrinsics(0, 0), fy = cam.intrinsics(1, 1);
    const double cx = cam.intrinsics(0, 2), cy = cam.intrinsics(1, 2);

    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const Vec3 dir_cam((x - cx) / fx, (y - cy) / fy, 1.0);
            const Vec3 dir = (r_cw * dir_cam).normalized();
            double best_t = -1.0;
            int best_label = kEmptyLabel;
            for (const auto& obj : scene.objects) {
                const double t = ray_ellipsoid(origin, dir, obj, frame);
                if (t > 0.0 && (best_t < 0.0 || t < best_t)) {
                    best_t = t;
                    best_label = obj.label;
                }
            }
            if (best_label >= 0) {
                f.at(x, y)[best_label] = 1.0;
            }
        }
    }
    return f;
}

GeneratedSequence generate_scene(const RunConfig& cfg, std::uint64_t seed, int object_count,
                                 bool moving) {
    GeneratedSequence seq;
    seq.scene = make_random_scene(cfg, object_count, seed, moving);
    const auto cams = make_camera_ring(cfg);
    for (int t = 0; t < cfg.frame_count; ++t) {
        FrameInput frame;
        frame.timestamp = t;
        frame.ego_pose = RigidPose::identity();
        frame.rig.cameras = cams;
        for (const auto& cam : cams) {
            frame.rig.features.push_back(render_feature_map(seq.scene, cam, cfg.embed_dim, t));
        }
        seq.frames.push_back(std::move(frame));
        seq.ground_truth.push_back(scene_ground_truth(seq.scene, cfg.grid, t));
    }
    return seq;
}

GaussianSet fit_scene_gaussians(const SyntheticScene& scene, const RunConfig& cfg, int frame) {
    // kernel equals tau_occ on the ellipsoid surface when s = a / sqrt(2 ln(1/tau))
    const double shrink = 1.0 / std::sqrt(2.0 * std::log(1.0 / cfg.tau_occ));
    GaussianSet set;
    set.timestamp = frame;
    for (const auto& obj : scene.objects) {
        VecX logits = VecX::Zero(cfg.class_count);
        logits[obj.label] = 1.0;
        set.gaussians.emplace_back(obj.center_at(frame), (obj.semi_axes * shrink).cwiseMax(kScaleMin),
                                   obj.orientation, logits);
    }
    return set;
}

}  // namespace gaussocc
