#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace gaussocc {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion in (w, x, y, z) order. The constructor normalizes and
/// rejects near-zero inputs, so every instance is a valid rotation.
class UnitQuaternion {
public:
    UnitQuaternion() : w_(1.0), x_(0.0), y_(0.0), z_(0.0) {}

    UnitQuaternion(double w, double x, double y, double z) {
        const double n = std::sqrt(w * w + x * x + y * y + z * z);
        if (n < 1e-12) {
            throw std::invalid_argument("UnitQuaternion: zero-norm input");
        }
        w_ = w / n;
        x_ = x / n;
        y_ = y / n;
        z_ = z / n;
    }

    static UnitQuaternion identity() { return {}; }

    /// Axis-angle constructor; axis need not be normalized.
    static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

    /// Nearest unit quaternion for a proper rotation matrix.
    static UnitQuaternion from_matrix(const Mat3& r);

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    Vec4 coeffs() const { return Vec4(w_, x_, y_, z_); }

    UnitQuaternion conjugate() const {
        UnitQuaternion q;
        q.w_ = w_;
        q.x_ = -x_;
        q.y_ = -y_;
        q.z_ = -z_;
        return q;
    }

    UnitQuaternion operator*(const UnitQuaternion& o) const;
    UnitQuaternion operator-() const {
        UnitQuaternion q;
        q.w_ = -w_;
        q.x_ = -x_;
        q.y_ = -y_;
        q.z_ = -z_;
        return q;
    }

    Vec3 rotate(const Vec3& p) const;

private:
    double w_, x_, y_, z_;
};

/// Rotation matrix from a unit quaternion.
Mat3 quat_to_rot(const UnitQuaternion& r);

/// Partial derivatives of quat_to_rot with respect to the four ambient
/// quaternion components, evaluated at a unit quaternion.
std::array<Mat3, 4> quat_to_rot_jacobian(const UnitQuaternion& r);

/// Rigid SE(3) transform: p -> R p + t.
struct RigidPose {
    UnitQuaternion rotation;
    Vec3 translation = Vec3::Zero();

    static RigidPose identity() { return {UnitQuaternion::identity(), Vec3::Zero()}; }
};

RigidPose pose_compose(const RigidPose& a, const RigidPose& b);
RigidPose pose_inverse(const RigidPose& a);
Vec3 pose_apply(const RigidPose& a, const Vec3& p);

/// Pinhole camera. Extrinsics map world coordinates into the camera frame
/// (z forward, x right, y down); this convention is fixed project-wide.
struct CameraModel {
    Mat3 intrinsics = Mat3::Identity();
    RigidPose extrinsics;  // world -> camera
    int width = 0;
    int height = 0;

    CameraModel() = default;
    CameraModel(const Mat3& k, const RigidPose& t, int w, int h);
};

struct PixelProjection {
    double u;
    double v;
    double depth;  // camera-frame z, meters
};

inline constexpr double kNearPlane = 1e-3;

/// Projects a world point; empty optional when behind the near plane or
/// outside the image bounds.
std::optional<PixelProjection> project_point(const Vec3& p, const CameraModel& cam);

}  // namespace gaussocc
