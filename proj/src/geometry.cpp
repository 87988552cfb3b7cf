#include "gaussocc/geometry.hpp"

#include <cmath>

namespace gaussocc {

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n < 1e-12) {
        throw std::invalid_argument("from_axis_angle: zero axis");
    }
    const double half = 0.5 * angle;
    const Vec3 u = axis / n;
    const double s = std::sin(half);
    return {std::cos(half), u.x() * s, u.y() * s, u.z() * s};
}

UnitQuaternion UnitQuaternion::from_matrix(const Mat3& r) {
    // Shepperd's method: pick the largest diagonal combination.
    const double t = r.trace();
    double w, x, y, z;
    if (t > 0.0) {
        double s = std::sqrt(t + 1.0) * 2.0;
        w = 0.25 * s;
        x = (r(2, 1) - r(1, 2)) / s;
        y = (r(0, 2) - r(2, 0)) / s;
        z = (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        w = (r(2, 1) - r(1, 2)) / s;
        x = 0.25 * s;
        y = (r(0, 1) + r(1, 0)) / s;
        z = (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        w = (r(0, 2) - r(2, 0)) / s;
        x = (r(0, 1) + r(1, 0)) / s;
        y = 0.25 * s;
        z = (r(1, 2) + r(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        w = (r(1, 0) - r(0, 1)) / s;
        x = (r(0, 2) + r(2, 0)) / s;
        y = (r(1, 2) + r(2, 1)) / s;
        z = 0.25 * s;
    }
    return {w, x, y, z};
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& o) const {
    return {w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
            w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
            w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
            w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_};
}

Vec3 UnitQuaternion::rotate(const Vec3& p) const {
    return quat_to_rot(*this) * p;
}

Mat3 quat_to_rot(const UnitQuaternion& r) {
    const double w = r.w(), x = r.x(), y = r.y(), z = r.z();
    Mat3 m;
    m << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
         2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
         2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
    return m;
}

std::array<Mat3, 4> quat_to_rot_jacobian(const UnitQuaternion& r) {
    const double w = r.w(), x = r.x(), y = r.y(), z = r.z();
    std::array<Mat3, 4> j;
    j[0] << 0, -z, y,
            z, 0, -x,
            -y, x, 0;
    j[1] << 0, y, z,
            y, -2 * x, -w,
            z, w, -2 * x;
    j[2] << -2 * y, x, w,
            x, 0, z,
            -w, z, -2 * y;
    j[3] << -2 * z, -w, x,
            w, -2 * z, y,
            x, y, 0;
    for (auto& m : j) m *= 2.0;
    return j;
}

RigidPose pose_compose(const RigidPose& a, const RigidPose& b) {
    return {a.rotation * b.rotation, a.translation + a.rotation.rotate(b.translation)};
}

RigidPose pose_inverse(const RigidPose& a) {
    const UnitQuaternion inv = a.rotation.conjugate();
    return {inv, -inv.rotate(a.translation)};
}

Vec3 pose_apply(const RigidPose& a, const Vec3& p) {
    return a.rotation.rotate(p) + a.translation;
}

CameraModel::CameraModel(const Mat3& k, const RigidPose& t, int w, int h)
    : intrinsics(k), extrinsics(t), width(w), height(h) {
    if (k(0, 0) <= 0.0 || k(1, 1) <= 0.0) {
        throw std::invalid_argument("CameraModel: focal lengths must be positive");
    }
    const double cx = k(0, 2), cy = k(1, 2);
    if (cx < 0.0 || cx > w - 1 || cy < 0.0 || cy > h - 1) {
        throw std::invalid_argument("CameraModel: principal point outside image");
    }
}

std::optional<PixelProjection> project_point(const Vec3& p, const CameraModel& cam) {
    const Vec3 pc = pose_apply(cam.extrinsics, p);
    if (pc.z() <= kNearPlane) {
        return std::nullopt;
    }
    const double u = cam.intrinsics(0, 0) * pc.x() / pc.z() + cam.intrinsics(0, 2);
    const double v = cam.intrinsics(1, 1) * pc.y() / pc.z() + cam.intrinsics(1, 2);
    if (u < 0.0 || u >= cam.width || v < 0.0 || v >= cam.height) {
        return std::nullopt;
    }
    return PixelProjection{u, v, pc.z()};
}

}  // namespace gaussocc
