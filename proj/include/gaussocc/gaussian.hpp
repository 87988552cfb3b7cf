#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gaussocc/config.hpp"
#include "gaussocc/geometry.hpp"

namespace gaussocc {

using VecX = Eigen::VectorXd;

/// One scene primitive: anisotropic kernel plus semantic logits.
struct SemanticGaussian {
    Vec3 mean = Vec3::Zero();                 // meters
    Vec3 scale = Vec3::Ones();                // meters, each >= kScaleMin
    UnitQuaternion rotation;
    VecX logits;                              // C semantic channels, used raw

    SemanticGaussian() = default;
    SemanticGaussian(const Vec3& m, const Vec3& s, const UnitQuaternion& r, VecX c);
};

/// The scene representation at one frame.
struct GaussianSet {
    std::vector<SemanticGaussian> gaussians;
    int timestamp = 0;
    RigidPose ego_pose;  // ego -> world

    int size() const { return static_cast<int>(gaussians.size()); }
};

/// Sigma = R diag(s) diag(s)^T R^T.
Mat3 compose_covariance(const Vec3& scale, const UnitQuaternion& rotation);

/// Squared Mahalanobis distance of p from the Gaussian center.
double mahalanobis_sq(const SemanticGaussian& g, const Vec3& p);

/// Kernel value exp(-1/2 (p-m)^T Sigma^-1 (p-m)); exact 0 past the distance
/// cutoff so splatting loops skip denormals.
double eval_kernel(const SemanticGaussian& g, const Vec3& p);

/// Semantic occupancy contribution of one Gaussian at a point: kernel * c.
VecX eval_gaussian(const SemanticGaussian& g, const Vec3& p);

/// Mixture occupancy: sum of all member contributions, in list order.
VecX eval_mixture(const GaussianSet& set, const Vec3& p);

/// Gradients of the scalar kernel with respect to every property. The
/// rotation gradient is taken in ambient 4-space and projected onto the
/// tangent of the unit sphere. Per-component output gradients follow from
/// out_j = kernel * c_j.
struct KernelGrad {
    double kernel = 0.0;
    Vec3 d_mean = Vec3::Zero();
    Vec3 d_scale = Vec3::Zero();
    Vec4 d_rot = Vec4::Zero();   // (w,x,y,z)
    Vec3 d_point = Vec3::Zero();
};

KernelGrad grad_eval_gaussian(const SemanticGaussian& g, const Vec3& p);

/// Argmax over semantic channels; kEmptyLabel when the max is below tau_occ.
/// Ties break toward the lower class index.
int classify(const VecX& occupancy, double tau_occ);

}  // namespace gaussocc
