#include "gaussocc/gaussian.hpp"

#include <cmath>

namespace gaussocc {

SemanticGaussian::SemanticGaussian(const Vec3& m, const Vec3& s, const UnitQuaternion& r, VecX c)
    : mean(m), scale(s), rotation(r), logits(std::move(c)) {
    for (int i = 0; i < 3; ++i) {
        if (!(scale[i] >= kScaleMin)) {
            throw std::invalid_argument("SemanticGaussian: scale below minimum");
        }
    }
    if (!logits.allFinite()) {
        throw std::invalid_argument("SemanticGaussian: non-finite logits");
    }
}

Mat3 compose_covariance(const Vec3& scale, const UnitQuaternion& rotation) {
    for (int i = 0; i < 3; ++i) {
        if (!(scale[i] >= kScaleMin)) {
            throw std::invalid_argument("compose_covariance: scale below minimum");
        }
    }
    const Mat3 r = quat_to_rot(rotation);
    const Mat3 rs = r * scale.asDiagonal();
    return rs * rs.transpose();
}

double mahalanobis_sq(const SemanticGaussian& g, const Vec3& p) {
    // Sigma = (R S)(R S)^T, so Sigma^-1 applied via the rotated frame.
    const Mat3 r = quat_to_rot(g.rotation);
    const Vec3 y = r.transpose() * (p - g.mean);
    const Vec3 w = y.cwiseQuotient(g.scale);
    return w.squaredNorm();
}

double eval_kernel(const SemanticGaussian& g, const Vec3& p) {
    const double q2 = mahalanobis_sq(g, p);
    if (q2 > kMahalanobisCutoff * kMahalanobisCutoff) {
        return 0.0;
    }
    return std::exp(-0.5 * q2);
}

VecX eval_gaussian(const SemanticGaussian& g, const Vec3& p) {
    return eval_kernel(g, p) * g.logits;
}

VecX eval_mixture(const GaussianSet& set, const Vec3& p) {
    if (set.gaussians.empty()) {
        return VecX();
    }
    VecX acc = VecX::Zero(set.gaussians.front().logits.size());
    for (const auto& g : set.gaussians) {
        const double k = eval_kernel(g, p);
        if (k != 0.0) {
            acc += k * g.logits;
        }
    }
    return acc;
}

KernelGrad grad_eval_gaussian(const SemanticGaussian& g, const Vec3& p) {
    KernelGrad out;
    const Mat3 r = quat_to_rot(g.rotation);
    const Vec3 d = p - g.mean;
    const Vec3 y = r.transpose() * d;
    const Vec3 w = y.cwiseQuotient(g.scale);
    const double q2 = w.squaredNorm();
    if (q2 > kMahalanobisCutoff * kMahalanobisCutoff) {
        return out;  // flat zero region
    }
    const double k = std::exp(-0.5 * q2);
    out.kernel = k;

    // exponent E = -1/2 sum_i y_i^2 / s_i^2
    const Vec3 y_over_s2 = y.cwiseQuotient(g.scale.cwiseProduct(g.scale));

    // dE/dp = -Sigma^-1 d ; dE/dm = +Sigma^-1 d
    const Vec3 sigma_inv_d = r * y_over_s2;
    out.d_point = -k * sigma_inv_d;
    out.d_mean = k * sigma_inv_d;

    // dE/ds_i = y_i^2 / s_i^3
    for (int i = 0; i < 3; ++i) {
        out.d_scale[i] = k * y[i] * y[i] / (g.scale[i] * g.scale[i] * g.scale[i]);
    }

    // dE/dR_{ab} = -(y_b / s_b^2) d_a, chained through dR/dq.
    Mat3 de_dr;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            de_dr(a, b) = -y_over_s2[b] * d[a];
        }
    }
    const auto jac = quat_to_rot_jacobian(g.rotation);
    Vec4 dq;
    for (int c = 0; c < 4; ++c) {
        dq[c] = k * de_dr.cwiseProduct(jac[c]).sum();
    }
    const Vec4 q = g.rotation.coeffs();
    out.d_rot = dq - q.dot(dq) * q;  // tangent projection
    return out;
}

int classify(const VecX& occupancy, double tau_occ) {
    int best = kEmptyLabel;
    double best_val = 0.0;
    for (int i = 0; i < occupancy.size(); ++i) {
        if (best == kEmptyLabel || occupancy[i] > best_val) {
            best = i;
            best_val = occupancy[i];
        }
    }
    if (best == kEmptyLabel || best_val < tau_occ) {
        return kEmptyLabel;
    }
    return best;
}

}  // namespace gaussocc
