#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gaussocc/gaussian.hpp"
#include "gaussocc/mlp.hpp"
#include "gaussocc/splatter.hpp"

namespace gaussocc {

/// Dense 2D feature map, H x W x D, channels innermost, pixel centers at
/// integer coordinates.
struct FeatureMap {
    int width = 0;
    int height = 0;
    int dim = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int w, int h, int d)
        : width(w), height(h), dim(d),
          data(static_cast<std::size_t>(w) * h * d, 0.0) {}

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * dim;
    }
    Eigen::Map<Eigen::VectorXd> at(int x, int y) { return {data.data() + offset(x, y), dim}; }
    Eigen::Map<const Eigen::VectorXd> at(int x, int y) const {
        return {data.data() + offset(x, y), dim};
    }
};

/// Bilinear sample with zero padding outside the image.
Eigen::VectorXd bilinear_sample(const FeatureMap& f, double u, double v);

struct CameraRig {
    std::vector<CameraModel> cameras;
    std::vector<FeatureMap> features;

    int size() const { return static_cast<int>(cameras.size()); }
};

/// Learnable pieces of the deformable-attention variants. Single head;
/// S samples per reference point. The temporal offset net conditions on the
/// concatenation of the query and its history feature, hence 2D inputs.
struct AttentionWeights {
    int samples = 4;
    Mlp offset2d;    // D  -> 2S pixel offsets
    Mlp weight2d;    // D  -> S sample logits
    Mlp offset3d;    // D  -> 3S metric offsets
    Mlp weight3d;    // D  -> S sample logits
    Mlp offset_tsa;  // 2D -> 3S metric offsets

    static AttentionWeights seeded(int dim, int hidden, int samples, std::uint64_t seed);
    static AttentionWeights zeros(int dim, int hidden, int samples);
};

struct Attn3dParams {
    int knn = 4;
    double eps_dist = 1e-6;
};

/// 2D deformable attention: S offsets and softmax weights predicted from the
/// query, features sampled bilinearly around ref_uv.
Eigen::VectorXd deformable_attn_2d(const Eigen::VectorXd& q, const Eigen::Vector2d& ref_uv,
                                   const FeatureMap& f, const AttentionWeights& w);

struct Attn2dGrad {
    Eigen::VectorXd d_query;
    std::vector<double> d_features;  // same layout as FeatureMap::data
};

Attn2dGrad deformable_attn_2d_grad(const Eigen::VectorXd& q, const Eigen::Vector2d& ref_uv,
                                   const FeatureMap& f, const AttentionWeights& w,
                                   const Eigen::VectorXd& grad_out);

/// Deterministic sigma points: the mean followed by +-alpha times the
/// Cholesky columns of the covariance, cycled to exactly count points.
std::vector<Vec3> gen_reference_points(const SemanticGaussian& g, int count, double alpha);

/// Eq.-style camera average: (1/N) sum over cameras and reference points of
/// 2D deformable attention at the projected locations. Out-of-view
/// projections contribute zero.
Eigen::VectorXd image_cross_attention(const std::vector<Vec3>& refs, const Eigen::VectorXd& q,
                                      const CameraRig& rig, const AttentionWeights& w);

/// Inverse-distance gather over the k nearest Gaussian means.
Eigen::VectorXd idw_gather(const Vec3& x, const GaussianSet& values, const QueryMatrix& feats,
                           const Attn3dParams& p);

/// 3D deformable attention over an unstructured Gaussian value set. When
/// offset_ctx is given the offsets come from the temporal offset net applied
/// to it, otherwise from the plain 3D offset net applied to q.
Eigen::VectorXd deformable_attn_3d(const Eigen::VectorXd& q, const Vec3& p,
                                   const GaussianSet& values, const QueryMatrix& value_feats,
                                   const AttentionWeights& w, const Attn3dParams& params,
                                   const Eigen::VectorXd* offset_ctx = nullptr);

struct Attn3dGrad {
    Eigen::VectorXd d_query;
    Eigen::MatrixXd d_value_feats;  // P x D
};

Attn3dGrad deformable_attn_3d_grad(const Eigen::VectorXd& q, const Vec3& p,
                                   const GaussianSet& values, const QueryMatrix& value_feats,
                                   const AttentionWeights& w, const Attn3dParams& params,
                                   const Eigen::VectorXd& grad_out);

/// Temporal self-attention: per query row, 3D deformable attention summed
/// over the current and the ego-aligned history value sets, with offsets
/// conditioned on [Q_i || hist_i]. Without history both the value set and
/// the concatenation duplicate the current queries.
QueryMatrix temporal_self_attention(const QueryMatrix& q, const GaussianSet& curr,
                                    const GaussianSet* hist_set, const QueryMatrix* hist_q,
                                    const AttentionWeights& w, const Attn3dParams& params);

}  // namespace gaussocc
