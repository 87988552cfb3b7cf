#pragma once

#include <Eigen/Dense>
#include <optional>

#include "gaussocc/attention.hpp"
#include "gaussocc/config.hpp"

namespace gaussocc {

/// MLP head decoding (m_hat, s_raw, r_raw, c_hat) from a query row; output
/// dimension is exactly 10 + C.
struct RefineHead {
    Mlp net;  // D -> hidden -> hidden -> 10 + C
    int class_count = 0;

    static RefineHead seeded(int dim, int hidden, int class_count, std::uint64_t seed);
    static RefineHead zeros(int dim, int hidden, int class_count);
};

struct DecodedProperties {
    Vec3 mean_residual;
    Vec3 scale;              // softplus(raw) + kScaleMin
    UnitQuaternion rotation;  // normalize(raw), identity fallback
    VecX logits;             // raw
};

DecodedProperties decode_properties(const Eigen::VectorXd& q_row, const RefineHead& head);

/// Gradient of v . concat(m_hat, s, r, c) with respect to the query row,
/// pulled back through the split transforms.
Eigen::VectorXd decode_properties_grad(const Eigen::VectorXd& q_row, const RefineHead& head,
                                       const Eigen::VectorXd& v);

/// Residual mean update, direct substitution of the other properties.
SemanticGaussian refine_gaussian(const SemanticGaussian& g, const DecodedProperties& decoded);

struct ModelWeights {
    AttentionWeights attn;
    RefineHead head;
    ConvKernel3 conv;

    static ModelWeights seeded(const RunConfig& cfg);
    static ModelWeights zeros(const RunConfig& cfg);
};

struct AlignedHistory {
    GaussianSet gaussians;
    QueryMatrix queries;
};

/// One refinement block: self-encoding (voxelize, sparse conv, scatter),
/// temporal self-attention, image cross-attention (residual add), then
/// decode + refine. The TSA/ICA order follows cfg.tsa_before_ica.
std::pair<GaussianSet, QueryMatrix> run_block(const GaussianSet& g, const QueryMatrix& q,
                                              const CameraRig& rig,
                                              const AlignedHistory* hist,
                                              const ModelWeights& weights,
                                              const RunConfig& cfg);

}  // namespace gaussocc
