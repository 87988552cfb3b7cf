#include "gaussocc/refinement.hpp"

#include <cmath>

namespace gaussocc {

namespace {

double softplus(double x) {
    // stable log(1 + exp(x))
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

RefineHead RefineHead::seeded(int dim, int hidden, int class_count, std::uint64_t seed) {
    return {Mlp::seeded({dim, hidden, hidden, 10 + class_count}, seed), class_count};
}

RefineHead RefineHead::zeros(int dim, int hidden, int class_count) {
    return {Mlp::zeros({dim, hidden, hidden, 10 + class_count}), class_count};
}

DecodedProperties decode_properties(const Eigen::VectorXd& q_row, const RefineHead& head) {
    const Eigen::VectorXd raw = head.net.forward(q_row);
    if (raw.size() != 10 + head.class_count) {
        throw std::invalid_argument("decode_properties: head output size mismatch");
    }
    DecodedProperties d;
    d.mean_residual = raw.segment<3>(0);
    for (int i = 0; i < 3; ++i) {
        d.scale[i] = softplus(raw[3 + i]) + kScaleMin;
    }
    const Vec4 r_raw = raw.segment<4>(6);
    if (r_raw.norm() < 1e-9) {
        d.rotation = UnitQuaternion::identity();
    } else {
        d.rotation = UnitQuaternion(r_raw[0], r_raw[1], r_raw[2], r_raw[3]);
    }
    d.logits = raw.tail(head.class_count);
    return d;
}

Eigen::VectorXd decode_properties_grad(const Eigen::VectorXd& q_row, const RefineHead& head,
                                       const Eigen::VectorXd& v) {
    const Eigen::VectorXd raw = head.net.forward(q_row);
    Eigen::VectorXd g_raw(raw.size());
    g_raw.segment<3>(0) = v.segment<3>(0);
    for (int i = 0; i < 3; ++i) {
        g_raw[3 + i] = v[3 + i] * sigmoid(raw[3 + i]);
    }
    const Vec4 r_raw = raw.segment<4>(6);
    const double n = r_raw.norm();
    if (n < 1e-9) {
        g_raw.segment<4>(6).setZero();  // fallback branch is locally constant
    } else {
        const Vec4 unit = r_raw / n;
        const Vec4 vr = v.segment<4>(6);
        g_raw.segment<4>(6) = (vr - unit.dot(vr) * unit) / n;
    }
    g_raw.tail(head.class_count) = v.tail(head.class_count);
    return head.net.input_gradient(q_row, g_raw);
}

SemanticGaussian refine_gaussian(const SemanticGaussian& g, const DecodedProperties& decoded) {
    return {g.mean + decoded.mean_residual, decoded.scale, decoded.rotation, decoded.logits};
}

ModelWeights ModelWeights::seeded(const RunConfig& cfg) {
    ModelWeights w;
    w.attn = AttentionWeights::seeded(cfg.embed_dim, cfg.hidden_dim, cfg.samples, cfg.seed + 100);
    w.head = RefineHead::seeded(cfg.embed_dim, cfg.hidden_dim, cfg.class_count, cfg.seed + 200);
    w.conv = ConvKernel3::seeded(cfg.embed_dim, cfg.embed_dim, cfg.seed + 300);
    return w;
}

ModelWeights ModelWeights::zeros(const RunConfig& cfg) {
    ModelWeights w;
    w.attn = AttentionWeights::zeros(cfg.embed_dim, cfg.hidden_dim, cfg.samples);
    w.head = RefineHead::zeros(cfg.embed_dim, cfg.hidden_dim, cfg.class_count);
    w.conv = ConvKernel3::identity(cfg.embed_dim);
    return w;
}

std::pair<GaussianSet, QueryMatrix> run_block(const GaussianSet& g, const QueryMatrix& q,
                                              const CameraRig& rig,
                                              const AlignedHistory* hist,
                                              const ModelWeights& weights,
                                              const RunConfig& cfg) {
    if (q.rows() != g.size() || (hist && hist->gaussians.size() != g.size())) {
        throw std::invalid_argument("run_block: inconsistent P across inputs");
    }
    const Attn3dParams params{cfg.knn, cfg.eps_dist};

    // self-encoding
    const auto vox = voxelize_means(g, q, cfg.grid);
    const auto conv = sparse_conv3d(vox.grid, weights.conv);
    QueryMatrix queries = scatter_features(conv, g, q);

    const GaussianSet* hist_set = hist ? &hist->gaussians : nullptr;
    const QueryMatrix* hist_q = hist ? &hist->queries : nullptr;

    auto apply_tsa = [&] {
        queries = temporal_self_attention(queries, g, hist_set, hist_q, weights.attn, params);
    };
    auto apply_ica = [&] {
        for (int i = 0; i < g.size(); ++i) {
            const auto refs = gen_reference_points(g.gaussians[i], cfg.ref_points, cfg.alpha);
            queries.row(i) +=
                image_cross_attention(refs, queries.row(i).transpose(), rig, weights.attn)
                    .transpose();
        }
    };
    if (cfg.tsa_before_ica) {
        apply_tsa();
        apply_ica();
    } else {
        apply_ica();
        apply_tsa();
    }

    GaussianSet refined = g;
    for (int i = 0; i < g.size(); ++i) {
        refined.gaussians[i] =
            refine_gaussian(g.gaussians[i], decode_properties(queries.row(i).transpose(), weights.head));
    }
    return {std::move(refined), std::move(queries)};
}

}  // namespace gaussocc
