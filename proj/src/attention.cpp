#include "gaussocc/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaussocc {

namespace {

struct BilinearTap {
    int x, y;
    double coeff;
    bool valid;
};

struct BilinearSample {
    Eigen::VectorXd value;
    Eigen::VectorXd du;
    Eigen::VectorXd dv;
    std::array<BilinearTap, 4> taps;
};

BilinearSample bilinear_full(const FeatureMap& f, double u, double v) {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double fx = u - x0;
    const double fy = v - y0;

    auto texel = [&](int x, int y) -> Eigen::VectorXd {
        if (x < 0 || x >= f.width || y < 0 || y >= f.height) {
            return Eigen::VectorXd::Zero(f.dim);
        }
        return f.at(x, y);
    };
    const Eigen::VectorXd t00 = texel(x0, y0);
    const Eigen::VectorXd t10 = texel(x0 + 1, y0);
    const Eigen::VectorXd t01 = texel(x0, y0 + 1);
    const Eigen::VectorXd t11 = texel(x0 + 1, y0 + 1);

    BilinearSample s;
    s.value = (1 - fx) * (1 - fy) * t00 + fx * (1 - fy) * t10 + (1 - fx) * fy * t01 + fx * fy * t11;
    s.du = (1 - fy) * (t10 - t00) + fy * (t11 - t01);
    s.dv = (1 - fx) * (t01 - t00) + fx * (t11 - t10);
    auto in = [&](int x, int y) { return x >= 0 && x < f.width && y >= 0 && y < f.height; };
    s.taps = {BilinearTap{x0, y0, (1 - fx) * (1 - fy), in(x0, y0)},
              BilinearTap{x0 + 1, y0, fx * (1 - fy), in(x0 + 1, y0)},
              BilinearTap{x0, y0 + 1, (1 - fx) * fy, in(x0, y0 + 1)},
              BilinearTap{x0 + 1, y0 + 1, fx * fy, in(x0 + 1, y0 + 1)}};
    return s;
}

}  // namespace

Eigen::VectorXd bilinear_sample(const FeatureMap& f, double u, double v) {
    return bilinear_full(f, u, v).value;
}

AttentionWeights AttentionWeights::seeded(int dim, int hidden, int samples, std::uint64_t seed) {
    AttentionWeights w;
    w.samples = samples;
    w.offset2d = Mlp::seeded({dim, hidden, 2 * samples}, seed);
    w.weight2d = Mlp::seeded({dim, hidden, samples}, seed + 1);
    w.offset3d = Mlp::seeded({dim, hidden, 3 * samples}, seed + 2);
    w.weight3d = Mlp::seeded({dim, hidden, samples}, seed + 3);
    w.offset_tsa = Mlp::seeded({2 * dim, hidden, 3 * samples}, seed + 4);
    return w;
}

AttentionWeights AttentionWeights::zeros(int dim, int hidden, int samples) {
    AttentionWeights w;
    w.samples = samples;
    w.offset2d = Mlp::zeros({dim, hidden, 2 * samples});
    w.weight2d = Mlp::zeros({dim, hidden, samples});
    w.offset3d = Mlp::zeros({dim, hidden, 3 * samples});
    w.weight3d = Mlp::zeros({dim, hidden, samples});
    w.offset_tsa = Mlp::zeros({2 * dim, hidden, 3 * samples});
    return w;
}

Eigen::VectorXd deformable_attn_2d(const Eigen::VectorXd& q, const Eigen::Vector2d& ref_uv,
                                   const FeatureMap& f, const AttentionWeights& w) {
    const Eigen::VectorXd off = w.offset2d.forward(q);
    const Eigen::VectorXd wts = softmax(w.weight2d.forward(q));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.dim);
    for (int s = 0; s < w.samples; ++s) {
        out += wts[s] * bilinear_sample(f, ref_uv.x() + off[2 * s], ref_uv.y() + off[2 * s + 1]);
    }
    return out;
}

Attn2dGrad deformable_attn_2d_grad(const Eigen::VectorXd& q, const Eigen::Vector2d& ref_uv,
                                   const FeatureMap& f, const AttentionWeights& w,
                                   const Eigen::VectorXd& grad_out) {
    const Eigen::VectorXd off = w.offset2d.forward(q);
    const Eigen::VectorXd wts = softmax(w.weight2d.forward(q));

    Attn2dGrad grad;
    grad.d_features.assign(f.data.size(), 0.0);

    Eigen::VectorXd g_wts(w.samples);
    Eigen::VectorXd g_off = Eigen::VectorXd::Zero(2 * w.samples);
    for (int s = 0; s < w.samples; ++s) {
        const auto samp = bilinear_full(f, ref_uv.x() + off[2 * s], ref_uv.y() + off[2 * s + 1]);
        g_wts[s] = grad_out.dot(samp.value);
        g_off[2 * s] = wts[s] * grad_out.dot(samp.du);
        g_off[2 * s + 1] = wts[s] * grad_out.dot(samp.dv);
        for (const auto& tap : samp.taps) {
            if (!tap.valid) continue;
            Eigen::Map<Eigen::VectorXd> slot(grad.d_features.data() + f.offset(tap.x, tap.y),
                                             f.dim);
            slot += wts[s] * tap.coeff * grad_out;
        }
    }
    grad.d_query = w.weight2d.input_gradient(q, softmax_pullback(wts, g_wts)) +
                   w.offset2d.input_gradient(q, g_off);
    return grad;
}

std::vector<Vec3> gen_reference_points(const SemanticGaussian& g, int count, double alpha) {
    if (count < 1) {
        throw std::invalid_argument("gen_reference_points: count must be >= 1");
    }
    const Mat3 sigma = compose_covariance(g.scale, g.rotation);
    const Mat3 chol = sigma.llt().matrixL();
    std::vector<Vec3> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        const int phase = i % 7;
        if (phase == 0) {
            pts.push_back(g.mean);
        } else {
            const int axis = (phase - 1) / 2;
            const double sign = (phase % 2 == 1) ? 1.0 : -1.0;
            pts.push_back(g.mean + sign * alpha * chol.col(axis));
        }
    }
    return pts;
}

Eigen::VectorXd image_cross_attention(const std::vector<Vec3>& refs, const Eigen::VectorXd& q,
                                      const CameraRig& rig, const AttentionWeights& w) {
    if (refs.empty()) {
        throw std::invalid_argument("image_cross_attention: empty reference list");
    }
    if (rig.size() == 0 || rig.features.size() != rig.cameras.size()) {
        throw std::invalid_argument("image_cross_attention: malformed camera rig");
    }
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(q.size());
    for (const auto& ref : refs) {
        for (int n = 0; n < rig.size(); ++n) {
            const auto proj = project_point(ref, rig.cameras[n]);
            if (!proj) continue;
            acc += deformable_attn_2d(q, Eigen::Vector2d(proj->u, proj->v), rig.features[n], w);
        }
    }
    return acc / rig.size();
}

namespace {

struct IdwGather {
    std::vector<int> picked;
    std::vector<double> dist;
    std::vector<double> norm_wts;
    Eigen::VectorXd value;
};

IdwGather idw_gather_full(const Vec3& x, const GaussianSet& values, const QueryMatrix& feats,
                          const Attn3dParams& p) {
    const int n = values.size();
    const int k = std::min(p.knn, n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> d2(n);
    for (int i = 0; i < n; ++i) {
        d2[i] = (x - values.gaussians[i].mean).squaredNorm();
    }
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
        return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
    });

    IdwGather g;
    g.picked.assign(order.begin(), order.begin() + k);
    double total = 0.0;
    for (int j : g.picked) {
        const double d = std::sqrt(d2[j]);
        g.dist.push_back(d);
        total += 1.0 / std::max(d, p.eps_dist);
    }
    g.value = Eigen::VectorXd::Zero(feats.cols());
    for (int jj = 0; jj < k; ++jj) {
        const double wt = (1.0 / std::max(g.dist[jj], p.eps_dist)) / total;
        g.norm_wts.push_back(wt);
        g.value += wt * feats.row(g.picked[jj]).transpose();
    }
    return g;
}

}  // namespace

Eigen::VectorXd idw_gather(const Vec3& x, const GaussianSet& values, const QueryMatrix& feats,
                           const Attn3dParams& p) {
    if (values.size() == 0) {
        throw std::invalid_argument("idw_gather: empty value set");
    }
    return idw_gather_full(x, values, feats, p).value;
}

Eigen::VectorXd deformable_attn_3d(const Eigen::VectorXd& q, const Vec3& p,
                                   const GaussianSet& values, const QueryMatrix& value_feats,
                                   const AttentionWeights& w, const Attn3dParams& params,
                                   const Eigen::VectorXd* offset_ctx) {
    if (values.size() == 0 || value_feats.rows() != values.size()) {
        throw std::invalid_argument("deformable_attn_3d: malformed value set");
    }
    const Eigen::VectorXd off =
        offset_ctx ? w.offset_tsa.forward(*offset_ctx) : w.offset3d.forward(q);
    const Eigen::VectorXd wts = softmax(w.weight3d.forward(q));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(value_feats.cols());
    for (int s = 0; s < w.samples; ++s) {
        const Vec3 x = p + Vec3(off[3 * s], off[3 * s + 1], off[3 * s + 2]);
        out += wts[s] * idw_gather(x, values, value_feats, params);
    }
    return out;
}

Attn3dGrad deformable_attn_3d_grad(const Eigen::VectorXd& q, const Vec3& p,
                                   const GaussianSet& values, const QueryMatrix& value_feats,
                                   const AttentionWeights& w, const Attn3dParams& params,
                                   const Eigen::VectorXd& grad_out) {
    const Eigen::VectorXd off = w.offset3d.forward(q);
    const Eigen::VectorXd wts = softmax(w.weight3d.forward(q));

    Attn3dGrad grad;
    grad.d_value_feats = Eigen::MatrixXd::Zero(value_feats.rows(), value_feats.cols());

    Eigen::VectorXd g_wts(w.samples);
    Eigen::VectorXd g_off = Eigen::VectorXd::Zero(3 * w.samples);
    for (int s = 0; s < w.samples; ++s) {
        const Vec3 x = p + Vec3(off[3 * s], off[3 * s + 1], off[3 * s + 2]);
        const auto gather = idw_gather_full(x, values, value_feats, params);
        g_wts[s] = grad_out.dot(gather.value);

        // pullback through the normalized inverse-distance weights
        const int k = static_cast<int>(gather.picked.size());
        double total = 0.0;
        std::vector<double> u(k);
        std::vector<double> c(k);
        for (int jj = 0; jj < k; ++jj) {
            u[jj] = 1.0 / std::max(gather.dist[jj], params.eps_dist);
            total += u[jj];
            c[jj] = grad_out.dot(value_feats.row(gather.picked[jj]).transpose());
            grad.d_value_feats.row(gather.picked[jj]) +=
                wts[s] * gather.norm_wts[jj] * grad_out.transpose();
        }
        double cu = 0.0;
        for (int jj = 0; jj < k; ++jj) cu += c[jj] * u[jj];
        Vec3 dx = Vec3::Zero();
        for (int jj = 0; jj < k; ++jj) {
            const double dl_du = c[jj] / total - cu / (total * total);
            if (gather.dist[jj] > params.eps_dist) {
                const Vec3 du_dx = -(x - values.gaussians[gather.picked[jj]].mean) /
                                   (gather.dist[jj] * gather.dist[jj] * gather.dist[jj]);
                dx += dl_du * du_dx;
            }
        }
        g_off[3 * s] = wts[s] * dx.x();
        g_off[3 * s + 1] = wts[s] * dx.y();
        g_off[3 * s + 2] = wts[s] * dx.z();
    }
    grad.d_query = w.weight3d.input_gradient(q, softmax_pullback(wts, g_wts)) +
                   w.offset3d.input_gradient(q, g_off);
    return grad;
}

QueryMatrix temporal_self_attention(const QueryMatrix& q, const GaussianSet& curr,
                                    const GaussianSet* hist_set, const QueryMatrix* hist_q,
                                    const AttentionWeights& w, const Attn3dParams& params) {
    if (q.rows() != curr.size()) {
        throw std::invalid_argument("temporal_self_attention: query/set row mismatch");
    }
    if ((hist_set == nullptr) != (hist_q == nullptr)) {
        throw std::invalid_argument("temporal_self_attention: partial history");
    }
    if (hist_set && (hist_set->size() != hist_q->rows() || hist_q->cols() != q.cols())) {
        throw std::invalid_argument("temporal_self_attention: malformed history");
    }
    // First-frame rule: the history slot duplicates the current queries.
    const GaussianSet& hs = hist_set ? *hist_set : curr;
    const QueryMatrix& hq = hist_q ? *hist_q : q;
    if (hs.size() != curr.size()) {
        throw std::invalid_argument("temporal_self_attention: history row mismatch");
    }

    QueryMatrix out(q.rows(), q.cols());
    for (int i = 0; i < q.rows(); ++i) {
        const Eigen::VectorXd qi = q.row(i).transpose();
        const Vec3 p = curr.gaussians[i].mean;
        Eigen::VectorXd ctx(2 * q.cols());
        ctx << qi, hq.row(i).transpose();
        out.row(i) = (deformable_attn_3d(qi, p, curr, q, w, params, &ctx) +
                      deformable_attn_3d(qi, p, hs, hq, w, params, &ctx))
                         .transpose();
    }
    return out;
}

}  // namespace gaussocc
