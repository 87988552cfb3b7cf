#include "gaussocc/gradcheck.hpp"

#include <cmath>
#include <random>

#include "gaussocc/attention.hpp"
#include "gaussocc/refinement.hpp"

namespace gaussocc::check {

namespace {

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double max_rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        worst = std::max(worst, rel_err(a[i], b[i]));
    }
    return worst;
}

SemanticGaussian random_gaussian(std::mt19937_64& rng, int classes) {
    std::uniform_real_distribution<double> us(0.3, 1.5);
    std::uniform_real_distribution<double> um(-2.0, 2.0);
    std::normal_distribution<double> un(0.0, 1.0);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    UnitQuaternion q(un(rng), un(rng), un(rng), un(rng));
    VecX logits = VecX::NullaryExpr(classes, [&] { return uc(rng); });
    return {Vec3(um(rng), um(rng), um(rng)), Vec3(us(rng), us(rng), us(rng)), q,
            std::move(logits)};
}

Vec3 random_point_near(std::mt19937_64& rng, const SemanticGaussian& g) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    return g.mean + Vec3(u(rng), u(rng), u(rng));
}

// --- independent reference implementations for the transcript oracles ---

Eigen::VectorXd ref_mlp(const Mlp& net, const Eigen::VectorXd& x) {
    std::vector<double> h(x.data(), x.data() + x.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const auto& w = net.weights[l];
        std::vector<double> next(static_cast<std::size_t>(w.rows()));
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            double acc = net.biases[l][r];
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                acc += w(r, c) * h[static_cast<std::size_t>(c)];
            }
            next[static_cast<std::size_t>(r)] = l + 1 < net.weights.size() ? std::tanh(acc) : acc;
        }
        h = std::move(next);
    }
    return Eigen::Map<Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
}

std::vector<double> ref_softmax(const Eigen::VectorXd& logits) {
    double m = logits[0];
    for (int i = 1; i < logits.size(); ++i) m = std::max(m, logits[i]);
    std::vector<double> e(static_cast<std::size_t>(logits.size()));
    double sum = 0.0;
    for (int i = 0; i < logits.size(); ++i) {
        e[i] = std::exp(logits[i] - m);
        sum += e[i];
    }
    for (auto& v : e) v /= sum;
    return e;
}

Eigen::VectorXd ref_bilinear(const FeatureMap& f, double u, double v) {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double fx = u - x0, fy = v - y0;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.dim);
    const double wts[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
    const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
    for (int t = 0; t < 4; ++t) {
        if (xs[t] >= 0 && xs[t] < f.width && ys[t] >= 0 && ys[t] < f.height) {
            for (int d = 0; d < f.dim; ++d) {
                out[d] += wts[t] * f.data[f.offset(xs[t], ys[t]) + d];
            }
        }
    }
    return out;
}

Eigen::VectorXd ref_da2d(const Eigen::VectorXd& q, const Eigen::Vector2d& ref,
                         const FeatureMap& f, const AttentionWeights& w) {
    const Eigen::VectorXd off = ref_mlp(w.offset2d, q);
    const auto wts = ref_softmax(ref_mlp(w.weight2d, q));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.dim);
    for (int s = 0; s < w.samples; ++s) {
        out += wts[s] * ref_bilinear(f, ref.x() + off[2 * s], ref.y() + off[2 * s + 1]);
    }
    return out;
}

Eigen::VectorXd ref_idw(const Vec3& x, const GaussianSet& vals, const QueryMatrix& feats, int k,
                        double eps) {
    const int n = vals.size();
    std::vector<std::pair<double, int>> order;
    for (int i = 0; i < n; ++i) {
        order.emplace_back((x - vals.gaussians[i].mean).norm(), i);
    }
    std::sort(order.begin(), order.end());
    const int kk = std::min(k, n);
    double total = 0.0;
    for (int j = 0; j < kk; ++j) total += 1.0 / std::max(order[j].first, eps);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(feats.cols());
    for (int j = 0; j < kk; ++j) {
        out += (1.0 / std::max(order[j].first, eps)) / total *
               feats.row(order[j].second).transpose();
    }
    return out;
}

Eigen::VectorXd ref_da3d(const Eigen::VectorXd& q, const Vec3& p, const GaussianSet& vals,
                         const QueryMatrix& feats, const AttentionWeights& w,
                         const Attn3dParams& params, const Eigen::VectorXd* ctx) {
    const Eigen::VectorXd off = ctx ? ref_mlp(w.offset_tsa, *ctx) : ref_mlp(w.offset3d, q);
    const auto wts = ref_softmax(ref_mlp(w.weight3d, q));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(feats.cols());
    for (int s = 0; s < w.samples; ++s) {
        const Vec3 x = p + Vec3(off[3 * s], off[3 * s + 1], off[3 * s + 2]);
        out += wts[s] * ref_idw(x, vals, feats, params.knn, params.eps_dist);
    }
    return out;
}

// --- kink filters: the piecewise-smooth ops are only checked at points a
// finite-difference step cannot push across a boundary ---

bool safe_2d_samples(const Eigen::VectorXd& q, const Eigen::Vector2d& ref, const FeatureMap& f,
                     const AttentionWeights& w, double margin) {
    const Eigen::VectorXd off = w.offset2d.forward(q);
    for (int s = 0; s < w.samples; ++s) {
        const double u = ref.x() + off[2 * s];
        const double v = ref.y() + off[2 * s + 1];
        if (u < margin || u > f.width - 1 - margin || v < margin || v > f.height - 1 - margin) {
            return false;
        }
        const double fu = u - std::floor(u);
        const double fv = v - std::floor(v);
        if (fu < margin || fu > 1 - margin || fv < margin || fv > 1 - margin) {
            return false;
        }
    }
    return true;
}

bool safe_3d_samples(const Eigen::VectorXd& q, const Vec3& p, const GaussianSet& vals,
                     const AttentionWeights& w, const Attn3dParams& params, double margin) {
    const Eigen::VectorXd off = w.offset3d.forward(q);
    for (int s = 0; s < w.samples; ++s) {
        const Vec3 x = p + Vec3(off[3 * s], off[3 * s + 1], off[3 * s + 2]);
        std::vector<double> d;
        for (const auto& g : vals.gaussians) {
            d.push_back((x - g.mean).norm());
        }
        std::sort(d.begin(), d.end());
        if (d.front() < params.eps_dist + margin) return false;  // distance floor
        const int k = std::min<int>(params.knn, static_cast<int>(d.size()));
        if (k < static_cast<int>(d.size()) && d[k] - d[k - 1] < margin) {
            return false;  // k-NN selection boundary
        }
    }
    return true;
}

struct Worst {
    double value = 0.0;
    void track(double e) { value = std::max(value, e); }
};

constexpr double kTol = 1e-4;
constexpr double kFdStep = 1e-5;

SuiteResult finish(std::string name, const Worst& w, int cases) {
    return {std::move(name), w.value, kTol, cases, w.value < kTol};
}

}  // namespace

GaussianSet random_gaussian_set(int count, int classes, const VoxelGridSpec& spec,
                                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Vec3 lo = spec.origin;
    const Vec3 hi = spec.origin + spec.voxel_size * Vec3(spec.nx, spec.ny, spec.nz);
    std::uniform_real_distribution<double> ux(0.05, 0.95);
    std::uniform_real_distribution<double> us(0.3 * spec.voxel_size, 0.8 * spec.voxel_size);
    std::normal_distribution<double> un(0.0, 1.0);
    // Channel weights kept small: the finite-cutoff truncation error at a voxel
    // center right on the k_sigma box boundary is exp(-k^2/2)*||c||, so the
    // localized-vs-dense tolerance scales with the weight magnitude.
    std::uniform_real_distribution<double> uc(0.0, 0.05);
    GaussianSet set;
    for (int i = 0; i < count; ++i) {
        const Vec3 m = lo + (hi - lo).cwiseProduct(Vec3(ux(rng), ux(rng), ux(rng)));
        UnitQuaternion q(un(rng), un(rng), un(rng), un(rng));
        VecX logits = VecX::NullaryExpr(classes, [&] { return uc(rng); });
        set.gaussians.emplace_back(m, Vec3(us(rng), us(rng), us(rng)), q, std::move(logits));
    }
    return set;
}

std::vector<SuiteResult> gradient_suite(int trials_per_op, std::uint64_t seed) {
    std::vector<SuiteResult> results;
    const int classes = 5;

    // eval_gaussian with respect to each property
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uv(-1.0, 1.0);
        Worst wm, ws, wr, wc, wp;
        for (int t = 0; t < trials_per_op; ++t) {
            const SemanticGaussian g = random_gaussian(rng, classes);
            const Vec3 p = random_point_near(rng, g);
            const VecX v = VecX::NullaryExpr(classes, [&] { return uv(rng); });
            const double vc = v.dot(g.logits);
            const KernelGrad kg = grad_eval_gaussian(g, p);

            const auto fd_m = finite_diff(
                [&](const Eigen::VectorXd& x) {
                    SemanticGaussian h = g;
                    h.mean = x;
                    return v.dot(eval_gaussian(h, p));
                },
                g.mean, kFdStep);
            wm.track(max_rel_err(fd_m, vc * kg.d_mean));

            const auto fd_s = finite_diff(
                [&](const Eigen::VectorXd& x) {
                    SemanticGaussian h = g;
                    h.scale = x;
                    return v.dot(eval_gaussian(h, p));
                },
                g.scale, kFdStep);
            ws.track(max_rel_err(fd_s, vc * kg.d_scale));

            const auto fd_r = finite_diff(
                [&](const Eigen::VectorXd& x) {
                    SemanticGaussian h = g;
                    h.rotation = UnitQuaternion(x[0], x[1], x[2], x[3]);
                    return v.dot(eval_gaussian(h, p));
                },
                g.rotation.coeffs(), kFdStep);
            wr.track(max_rel_err(fd_r, vc * kg.d_rot));

            const auto fd_c = finite_diff(
                [&](const Eigen::VectorXd& x) {
                    SemanticGaussian h = g;
                    h.logits = x;
                    return v.dot(eval_gaussian(h, p));
                },
                g.logits, kFdStep);
            wc.track(max_rel_err(fd_c, kg.kernel * v));

            const auto fd_p = finite_diff(
                [&](const Eigen::VectorXd& x) { return v.dot(eval_gaussian(g, Vec3(x))); },
                p, kFdStep);
            wp.track(max_rel_err(fd_p, vc * kg.d_point));
        }
        results.push_back(finish("eval_gaussian/d_mean", wm, trials_per_op));
        results.push_back(finish("eval_gaussian/d_scale", ws, trials_per_op));
        results.push_back(finish("eval_gaussian/d_rotation", wr, trials_per_op));
        results.push_back(finish("eval_gaussian/d_logits", wc, trials_per_op));
        results.push_back(finish("eval_gaussian/d_point", wp, trials_per_op));
    }

    const int dim = 16, hidden = 16, samples = 4;
    const AttentionWeights aw = AttentionWeights::seeded(dim, hidden, samples, seed + 7);

    // 2D deformable attention
    {
        std::mt19937_64 rng(seed + 1);
        std::uniform_real_distribution<double> uq(-1.0, 1.0);
        std::uniform_real_distribution<double> uref_u(4.0, 8.0);
        std::uniform_real_distribution<double> uref_v(3.0, 6.0);
        FeatureMap f(12, 10, dim);
        for (auto& x : f.data) x = uq(rng);

        Worst wq, wf;
        int done = 0, attempts = 0;
        while (done < trials_per_op && attempts < 50 * trials_per_op) {
            ++attempts;
            const Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(dim, [&] { return uq(rng); });
            const Eigen::Vector2d ref(uref_u(rng), uref_v(rng));
            if (!safe_2d_samples(q, ref, f, aw, 1e-3)) continue;
            const Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(dim, [&] { return uq(rng); });
            const auto grad = deformable_attn_2d_grad(q, ref, f, aw, v);

            const auto fd_q = finite_diff(
                [&](const Eigen::VectorXd& x) { return v.dot(deformable_attn_2d(x, ref, f, aw)); },
                q, kFdStep);
            wq.track(max_rel_err(fd_q, grad.d_query));

            // probe a handful of feature entries
            std::uniform_int_distribution<std::size_t> upick(0, f.data.size() - 1);
            for (int probe = 0; probe < 8; ++probe) {
                const std::size_t idx = upick(rng);
                FeatureMap fp = f;
                const double step = kFdStep * std::max(1.0, std::abs(f.data[idx]));
                fp.data[idx] = f.data[idx] + step;
                const double hi_v = v.dot(deformable_attn_2d(q, ref, fp, aw));
                fp.data[idx] = f.data[idx] - step;
                const double lo_v = v.dot(deformable_attn_2d(q, ref, fp, aw));
                wf.track(rel_err((hi_v - lo_v) / (2 * step), grad.d_features[idx]));
            }
            ++done;
        }
        results.push_back(finish("deformable_attn_2d/d_query", wq, done));
        results.push_back(finish("deformable_attn_2d/d_features", wf, done));
    }

    // 3D deformable attention
    {
        std::mt19937_64 rng(seed + 2);
        std::uniform_real_distribution<double> uq(-1.0, 1.0);
        std::uniform_real_distribution<double> um(-2.0, 2.0);
        const Attn3dParams params{4, 1e-6};

        Worst wq, wf;
        int done = 0, attempts = 0;
        while (done < trials_per_op && attempts < 50 * trials_per_op) {
            ++attempts;
            GaussianSet vals;
            const int p_count = 6;
            VecX logits = VecX::Zero(classes);
            for (int i = 0; i < p_count; ++i) {
                vals.gaussians.emplace_back(Vec3(um(rng), um(rng), um(rng)), Vec3::Ones(),
                                            UnitQuaternion::identity(), logits);
            }
            QueryMatrix feats =
                QueryMatrix::NullaryExpr(p_count, dim, [&] { return uq(rng); });
            const Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(dim, [&] { return uq(rng); });
            const Vec3 p(um(rng), um(rng), um(rng));
            if (!safe_3d_samples(q, p, vals, aw, params, 1e-3)) continue;
            const Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(dim, [&] { return uq(rng); });
            const auto grad = deformable_attn_3d_grad(q, p, vals, feats, aw, params, v);

            const auto fd_q = finite_diff(
                [&](const Eigen::VectorXd& x) {
                    return v.dot(deformable_attn_3d(x, p, vals, feats, aw, params));
                },
                q, kFdStep);
            wq.track(max_rel_err(fd_q, grad.d_query));

            std::uniform_int_distribution<int> urow(0, p_count - 1);
            std::uniform_int_distribution<int> ucol(0, dim - 1);
            for (int probe = 0; probe < 8; ++probe) {
                const int r = urow(rng), c = ucol(rng);
                QueryMatrix fp = feats;
                const double step = kFdStep * std::max(1.0, std::abs(feats(r, c)));
                fp(r, c) = feats(r, c) + step;
                const double hi_v = v.dot(deformable_attn_3d(q, p, vals, fp, aw, params));
                fp(r, c) = feats(r, c) - step;
                const double lo_v = v.dot(deformable_attn_3d(q, p, vals, fp, aw, params));
                wf.track(rel_err((hi_v - lo_v) / (2 * step), grad.d_value_feats(r, c)));
            }
            ++done;
        }
        results.push_back(finish("deformable_attn_3d/d_query", wq, done));
        results.push_back(finish("deformable_attn_3d/d_value_features", wf, done));
    }

    // property decoding
    {
        std::mt19937_64 rng(seed + 3);
        std::uniform_real_distribution<double> uq(-1.0, 1.0);
        const RefineHead head = RefineHead::seeded(dim, hidden, classes, seed + 11);

        Worst w;
        int done = 0, attempts = 0;
        while (done < trials_per_op && attempts < 50 * trials_per_op) {
            ++attempts;
            const Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(dim, [&] { return uq(rng); });
            const Eigen::VectorXd raw = head.net.forward(q);
            if (raw.segment<4>(6).norm() < 1e-3) continue;  // near quaternion fallback
            const Eigen::VectorXd v =
                Eigen::VectorXd::NullaryExpr(10 + classes, [&] { return uq(rng); });
            const auto an = decode_properties_grad(q, head, v);
            const auto fd = finite_diff(
                [&](const Eigen::VectorXd& x) {
                    const auto d = decode_properties(x, head);
                    Eigen::VectorXd flat(10 + classes);
                    flat << d.mean_residual, d.scale, d.rotation.coeffs(), d.logits;
                    return v.dot(flat);
                },
                q, kFdStep);
            w.track(max_rel_err(fd, an));
            ++done;
        }
        results.push_back(finish("decode_properties/d_input", w, done));
    }

    return results;
}

std::vector<SuiteResult> splat_oracle(int scenes, std::uint64_t seed) {
    const VoxelGridSpec spec(Vec3(-8.0, -8.0, -2.0), 0.5, 32, 32, 8);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> ucount(1, 50);
    double worst_inf = 0.0, worst_k3 = 0.0;
    for (int s = 0; s < scenes; ++s) {
        const GaussianSet set = random_gaussian_set(ucount(rng), 4, spec, rng());
        const auto dense = dense_reference_splat(set, spec);
        const auto exact = splat(set, spec, std::numeric_limits<double>::infinity());
        const auto local = splat(set, spec, 3.0);
        for (std::size_t i = 0; i < dense.values.size(); ++i) {
            worst_inf = std::max(worst_inf, std::abs(exact.values[i] - dense.values[i]));
            worst_k3 = std::max(worst_k3, std::abs(local.values[i] - dense.values[i]));
        }
    }
    return {{"splat(k_sigma=inf) vs dense", worst_inf, 1e-9, scenes, worst_inf < 1e-9},
            {"splat(k_sigma=3) vs dense", worst_k3, 1e-3, scenes, worst_k3 < 1e-3}};
}

std::vector<SuiteResult> oracle_suite(std::uint64_t seed, int scenes) {
    std::vector<SuiteResult> results;
    for (auto& r : splat_oracle(scenes, seed)) {
        results.push_back(std::move(r));
    }

    // sparse convolution vs dense masked convolution
    {
        const VoxelGridSpec spec(Vec3::Zero(), 1.0, 8, 8, 8);
        std::mt19937_64 rng(seed + 1);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_int_distribution<int> uidx(0, 7);
        const int dim = 6;
        double worst = 0.0;
        for (int s = 0; s < scenes; ++s) {
            SparseFeatureGrid grid;
            grid.spec = spec;
            grid.dim = dim;
            for (int i = 0; i < 30; ++i) {
                grid.entries[{uidx(rng), uidx(rng), uidx(rng)}] =
                    Eigen::VectorXd::NullaryExpr(dim, [&] { return u(rng); });
            }
            const auto kernel = ConvKernel3::seeded(dim, dim, rng());
            const auto out = sparse_conv3d(grid, kernel);

            // dense reference: fill a full volume, convolve, mask to support
            std::vector<Eigen::VectorXd> dense(spec.voxel_count(),
                                               Eigen::VectorXd::Zero(dim));
            auto flat = [&](int x, int y, int z) {
                return (static_cast<std::size_t>(x) * spec.ny + y) * spec.nz + z;
            };
            for (const auto& [idx, feat] : grid.entries) {
                dense[flat(idx[0], idx[1], idx[2])] = feat;
            }
            for (const auto& [idx, feat] : grid.entries) {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
                for (int dx = -1; dx <= 1; ++dx) {
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dz = -1; dz <= 1; ++dz) {
                            const int x = idx[0] + dx, y = idx[1] + dy, z = idx[2] + dz;
                            if (x < 0 || x >= spec.nx || y < 0 || y >= spec.ny || z < 0 ||
                                z >= spec.nz) {
                                continue;
                            }
                            acc += kernel.taps[ConvKernel3::tap_index(dx, dy, dz)] *
                                   dense[flat(x, y, z)];
                        }
                    }
                }
                worst = std::max(worst, (acc - out.entries.at(idx)).cwiseAbs().maxCoeff());
            }
        }
        results.push_back(
            {"sparse_conv3d vs dense masked conv", worst, 1e-9, scenes, worst < 1e-9});
    }

    // attention transcript re-computation
    {
        const int dim = 16, hidden = 16, samples = 4;
        const AttentionWeights aw = AttentionWeights::seeded(dim, hidden, samples, seed + 5);
        std::mt19937_64 rng(seed + 2);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> um(-2.0, 2.0);
        FeatureMap f(12, 10, dim);
        for (auto& x : f.data) x = u(rng);
        const Attn3dParams params{4, 1e-6};

        double worst2d = 0.0, worst3d = 0.0, worst_tsa = 0.0;
        for (int s = 0; s < scenes; ++s) {
            const Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(dim, [&] { return u(rng); });
            const Eigen::Vector2d ref(4.0 + 4.0 * u(rng), 4.0 + 2.0 * u(rng));
            worst2d = std::max(
                worst2d,
                (deformable_attn_2d(q, ref, f, aw) - ref_da2d(q, ref, f, aw)).cwiseAbs().maxCoeff());

            GaussianSet vals;
            VecX logits = VecX::Zero(3);
            for (int i = 0; i < 6; ++i) {
                vals.gaussians.emplace_back(Vec3(um(rng), um(rng), um(rng)), Vec3::Ones(),
                                            UnitQuaternion::identity(), logits);
            }
            QueryMatrix feats = QueryMatrix::NullaryExpr(6, dim, [&] { return u(rng); });
            const Vec3 p(um(rng), um(rng), um(rng));
            worst3d = std::max(worst3d, (deformable_attn_3d(q, p, vals, feats, aw, params) -
                                         ref_da3d(q, p, vals, feats, aw, params, nullptr))
                                            .cwiseAbs()
                                            .maxCoeff());

            // TSA transcript: per-row sum of two context-conditioned terms
            QueryMatrix qm = QueryMatrix::NullaryExpr(6, dim, [&] { return u(rng); });
            GaussianSet hist_set = vals;
            for (auto& g : hist_set.gaussians) {
                g.mean += Vec3(0.3, -0.2, 0.1);
            }
            QueryMatrix hist_q = QueryMatrix::NullaryExpr(6, dim, [&] { return u(rng); });
            const QueryMatrix out =
                temporal_self_attention(qm, vals, &hist_set, &hist_q, aw, params);
            for (int i = 0; i < 6; ++i) {
                Eigen::VectorXd ctx(2 * dim);
                ctx << qm.row(i).transpose(), hist_q.row(i).transpose();
                const Eigen::VectorXd expect =
                    ref_da3d(qm.row(i).transpose(), vals.gaussians[i].mean, vals, qm, aw, params,
                             &ctx) +
                    ref_da3d(qm.row(i).transpose(), vals.gaussians[i].mean, hist_set, hist_q, aw,
                             params, &ctx);
                worst_tsa = std::max(
                    worst_tsa, (out.row(i).transpose() - expect).cwiseAbs().maxCoeff());
            }
        }
        results.push_back({"deformable_attn_2d transcript", worst2d, 1e-9, scenes, worst2d < 1e-9});
        results.push_back({"deformable_attn_3d transcript", worst3d, 1e-9, scenes, worst3d < 1e-9});
        results.push_back(
            {"temporal_self_attention transcript", worst_tsa, 1e-9, scenes, worst_tsa < 1e-9});
    }

    return results;
}

}  // namespace gaussocc::check
