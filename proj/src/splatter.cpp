#include "gaussocc/splatter.hpp"

#include <cmath>
#include <random>
#include <thread>

namespace gaussocc {

VoxelBox gaussian_extent(const SemanticGaussian& g, double k_sigma, const VoxelGridSpec& spec) {
    VoxelBox box;
    if (!std::isfinite(k_sigma)) {
        box.lo = {0, 0, 0};
        box.hi = {spec.nx - 1, spec.ny - 1, spec.nz - 1};
        return box;
    }
    const Mat3 sigma = compose_covariance(g.scale, g.rotation);
    for (int i = 0; i < 3; ++i) {
        // |d_i| <= k * sqrt(Sigma_ii) inside the Mahalanobis ball
        const double e = k_sigma * std::sqrt(sigma(i, i)) + 1e-9;
        const double lo = (g.mean[i] - e - spec.origin[i]) / spec.voxel_size - 0.5;
        const double hi = (g.mean[i] + e - spec.origin[i]) / spec.voxel_size - 0.5;
        box.lo[i] = std::max(0, static_cast<int>(std::ceil(lo)));
        const int n = (i == 0 ? spec.nx : i == 1 ? spec.ny : spec.nz);
        box.hi[i] = std::min(n - 1, static_cast<int>(std::floor(hi)));
    }
    return box;
}

namespace {

void splat_range(const GaussianSet& set, int begin, int end, const VoxelGridSpec& spec,
                 double k_sigma, SemanticVoxelGrid& grid) {
    for (int gi = begin; gi < end; ++gi) {
        const auto& g = set.gaussians[gi];
        const VoxelBox box = gaussian_extent(g, k_sigma, spec);
        if (box.empty()) continue;
        for (int ix = box.lo[0]; ix <= box.hi[0]; ++ix) {
            for (int iy = box.lo[1]; iy <= box.hi[1]; ++iy) {
                for (int iz = box.lo[2]; iz <= box.hi[2]; ++iz) {
                    const double k = eval_kernel(g, spec.center(ix, iy, iz));
                    if (k != 0.0) {
                        grid.at(ix, iy, iz) += k * g.logits;
                    }
                }
            }
        }
    }
}

}  // namespace

SemanticVoxelGrid splat(const GaussianSet& set, const VoxelGridSpec& spec, double k_sigma,
                        int workers, bool deterministic_reduction) {
    const int channels = set.gaussians.empty() ? 0 : static_cast<int>(set.gaussians.front().logits.size());
    SemanticVoxelGrid grid(spec, channels);
    if (set.gaussians.empty()) {
        return grid;
    }
    const int p = set.size();
    if (deterministic_reduction || workers <= 1 || p < 2 * workers) {
        splat_range(set, 0, p, spec, k_sigma, grid);
        return grid;
    }
    std::vector<SemanticVoxelGrid> partials(workers, SemanticVoxelGrid(spec, channels));
    std::vector<std::thread> pool;
    const int chunk = (p + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(p, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            splat_range(set, begin, end, spec, k_sigma, partials[w]);
        });
    }
    for (auto& t : pool) t.join();
    // fixed reduction order keeps the result reproducible run to run
    for (const auto& part : partials) {
        for (std::size_t i = 0; i < grid.values.size(); ++i) {
            grid.values[i] += part.values[i];
        }
    }
    return grid;
}

LabelGrid classify_grid(const SemanticVoxelGrid& grid, double tau_occ) {
    LabelGrid out(grid.spec);
    for (int ix = 0; ix < grid.spec.nx; ++ix) {
        for (int iy = 0; iy < grid.spec.ny; ++iy) {
            for (int iz = 0; iz < grid.spec.nz; ++iz) {
                out.at(ix, iy, iz) = classify(grid.at(ix, iy, iz), tau_occ);
            }
        }
    }
    return out;
}

VoxelizeResult voxelize_means(const GaussianSet& set, const QueryMatrix& features,
                              const VoxelGridSpec& spec) {
    if (features.rows() != set.size()) {
        throw std::invalid_argument("voxelize_means: feature row count != P");
    }
    VoxelizeResult result;
    result.grid.spec = spec;
    result.grid.dim = static_cast<int>(features.cols());
    std::map<std::array<int, 3>, int> counts;
    for (int i = 0; i < set.size(); ++i) {
        std::array<int, 3> idx;
        if (!spec.locate(set.gaussians[i].mean, idx)) {
            ++result.dropped;
            continue;
        }
        auto [it, fresh] = result.grid.entries.try_emplace(idx, features.row(i).transpose());
        if (!fresh) {
            it->second += features.row(i).transpose();
        }
        ++counts[idx];
    }
    for (auto& [idx, feat] : result.grid.entries) {
        feat /= counts[idx];
    }
    return result;
}

ConvKernel3 ConvKernel3::identity(int dim) {
    ConvKernel3 k;
    k.in_dim = k.out_dim = dim;
    for (auto& t : k.taps) t = Eigen::MatrixXd::Zero(dim, dim);
    k.taps[tap_index(0, 0, 0)] = Eigen::MatrixXd::Identity(dim, dim);
    return k;
}

ConvKernel3 ConvKernel3::seeded(int in_dim, int out_dim, std::uint64_t seed) {
    ConvKernel3 k;
    k.in_dim = in_dim;
    k.out_dim = out_dim;
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(27.0 * in_dim);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& t : k.taps) {
        t = Eigen::MatrixXd::NullaryExpr(out_dim, in_dim, [&] { return dist(rng); });
    }
    return k;
}

SparseFeatureGrid sparse_conv3d(const SparseFeatureGrid& grid, const ConvKernel3& kernel) {
    if (kernel.in_dim != grid.dim) {
        throw std::invalid_argument("sparse_conv3d: kernel input dim mismatch");
    }
    SparseFeatureGrid out;
    out.spec = grid.spec;
    out.dim = kernel.out_dim;
    for (const auto& [idx, feat] : grid.entries) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(kernel.out_dim);
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dz = -1; dz <= 1; ++dz) {
                    const std::array<int, 3> nb{idx[0] + dx, idx[1] + dy, idx[2] + dz};
                    const auto it = grid.entries.find(nb);
                    if (it != grid.entries.end()) {
                        acc += kernel.taps[ConvKernel3::tap_index(dx, dy, dz)] * it->second;
                    }
                }
            }
        }
        out.entries.emplace(idx, std::move(acc));
    }
    return out;
}

QueryMatrix scatter_features(const SparseFeatureGrid& grid, const GaussianSet& set,
                             const QueryMatrix& prior) {
    if (prior.rows() != set.size()) {
        throw std::invalid_argument("scatter_features: prior row count != P");
    }
    QueryMatrix out = prior;
    for (int i = 0; i < set.size(); ++i) {
        std::array<int, 3> idx;
        if (!grid.spec.locate(set.gaussians[i].mean, idx)) {
            continue;
        }
        const auto it = grid.entries.find(idx);
        if (it != grid.entries.end()) {
            out.row(i) = it->second.transpose();
        }
    }
    return out;
}

}  // namespace gaussocc
