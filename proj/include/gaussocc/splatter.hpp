#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "gaussocc/gaussian.hpp"
#include "gaussocc/grid.hpp"

namespace gaussocc {

using QueryMatrix = Eigen::MatrixXd;  // P x D

/// Inclusive voxel-index box; empty() when no voxel qualifies.
struct VoxelBox {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{-1, -1, -1};

    bool empty() const { return hi[0] < lo[0] || hi[1] < lo[1] || hi[2] < lo[2]; }
};

/// Conservative AABB of voxels whose centers can lie within Mahalanobis
/// distance k_sigma of the Gaussian mean, clipped to the grid.
VoxelBox gaussian_extent(const SemanticGaussian& g, double k_sigma, const VoxelGridSpec& spec);

/// Accumulates every Gaussian onto the voxel centers inside its extent.
/// Infinite k_sigma reproduces the dense mixture evaluation. With
/// workers > 1 each worker owns a contiguous Gaussian chunk and buffers are
/// reduced in worker order; deterministic_reduction forces a single worker
/// so the result is bitwise identical to the sequential sum.
SemanticVoxelGrid splat(const GaussianSet& set, const VoxelGridSpec& spec, double k_sigma,
                        int workers = 1, bool deterministic_reduction = true);

/// classify() applied per voxel.
LabelGrid classify_grid(const SemanticVoxelGrid& grid, double tau_occ);

struct VoxelizeResult {
    SparseFeatureGrid grid;
    int dropped = 0;  // means outside the grid
};

/// Scatters per-Gaussian features to the voxels containing the means.
/// Colliding features are averaged.
VoxelizeResult voxelize_means(const GaussianSet& set, const QueryMatrix& features,
                              const VoxelGridSpec& spec);

/// 3x3x3 convolution kernel; tap (dx,dy,dz) in {-1,0,1}^3 holds a
/// D_out x D_in matrix.
struct ConvKernel3 {
    int in_dim = 0;
    int out_dim = 0;
    std::array<Eigen::MatrixXd, 27> taps;

    static int tap_index(int dx, int dy, int dz) {
        return ((dx + 1) * 3 + (dy + 1)) * 3 + (dz + 1);
    }

    static ConvKernel3 identity(int dim);
    static ConvKernel3 seeded(int in_dim, int out_dim, std::uint64_t seed);
};

/// Submanifold sparse convolution: output support equals input support and
/// only occupied neighbors contribute.
SparseFeatureGrid sparse_conv3d(const SparseFeatureGrid& grid, const ConvKernel3& kernel);

/// Reads each Gaussian's voxel feature back into its query row; rows whose
/// means fell outside the grid keep their prior feature.
QueryMatrix scatter_features(const SparseFeatureGrid& grid, const GaussianSet& set,
                             const QueryMatrix& prior);

}  // namespace gaussocc
