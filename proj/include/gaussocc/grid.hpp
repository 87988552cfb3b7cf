#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "gaussocc/geometry.hpp"

namespace gaussocc {

inline constexpr int kEmptyLabel = -1;
inline constexpr int kUnknownLabel = -2;  // evaluation-mask label, never predicted

/// Target volume geometry. Voxel (ix,iy,iz) spans
/// [origin + i*voxel_size, origin + (i+1)*voxel_size); centers at half-steps.
struct VoxelGridSpec {
    Vec3 origin = Vec3::Zero();
    double voxel_size = 1.0;
    int nx = 1, ny = 1, nz = 1;

    VoxelGridSpec() = default;
    VoxelGridSpec(const Vec3& o, double vs, int x, int y, int z)
        : origin(o), voxel_size(vs), nx(x), ny(y), nz(z) {
        if (vs <= 0.0 || x < 1 || y < 1 || z < 1) {
            throw std::invalid_argument("VoxelGridSpec: invalid dimensions");
        }
    }

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }

    Vec3 center(int ix, int iy, int iz) const {
        return origin + voxel_size * Vec3(ix + 0.5, iy + 0.5, iz + 0.5);
    }

    bool contains(int ix, int iy, int iz) const {
        return ix >= 0 && ix < nx && iy >= 0 && iy < ny && iz >= 0 && iz < nz;
    }

    /// Voxel index of a point, or false when outside the grid.
    bool locate(const Vec3& p, std::array<int, 3>& idx) const {
        const Vec3 rel = (p - origin) / voxel_size;
        idx = {static_cast<int>(std::floor(rel.x())),
               static_cast<int>(std::floor(rel.y())),
               static_cast<int>(std::floor(rel.z()))};
        return contains(idx[0], idx[1], idx[2]);
    }

    bool operator==(const VoxelGridSpec& o) const {
        return origin == o.origin && voxel_size == o.voxel_size &&
               nx == o.nx && ny == o.ny && nz == o.nz;
    }
};

/// Dense per-voxel semantic vectors, row-major x-then-y-then-z, channels
/// innermost.
struct SemanticVoxelGrid {
    VoxelGridSpec spec;
    int channels = 0;
    std::vector<double> values;

    SemanticVoxelGrid() = default;
    SemanticVoxelGrid(const VoxelGridSpec& s, int c)
        : spec(s), channels(c), values(s.voxel_count() * c, 0.0) {}

    std::size_t offset(int ix, int iy, int iz) const {
        return ((static_cast<std::size_t>(ix) * spec.ny + iy) * spec.nz + iz) * channels;
    }

    Eigen::Map<Eigen::VectorXd> at(int ix, int iy, int iz) {
        return {values.data() + offset(ix, iy, iz), channels};
    }
    Eigen::Map<const Eigen::VectorXd> at(int ix, int iy, int iz) const {
        return {values.data() + offset(ix, iy, iz), channels};
    }
};

/// Dense per-voxel class labels (kEmptyLabel / kUnknownLabel / 0..C-1).
struct LabelGrid {
    VoxelGridSpec spec;
    std::vector<int> labels;

    LabelGrid() = default;
    explicit LabelGrid(const VoxelGridSpec& s) : spec(s), labels(s.voxel_count(), kEmptyLabel) {}

    int& at(int ix, int iy, int iz) {
        return labels[(static_cast<std::size_t>(ix) * spec.ny + iy) * spec.nz + iz];
    }
    int at(int ix, int iy, int iz) const {
        return labels[(static_cast<std::size_t>(ix) * spec.ny + iy) * spec.nz + iz];
    }
};

/// Sparse voxel -> feature map. Ordered keys keep iteration deterministic.
struct SparseFeatureGrid {
    VoxelGridSpec spec;
    int dim = 0;
    std::map<std::array<int, 3>, Eigen::VectorXd> entries;
};

}  // namespace gaussocc
