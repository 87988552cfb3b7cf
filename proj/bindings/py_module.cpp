#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaussocc/gradcheck.hpp"
#include "gaussocc/io.hpp"
#include "gaussocc/scene.hpp"

namespace py = pybind11;
using namespace gaussocc;

namespace {

GaussianSet set_from_arrays(const Eigen::MatrixXd& means, const Eigen::MatrixXd& scales,
                            const Eigen::MatrixXd& rotations, const Eigen::MatrixXd& logits) {
    const auto p = means.rows();
    if (scales.rows() != p || rotations.rows() != p || logits.rows() != p ||
        means.cols() != 3 || scales.cols() != 3 || rotations.cols() != 4) {
        throw std::invalid_argument("expected means Px3, scales Px3, rotations Px4, logits PxC");
    }
    GaussianSet set;
    for (Eigen::Index i = 0; i < p; ++i) {
        set.gaussians.emplace_back(
            means.row(i).transpose(), scales.row(i).transpose(),
            UnitQuaternion(rotations(i, 0), rotations(i, 1), rotations(i, 2), rotations(i, 3)),
            logits.row(i).transpose());
    }
    return set;
}

py::array_t<double> grid_to_array(const SemanticVoxelGrid& grid) {
    py::array_t<double> out({grid.spec.nx, grid.spec.ny, grid.spec.nz, grid.channels});
    std::copy(grid.values.begin(), grid.values.end(), out.mutable_data());
    return out;
}

py::array_t<int> labels_to_array(const LabelGrid& grid) {
    py::array_t<int> out({grid.spec.nx, grid.spec.ny, grid.spec.nz});
    std::copy(grid.labels.begin(), grid.labels.end(), out.mutable_data());
    return out;
}

LabelGrid labels_from_array(const py::array_t<int, py::array::c_style | py::array::forcecast>& a,
                            const VoxelGridSpec& spec) {
    if (a.ndim() != 3 || a.shape(0) != spec.nx || a.shape(1) != spec.ny || a.shape(2) != spec.nz) {
        throw std::invalid_argument("label array shape does not match grid spec");
    }
    LabelGrid g(spec);
    std::copy(a.data(), a.data() + a.size(), g.labels.begin());
    return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sparse semantic Gaussian occupancy engine";

    py::class_<VoxelGridSpec>(m, "VoxelGridSpec")
        .def(py::init<const Vec3&, double, int, int, int>(), py::arg("origin"),
             py::arg("voxel_size"), py::arg("nx"), py::arg("ny"), py::arg("nz"))
        .def_readonly("origin", &VoxelGridSpec::origin)
        .def_readonly("voxel_size", &VoxelGridSpec::voxel_size)
        .def_readonly("nx", &VoxelGridSpec::nx)
        .def_readonly("ny", &VoxelGridSpec::ny)
        .def_readonly("nz", &VoxelGridSpec::nz);

    m.def("quat_to_rot", [](double w, double x, double y, double z) {
        return quat_to_rot(UnitQuaternion(w, x, y, z));
    });
    m.def("compose_covariance", [](const Vec3& s, double w, double x, double y, double z) {
        return compose_covariance(s, UnitQuaternion(w, x, y, z));
    });
    m.def("eval_mixture",
          [](const Eigen::MatrixXd& means, const Eigen::MatrixXd& scales,
             const Eigen::MatrixXd& rotations, const Eigen::MatrixXd& logits, const Vec3& p) {
              return eval_mixture(set_from_arrays(means, scales, rotations, logits), p);
          },
          py::arg("means"), py::arg("scales"), py::arg("rotations"), py::arg("logits"),
          py::arg("point"));
    m.def("splat",
          [](const Eigen::MatrixXd& means, const Eigen::MatrixXd& scales,
             const Eigen::MatrixXd& rotations, const Eigen::MatrixXd& logits,
             const VoxelGridSpec& spec, double k_sigma) {
              return grid_to_array(
                  splat(set_from_arrays(means, scales, rotations, logits), spec, k_sigma));
          },
          py::arg("means"), py::arg("scales"), py::arg("rotations"), py::arg("logits"),
          py::arg("spec"), py::arg("k_sigma") = 3.0);
    m.def("dense_reference_splat",
          [](const Eigen::MatrixXd& means, const Eigen::MatrixXd& scales,
             const Eigen::MatrixXd& rotations, const Eigen::MatrixXd& logits,
             const VoxelGridSpec& spec) {
              return grid_to_array(
                  dense_reference_splat(set_from_arrays(means, scales, rotations, logits), spec));
          });
    m.def("classify_grid",
          [](const Eigen::MatrixXd& means, const Eigen::MatrixXd& scales,
             const Eigen::MatrixXd& rotations, const Eigen::MatrixXd& logits,
             const VoxelGridSpec& spec, double k_sigma, double tau_occ) {
              return labels_to_array(classify_grid(
                  splat(set_from_arrays(means, scales, rotations, logits), spec, k_sigma),
                  tau_occ));
          },
          py::arg("means"), py::arg("scales"), py::arg("rotations"), py::arg("logits"),
          py::arg("spec"), py::arg("k_sigma") = 3.0, py::arg("tau_occ") = 0.05);
    m.def("miou",
          [](const py::array_t<int, py::array::c_style | py::array::forcecast>& pred,
             const py::array_t<int, py::array::c_style | py::array::forcecast>& gt,
             const VoxelGridSpec& spec, int class_count) {
              return miou(labels_from_array(pred, spec), labels_from_array(gt, spec), class_count);
          });
    m.def("iou",
          [](const py::array_t<int, py::array::c_style | py::array::forcecast>& pred,
             const py::array_t<int, py::array::c_style | py::array::forcecast>& gt,
             const VoxelGridSpec& spec, int class_count, int k) {
              return iou(labels_from_array(pred, spec), labels_from_array(gt, spec), class_count,
                         k);
          });
    m.def("memory_ratio", &memory_ratio, py::arg("gaussian_count"), py::arg("class_count"),
          py::arg("spec"));
    m.def("run_synthetic_sequence",
          [](std::uint64_t seed, int frames, int gaussians, int blocks) {
              RunConfig cfg;
              cfg.seed = seed;
              cfg.frame_count = frames;
              cfg.gaussian_count = gaussians;
              cfg.blocks = blocks;
              auto seq = generate_scene(cfg, seed);
              const auto weights = ModelWeights::seeded(cfg);
              const auto result = run_sequence(seq.frames, weights, cfg);
              py::list grids;
              for (const auto& g : result.grids) {
                  grids.append(grid_to_array(g));
              }
              py::list gts;
              for (const auto& g : seq.ground_truth) {
                  gts.append(labels_to_array(g));
              }
              return py::make_tuple(grids, gts);
          },
          py::arg("seed") = 42, py::arg("frames") = 1, py::arg("gaussians") = 64,
          py::arg("blocks") = 1);
}
