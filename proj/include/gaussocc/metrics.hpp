#pragma once

#include <functional>
#include <vector>

#include "gaussocc/splatter.hpp"

namespace gaussocc {

/// Per-class intersection/union/support counts over voxels. Voxels labeled
/// kUnknownLabel in the ground truth are excluded everywhere. Accumulators
/// merge by addition, so parallel shards combine cleanly.
struct ConfusionAccumulator {
    int class_count = 0;
    std::vector<long long> intersection;
    std::vector<long long> union_;
    std::vector<long long> pred_support;
    std::vector<long long> gt_support;
    long long occ_intersection = 0;  // binary occupied-vs-empty counts
    long long occ_union = 0;

    explicit ConfusionAccumulator(int classes)
        : class_count(classes),
          intersection(classes, 0),
          union_(classes, 0),
          pred_support(classes, 0),
          gt_support(classes, 0) {}

    void add(int pred_label, int gt_label);
    void merge(const ConfusionAccumulator& other);

    /// IoU of one class; 1 when both masks are empty, 0 when exactly one is.
    double iou(int k) const;
    /// Unweighted mean over classes present in pred or gt.
    double miou() const;
    /// Binary occupied-vs-empty IoU (the SC-IoU-style score).
    double sc_iou() const;
};

ConfusionAccumulator accumulate(const LabelGrid& pred, const LabelGrid& gt, int class_count);

double iou(const LabelGrid& pred, const LabelGrid& gt, int class_count, int k);
double miou(const LabelGrid& pred, const LabelGrid& gt, int class_count);

/// Central finite differences with per-coordinate step h*max(1, |x_i|).
Eigen::VectorXd finite_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h = 1e-5);

/// Naive triple-loop mixture evaluation with no spatial cutoff; the ground
/// truth for splat.
SemanticVoxelGrid dense_reference_splat(const GaussianSet& set, const VoxelGridSpec& spec);

}  // namespace gaussocc
