#include "gaussocc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace gaussocc {

void ConfusionAccumulator::add(int pred_label, int gt_label) {
    if (gt_label == kUnknownLabel) {
        return;
    }
    for (int k = 0; k < class_count; ++k) {
        const bool in_pred = pred_label == k;
        const bool in_gt = gt_label == k;
        if (in_pred && in_gt) ++intersection[k];
        if (in_pred || in_gt) ++union_[k];
        if (in_pred) ++pred_support[k];
        if (in_gt) ++gt_support[k];
    }
    const bool pred_occ = pred_label >= 0;
    const bool gt_occ = gt_label >= 0;
    if (pred_occ && gt_occ) ++occ_intersection;
    if (pred_occ || gt_occ) ++occ_union;
}

void ConfusionAccumulator::merge(const ConfusionAccumulator& other) {
    if (other.class_count != class_count) {
        throw std::invalid_argument("ConfusionAccumulator: class count mismatch");
    }
    for (int k = 0; k < class_count; ++k) {
        intersection[k] += other.intersection[k];
        union_[k] += other.union_[k];
        pred_support[k] += other.pred_support[k];
        gt_support[k] += other.gt_support[k];
    }
    occ_intersection += other.occ_intersection;
    occ_union += other.occ_union;
}

double ConfusionAccumulator::iou(int k) const {
    if (union_[k] == 0) {
        return 1.0;  // both masks empty
    }
    return static_cast<double>(intersection[k]) / static_cast<double>(union_[k]);
}

double ConfusionAccumulator::miou() const {
    double sum = 0.0;
    int present = 0;
    for (int k = 0; k < class_count; ++k) {
        if (union_[k] == 0) continue;  // class absent from both
        sum += iou(k);
        ++present;
    }
    return present == 0 ? 0.0 : sum / present;
}

double ConfusionAccumulator::sc_iou() const {
    if (occ_union == 0) {
        return 1.0;
    }
    return static_cast<double>(occ_intersection) / static_cast<double>(occ_union);
}

ConfusionAccumulator accumulate(const LabelGrid& pred, const LabelGrid& gt, int class_count) {
    if (!(pred.spec == gt.spec)) {
        throw std::invalid_argument("accumulate: grid spec mismatch");
    }
    ConfusionAccumulator acc(class_count);
    for (std::size_t i = 0; i < pred.labels.size(); ++i) {
        acc.add(pred.labels[i], gt.labels[i]);
    }
    return acc;
}

double iou(const LabelGrid& pred, const LabelGrid& gt, int class_count, int k) {
    return accumulate(pred, gt, class_count).iou(k);
}

double miou(const LabelGrid& pred, const LabelGrid& gt, int class_count) {
    return accumulate(pred, gt, class_count).miou();
}

Eigen::VectorXd finite_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (int i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + step;
        const double fp = f(probe);
        probe[i] = x[i] - step;
        const double fm = f(probe);
        probe[i] = x[i];
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw std::runtime_error("finite_diff: non-finite value at coordinate " +
                                     std::to_string(i));
        }
        grad[i] = (fp - fm) / (2.0 * step);
    }
    return grad;
}

SemanticVoxelGrid dense_reference_splat(const GaussianSet& set, const VoxelGridSpec& spec) {
    const int channels = set.gaussians.empty() ? 0 : static_cast<int>(set.gaussians.front().logits.size());
    SemanticVoxelGrid grid(spec, channels);
    if (channels == 0) {
        return grid;
    }
    for (int ix = 0; ix < spec.nx; ++ix) {
        for (int iy = 0; iy < spec.ny; ++iy) {
            for (int iz = 0; iz < spec.nz; ++iz) {
                grid.at(ix, iy, iz) = eval_mixture(set, spec.center(ix, iy, iz));
            }
        }
    }
    return grid;
}

}  // namespace gaussocc
