#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gaussocc/metrics.hpp"

using namespace gaussocc;

namespace {

LabelGrid flat_grid(const VoxelGridSpec& spec, int label) {
    LabelGrid g(spec);
    std::fill(g.labels.begin(), g.labels.end(), label);
    return g;
}

const VoxelGridSpec kSpec(Vec3::Zero(), 1.0, 4, 4, 4);

}  // namespace

TEST_CASE("perfect prediction scores 1.0 for every present class") {
    LabelGrid g(kSpec);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> u(-1, 2);
    for (auto& l : g.labels) l = u(rng);
    const auto acc = accumulate(g, g, 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(acc.iou(k) == 1.0);
    }
    CHECK(acc.miou() == 1.0);
    CHECK(acc.sc_iou() == 1.0);
}

TEST_CASE("disjoint masks score 0.0") {
    LabelGrid pred(kSpec), gt(kSpec);
    pred.at(0, 0, 0) = 1;
    gt.at(1, 0, 0) = 1;
    CHECK(iou(pred, gt, 2, 1) == 0.0);
}

TEST_CASE("half-overlapping equal masks score exactly one third") {
    // class 1 occupies 32 voxels in each grid, overlapping on 16
    LabelGrid pred(kSpec), gt(kSpec);
    int i = 0;
    for (int ix = 0; ix < 4; ++ix) {
        for (int iy = 0; iy < 4; ++iy) {
            for (int iz = 0; iz < 4; ++iz, ++i) {
                if (i < 32) pred.at(ix, iy, iz) = 1;
                if (i >= 16 && i < 48) gt.at(ix, iy, iz) = 1;
            }
        }
    }
    CHECK(iou(pred, gt, 2, 1) == 1.0 / 3.0);
}

TEST_CASE("mean IoU edge cases") {
    // identical grids
    LabelGrid g(kSpec);
    g.at(0, 0, 0) = 0;
    g.at(1, 1, 1) = 2;
    CHECK(miou(g, g, 3) == 1.0);

    // one class perfect, one disjoint: mean 0.5
    LabelGrid pred(kSpec), gt(kSpec);
    pred.at(0, 0, 0) = 0;
    gt.at(0, 0, 0) = 0;
    pred.at(1, 0, 0) = 1;
    gt.at(2, 0, 0) = 1;
    CHECK(miou(pred, gt, 2) == 0.5);

    // absent classes are excluded from the mean
    CHECK(miou(pred, gt, 10) == 0.5);

    // nothing present anywhere
    CHECK(miou(LabelGrid(kSpec), LabelGrid(kSpec), 3) == 0.0);
}

TEST_CASE("three-class scene matches a direct counting script") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> u(-1, 2);
    LabelGrid pred(kSpec), gt(kSpec);
    for (auto& l : pred.labels) l = u(rng);
    for (auto& l : gt.labels) l = u(rng);

    const auto acc = accumulate(pred, gt, 3);
    for (int k = 0; k < 3; ++k) {
        long long inter = 0, uni = 0;
        for (std::size_t i = 0; i < pred.labels.size(); ++i) {
            const bool p = pred.labels[i] == k;
            const bool g = gt.labels[i] == k;
            inter += p && g;
            uni += p || g;
        }
        CHECK(acc.iou(k) == static_cast<double>(inter) / uni);
    }
}

TEST_CASE("unknown ground-truth voxels are excluded everywhere") {
    LabelGrid pred(kSpec), gt(kSpec);
    // prediction claims class 0 in two voxels; gt marks one of them unknown
    pred.at(0, 0, 0) = 0;
    pred.at(1, 0, 0) = 0;
    gt.at(0, 0, 0) = 0;
    gt.at(1, 0, 0) = kUnknownLabel;
    CHECK(iou(pred, gt, 1, 0) == 1.0);
    const auto acc = accumulate(pred, gt, 1);
    CHECK(acc.sc_iou() == 1.0);
}

TEST_CASE("IoU is symmetric and accumulators merge by addition") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> u(-1, 3);
    LabelGrid a(kSpec), b(kSpec);
    for (auto& l : a.labels) l = u(rng);
    for (auto& l : b.labels) l = u(rng);
    for (int k = 0; k < 4; ++k) {
        CHECK(iou(a, b, 4, k) == iou(b, a, 4, k));
    }

    // shard by voxel parity, then merge
    ConfusionAccumulator left(4), right(4);
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        (i % 2 ? left : right).add(a.labels[i], b.labels[i]);
    }
    left.merge(right);
    const auto whole = accumulate(a, b, 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(left.iou(k) == whole.iou(k));
    }
    CHECK(left.miou() == whole.miou());
    CHECK(left.sc_iou() == whole.sc_iou());
}

TEST_CASE("metric functions validate their inputs") {
    LabelGrid a(kSpec);
    LabelGrid b(VoxelGridSpec(Vec3::Zero(), 1.0, 5, 4, 4));
    CHECK_THROWS_AS(iou(a, b, 2, 0), std::invalid_argument);
}

TEST_CASE("finite differences: constants and quadratics") {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, -2.0, 2.0);
    const auto zero = finite_diff([](const Eigen::VectorXd&) { return 3.0; }, x);
    CHECK(zero.cwiseAbs().maxCoeff() < 1e-9);

    const auto grad = finite_diff([](const Eigen::VectorXd& v) { return v.squaredNorm(); }, x);
    CHECK((grad - 2.0 * x).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("finite differences report non-finite evaluations") {
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(
        finite_diff([](const Eigen::VectorXd& v) { return std::log(-v[0]); }, x),
        std::runtime_error);
}

TEST_CASE("dense reference splat basics") {
    const VoxelGridSpec spec(Vec3(-2.0, -2.0, -2.0), 1.0, 4, 4, 4);
    const auto empty = dense_reference_splat(GaussianSet{}, spec);
    CHECK(empty.channels == 0);

    GaussianSet set;
    VecX c(2);
    c << 0.5, 0.25;
    set.gaussians.emplace_back(Vec3(0.1, -0.3, 0.2), Vec3(0.8, 1.1, 0.6),
                               UnitQuaternion::from_axis_angle(Vec3(1, 1, 1), 0.5), c);
    const auto grid = dense_reference_splat(set, spec);
    for (int ix = 0; ix < 4; ++ix) {
        for (int iy = 0; iy < 4; ++iy) {
            for (int iz = 0; iz < 4; ++iz) {
                const VecX expect = eval_mixture(set, spec.center(ix, iy, iz));
                CHECK((grid.at(ix, iy, iz) - expect).cwiseAbs().maxCoeff() == 0.0);
            }
        }
    }
}
