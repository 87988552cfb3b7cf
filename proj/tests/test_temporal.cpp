#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gaussocc/scene.hpp"
#include "gaussocc/temporal.hpp"

using namespace gaussocc;

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.grid = VoxelGridSpec(Vec3(-4.0, -4.0, -1.0), 0.5, 16, 16, 4);
    cfg.gaussian_count = 32;
    cfg.class_count = 6;
    cfg.embed_dim = 12;
    cfg.hidden_dim = 8;
    cfg.blocks = 2;
    cfg.num_cameras = 2;
    cfg.image_width = 24;
    cfg.image_height = 18;
    cfg.frame_count = 2;
    return cfg;
}

HistoryState random_history(std::uint64_t seed, int count, int dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::normal_distribution<double> n(0.0, 1.0);
    HistoryState h;
    for (int i = 0; i < count; ++i) {
        h.gaussians.gaussians.emplace_back(
            Vec3(u(rng), u(rng), u(rng)), Vec3(0.4, 0.7, 0.5),
            UnitQuaternion(n(rng), n(rng), n(rng), n(rng)),
            Eigen::Vector3d(u(rng), u(rng), u(rng)));
    }
    h.queries = QueryMatrix::NullaryExpr(count, dim, [&] { return u(rng); });
    h.ego_pose = RigidPose::identity();
    return h;
}

bool grids_equal(const SemanticVoxelGrid& a, const SemanticVoxelGrid& b) {
    if (a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.values[i] != b.values[i]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("zero ego-motion leaves history untouched") {
    const HistoryState h = random_history(1, 10, 4);
    const HistoryState a = align_history(h, h.ego_pose);
    for (int i = 0; i < 10; ++i) {
        CHECK((a.gaussians.gaussians[i].mean - h.gaussians.gaussians[i].mean).norm() < 1e-15);
        CHECK((a.gaussians.gaussians[i].rotation.coeffs() -
               h.gaussians.gaussians[i].rotation.coeffs())
                  .norm() < 1e-15);
    }
    CHECK((a.queries - h.queries).norm() == 0.0);
}

TEST_CASE("pure ego translation shifts means by minus t") {
    const HistoryState h = random_history(2, 10, 4);
    const Vec3 t(0.5, -1.0, 0.25);
    const RigidPose pose_t{UnitQuaternion::identity(), t};
    const HistoryState a = align_history(h, pose_t);
    for (int i = 0; i < 10; ++i) {
        CHECK((a.gaussians.gaussians[i].mean - (h.gaussians.gaussians[i].mean - t)).norm() <
              1e-12);
        // quaternion composition renormalizes, so allow rounding noise
        CHECK((a.gaussians.gaussians[i].rotation.coeffs() -
               h.gaussians.gaussians[i].rotation.coeffs())
                  .norm() < 1e-14);
    }
}

TEST_CASE("quarter-turn ego yaw: aligned field matches the world-frame oracle") {
    const HistoryState h = random_history(3, 12, 4);
    const RigidPose pose_t{UnitQuaternion::from_axis_angle(Vec3(0, 0, 1), M_PI / 2.0),
                           Vec3(1.0, 2.0, 0.0)};
    const HistoryState a = align_history(h, pose_t);

    // scripted oracle per member: m' = R_t^-1 (m - t), r' = R_t^-1 r
    const RigidPose inv = pose_inverse(pose_t);
    for (int i = 0; i < 12; ++i) {
        const Vec3 expect = pose_apply(inv, h.gaussians.gaussians[i].mean);
        CHECK((a.gaussians.gaussians[i].mean - expect).norm() < 1e-12);
        const Vec4 er = (inv.rotation * h.gaussians.gaussians[i].rotation).coeffs();
        const Vec4 gr = a.gaussians.gaussians[i].rotation.coeffs();
        CHECK(std::min((gr - er).norm(), (gr + er).norm()) < 1e-12);
    }

    // field consistency: evaluating the aligned set at new-frame coordinates
    // equals evaluating the original set at the corresponding old coordinates
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 200; ++t) {
        const Vec3 p(u(rng), u(rng), u(rng));
        const VecX got = eval_mixture(a.gaussians, p);
        const VecX expect = eval_mixture(h.gaussians, pose_apply(pose_t, p));
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("initial gaussians cover the grid deterministically") {
    const RunConfig cfg = small_config();
    auto [set, q] = init_gaussians(cfg);
    CHECK(set.size() == cfg.gaussian_count);
    CHECK(q.rows() == cfg.gaussian_count);
    CHECK(q.cols() == cfg.embed_dim);
    std::array<int, 3> idx;
    for (const auto& g : set.gaussians) {
        CHECK(cfg.grid.locate(g.mean, idx));
    }
    auto [set2, q2] = init_gaussians(cfg);
    CHECK((q - q2).norm() == 0.0);
}

TEST_CASE("ignoring history equals the explicit no-history frame") {
    RunConfig cfg = small_config();
    const auto seq = generate_scene(cfg, 5);
    const ModelWeights weights = ModelWeights::seeded(cfg);

    const FrameResult plain = process_frame(seq.frames[0], std::nullopt, weights, cfg);
    cfg.force_degenerate_history = true;
    const HistoryState fake = random_history(9, cfg.gaussian_count, cfg.embed_dim);
    const FrameResult forced = process_frame(seq.frames[0], fake, weights, cfg);
    CHECK(grids_equal(plain.grid, forced.grid));
    CHECK((plain.queries - forced.queries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two identical runs are bitwise deterministic") {
    const RunConfig cfg = small_config();
    const auto seq = generate_scene(cfg, 6);
    const ModelWeights weights = ModelWeights::seeded(cfg);
    const auto a = run_sequence(seq.frames, weights, cfg);
    const auto b = run_sequence(seq.frames, weights, cfg);
    REQUIRE(a.grids.size() == b.grids.size());
    for (std::size_t t = 0; t < a.grids.size(); ++t) {
        CHECK(grids_equal(a.grids[t], b.grids[t]));
    }
}

TEST_CASE("frozen scene processed memorylessly is stationary") {
    RunConfig cfg = small_config();
    cfg.frame_count = 3;
    cfg.force_degenerate_history = true;
    const auto seq = generate_scene(cfg, 7);
    const ModelWeights weights = ModelWeights::seeded(cfg);
    const auto result = run_sequence(seq.frames, weights, cfg);
    REQUIRE(result.grids.size() == 3);
    CHECK(grids_equal(result.grids[0], result.grids[1]));
    CHECK(grids_equal(result.grids[1], result.grids[2]));
}

TEST_CASE("a sequence is the staged composition of its frames") {
    const RunConfig cfg = small_config();
    const auto seq = generate_scene(cfg, 8);
    const ModelWeights weights = ModelWeights::seeded(cfg);
    const auto result = run_sequence(seq.frames, weights, cfg);

    // manual composition with the public stages
    std::optional<HistoryState> hist;
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        auto [set, queries] = init_gaussians(cfg);
        set.timestamp = seq.frames[t].timestamp;
        set.ego_pose = seq.frames[t].ego_pose;
        std::optional<AlignedHistory> aligned;
        if (hist) {
            HistoryState h = align_history(*hist, seq.frames[t].ego_pose);
            aligned = AlignedHistory{std::move(h.gaussians), std::move(h.queries)};
        }
        for (int b = 0; b < cfg.blocks; ++b) {
            std::tie(set, queries) = run_block(set, queries, seq.frames[t].rig,
                                               aligned ? &*aligned : nullptr, weights, cfg);
        }
        const auto grid = splat(set, cfg.grid, cfg.k_sigma);
        CHECK(grids_equal(grid, result.grids[t]));
        hist = HistoryState{std::move(set), std::move(queries), seq.frames[t].ego_pose};
    }
}

TEST_CASE("single-frame sequence equals one frame with no history") {
    RunConfig cfg = small_config();
    cfg.frame_count = 1;
    const auto seq = generate_scene(cfg, 10);
    const ModelWeights weights = ModelWeights::seeded(cfg);
    const auto result = run_sequence(seq.frames, weights, cfg);
    const FrameResult frame = process_frame(seq.frames[0], std::nullopt, weights, cfg);
    REQUIRE(result.grids.size() == 1);
    CHECK(grids_equal(result.grids[0], frame.grid));
}

TEST_CASE("storage ratio arithmetic") {
    const VoxelGridSpec full(Vec3::Zero(), 0.5, 200, 200, 16);
    const double r = memory_ratio(25600, 16, full);
    CHECK(r == 25600.0 * 26.0 / (200.0 * 200.0 * 16.0 * 16.0));
    CHECK(r == doctest::Approx(0.065));
    const auto cfg = small_config();
    const auto seq = generate_scene(cfg, 11);
    const auto result = run_sequence(seq.frames, ModelWeights::seeded(cfg), cfg);
    CHECK(result.reports[0].memory_ratio ==
          memory_ratio(cfg.gaussian_count, cfg.class_count, cfg.grid));
    CHECK(result.reports[0].gaussian_floats ==
          static_cast<std::size_t>(cfg.gaussian_count) * (10 + cfg.class_count));
}
