#include "gaussocc/temporal.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace gaussocc {

HistoryState align_history(const HistoryState& hist, const RigidPose& pose_t) {
    const RigidPose delta = pose_compose(pose_inverse(pose_t), hist.ego_pose);
    HistoryState aligned = hist;
    for (auto& g : aligned.gaussians.gaussians) {
        g.mean = pose_apply(delta, g.mean);
        g.rotation = delta.rotation * g.rotation;
    }
    aligned.ego_pose = pose_t;
    return aligned;
}

std::pair<GaussianSet, QueryMatrix> init_gaussians(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    const auto& spec = cfg.grid;
    const Vec3 span(spec.nx * spec.voxel_size, spec.ny * spec.voxel_size,
                    spec.nz * spec.voxel_size);

    // lattice with at least P sites, shaped like the grid
    const double total = static_cast<double>(spec.nx) * spec.ny * spec.nz;
    const double f = std::cbrt(cfg.gaussian_count / total);
    int lx = std::max(1, static_cast<int>(std::ceil(f * spec.nx)));
    int ly = std::max(1, static_cast<int>(std::ceil(f * spec.ny)));
    int lz = std::max(1, static_cast<int>(std::ceil(f * spec.nz)));
    while (static_cast<long long>(lx) * ly * lz < cfg.gaussian_count) {
        if (lx <= ly && lx <= lz) ++lx;
        else if (ly <= lz) ++ly;
        else ++lz;
    }

    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    GaussianSet set;
    const Vec3 scale = Vec3::Constant(2.0 * spec.voxel_size);
    const VecX logits = VecX::Zero(cfg.class_count);
    for (int i = 0; i < lx && set.size() < cfg.gaussian_count; ++i) {
        for (int j = 0; j < ly && set.size() < cfg.gaussian_count; ++j) {
            for (int k = 0; k < lz && set.size() < cfg.gaussian_count; ++k) {
                Vec3 m = spec.origin + Vec3((i + 0.5 + jitter(rng)) / lx * span.x(),
                                            (j + 0.5 + jitter(rng)) / ly * span.y(),
                                            (k + 0.5 + jitter(rng)) / lz * span.z());
                set.gaussians.emplace_back(m, scale, UnitQuaternion::identity(), logits);
            }
        }
    }

    const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
    std::uniform_real_distribution<double> qdist(-bound, bound);
    QueryMatrix queries = QueryMatrix::NullaryExpr(cfg.gaussian_count, cfg.embed_dim,
                                                   [&] { return qdist(rng); });
    return {std::move(set), std::move(queries)};
}

FrameResult process_frame(const FrameInput& input, const std::optional<HistoryState>& hist,
                          const ModelWeights& weights, const RunConfig& cfg) {
    if (input.rig.size() < 1) {
        throw std::invalid_argument("process_frame: need at least one camera");
    }
    for (int n = 0; n < input.rig.size(); ++n) {
        if (input.rig.features[n].dim != cfg.embed_dim) {
            throw std::invalid_argument("process_frame: feature map dim != embed dim");
        }
    }

    auto [set, queries] = init_gaussians(cfg);
    set.timestamp = input.timestamp;
    set.ego_pose = input.ego_pose;

    std::optional<AlignedHistory> aligned;
    if (hist && !cfg.force_degenerate_history) {
        HistoryState h = align_history(*hist, input.ego_pose);
        aligned = AlignedHistory{std::move(h.gaussians), std::move(h.queries)};
    }

    for (int b = 0; b < cfg.blocks; ++b) {
        std::tie(set, queries) =
            run_block(set, queries, input.rig, aligned ? &*aligned : nullptr, weights, cfg);
    }

    FrameResult result;
    result.grid = splat(set, cfg.grid, cfg.k_sigma, cfg.workers, cfg.deterministic_reduction);
    result.gaussians = std::move(set);
    result.queries = std::move(queries);
    return result;
}

double memory_ratio(int gaussian_count, int class_count, const VoxelGridSpec& spec) {
    const double gauss = static_cast<double>(gaussian_count) * (10 + class_count);
    const double dense = static_cast<double>(spec.voxel_count()) * class_count;
    return gauss / dense;
}

SequenceResult run_sequence(const std::vector<FrameInput>& frames, const ModelWeights& weights,
                            const RunConfig& cfg) {
    if (frames.empty()) {
        throw std::invalid_argument("run_sequence: empty frame list");
    }
    SequenceResult result;
    std::optional<HistoryState> hist;
    for (const auto& frame : frames) {
        const auto t0 = std::chrono::steady_clock::now();
        FrameResult fr = process_frame(frame, hist, weights, cfg);
        const auto t1 = std::chrono::steady_clock::now();

        FrameReport report;
        report.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        report.gaussian_floats =
            static_cast<std::size_t>(cfg.gaussian_count) * (10 + cfg.class_count);
        report.dense_floats = cfg.grid.voxel_count() * cfg.class_count;
        report.memory_ratio = memory_ratio(cfg.gaussian_count, cfg.class_count, cfg.grid);

        hist = HistoryState{fr.gaussians, fr.queries, frame.ego_pose};
        result.grids.push_back(std::move(fr.grid));
        result.reports.push_back(report);
    }
    result.final_state = std::move(*hist);
    return result;
}

}  // namespace gaussocc
