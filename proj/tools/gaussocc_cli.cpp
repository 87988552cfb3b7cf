#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaussocc/gradcheck.hpp"
#include "gaussocc/io.hpp"
#include "gaussocc/scene.hpp"

namespace fs = std::filesystem;
using namespace gaussocc;

namespace {

void apply_seed_env(RunConfig& cfg) {
    if (const char* env = std::getenv("GAUSSOCC_SEED")) {
        cfg.seed = std::strtoull(env, nullptr, 10);
    }
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        out.push_back(std::stoi(tok));
    }
    return out;
}

VoxelGridSpec parse_grid(const std::string& s, const VoxelGridSpec& base) {
    int d[3] = {0, 0, 0};
    std::stringstream ss(s);
    std::string tok;
    for (int i = 0; i < 3 && std::getline(ss, tok, 'x'); ++i) {
        d[i] = std::stoi(tok);
    }
    if (d[0] < 1 || d[1] < 1 || d[2] < 1) {
        throw std::runtime_error("bad grid spec: " + s + " (expected e.g. 64x64x8)");
    }
    return {base.origin, base.voxel_size, d[0], d[1], d[2]};
}

int cmd_run(const std::string& config_path, const std::string& manifest_path, int frames,
            const std::string& out_dir, bool degenerate, bool dump_ply_flag) {
    RunConfig cfg;
    if (!config_path.empty()) {
        cfg = load_config(config_path);
    }
    apply_seed_env(cfg);
    if (frames > 0) {
        cfg.frame_count = frames;
    }
    cfg.force_degenerate_history = cfg.force_degenerate_history || degenerate;

    std::vector<FrameInput> inputs;
    std::vector<LabelGrid> gt;
    if (!manifest_path.empty()) {
        inputs = load_sequence(manifest_path);
        if (frames > 0 && static_cast<int>(inputs.size()) > frames) {
            inputs.resize(frames);
        }
    } else {
        auto seq = generate_scene(cfg, cfg.seed);
        inputs = std::move(seq.frames);
        gt = std::move(seq.ground_truth);
    }

    const ModelWeights weights = ModelWeights::seeded(cfg);
    const auto result = run_sequence(inputs, weights, cfg);

    fs::create_directories(out_dir);
    nlohmann::json index;
    index["frames"] = nlohmann::json::array();
    for (std::size_t t = 0; t < result.grids.size(); ++t) {
        char name[64];
        std::snprintf(name, sizeof(name), "grid_%03zu.bin", t);
        save_grid(result.grids[t], (fs::path(out_dir) / name).string());

        MetricsRecord rec;
        rec.gaussian_count = cfg.gaussian_count;
        rec.memory_ratio = result.reports[t].memory_ratio;
        rec.wall_time_ms = result.reports[t].wall_time_ms;
        if (t < gt.size()) {
            const LabelGrid pred = classify_grid(result.grids[t], cfg.tau_occ);
            const auto acc = accumulate(pred, gt[t], cfg.class_count);
            for (int k = 0; k < cfg.class_count; ++k) {
                rec.per_class_iou.push_back(acc.iou(k));
            }
            rec.miou = acc.miou();
            rec.sc_iou = acc.sc_iou();
        }
        char mname[64];
        std::snprintf(mname, sizeof(mname), "metrics_%03zu.json", t);
        save_metrics(rec, (fs::path(out_dir) / mname).string());
        index["frames"].push_back({{"grid", name}, {"metrics", mname}});
        std::cout << "frame " << t << ": " << result.reports[t].wall_time_ms << " ms"
                  << (t < gt.size() ? ", mIoU " + std::to_string(rec.miou) : "") << "\n";
    }
    if (dump_ply_flag) {
        dump_ply(result.final_state.gaussians, cfg.tau_occ,
                 (fs::path(out_dir) / "gaussians.ply").string());
        index["ply"] = "gaussians.ply";
    }
    index["memory_ratio"] = memory_ratio(cfg.gaussian_count, cfg.class_count, cfg.grid);
    std::ofstream os((fs::path(out_dir) / "index.json").string());
    os << index.dump(2) << "\n";
    std::cout << "outputs written to " << out_dir << "\n";
    return 0;
}

int cmd_splat(const std::string& scene_path, const std::string& out_path,
              const std::string& config_path) {
    RunConfig cfg;
    if (!config_path.empty()) {
        cfg = load_config(config_path);
    }
    const GaussianSet set = load_gaussian_set(scene_path);
    const auto grid = splat(set, cfg.grid, cfg.k_sigma, cfg.workers, cfg.deterministic_reduction);
    save_grid(grid, out_path);
    std::cout << "splatted " << set.size() << " gaussians to " << out_path << "\n";
    return 0;
}

int print_suite(const std::vector<check::SuiteResult>& results) {
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  worst " << r.worst
                  << "  (tol " << r.tolerance << ", " << r.cases << " cases)\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

int cmd_bench(const std::string& p_list, const std::string& grid_list) {
    RunConfig cfg;
    apply_seed_env(cfg);
    std::vector<int> counts = p_list.empty() ? std::vector<int>{512, 25600} : parse_int_list(p_list);
    std::vector<std::string> grids;
    {
        std::stringstream ss(grid_list.empty() ? std::string("64x64x8,200x200x16") : grid_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) grids.push_back(tok);
    }
    std::cout << "P\tgrid\tsplat_ms\tmem_ratio\n";
    for (const auto& gs : grids) {
        const VoxelGridSpec spec = parse_grid(gs, cfg.grid);
        for (int p : counts) {
            const auto set = check::random_gaussian_set(p, cfg.class_count, spec, cfg.seed);
            const auto t0 = std::chrono::steady_clock::now();
            const auto grid = splat(set, spec, cfg.k_sigma);
            const auto t1 = std::chrono::steady_clock::now();
            const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            std::cout << p << "\t" << gs << "\t" << ms << "\t"
                      << memory_ratio(p, cfg.class_count, spec) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Object-centric semantic occupancy engine"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, out_dir = "out", scene_path, out_path;
    int frames = 0;
    bool degenerate = false, dump = false;
    auto* run = app.add_subcommand("run", "Run the pipeline on a generated or manifest sequence");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--manifest", manifest_path, "sequence manifest (skips scene generation)");
    run->add_option("--frames", frames, "override frame count");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--degenerate-history", degenerate, "force the first-frame rule on every frame");
    run->add_flag("--dump-ply", dump, "write gaussian means as a point cloud");

    auto* splat_cmd = app.add_subcommand("splat", "Direct splat of a Gaussian set file");
    splat_cmd->add_option("--scene", scene_path, "gaussian set JSON")->required();
    splat_cmd->add_option("--out", out_path, "output grid file")->required();
    splat_cmd->add_option("--config", config_path, "JSON config file");

    auto* chk = app.add_subcommand("check", "Verification suites");
    chk->require_subcommand(1);
    int trials = 1000;
    std::uint64_t seed = 42;
    auto* grads = chk->add_subcommand("gradients", "Finite-difference gradient suite");
    grads->add_option("--trials", trials, "cases per op");
    grads->add_option("--seed", seed, "rng seed");
    auto* oracle = chk->add_subcommand("oracle", "Brute-force oracle suite");
    oracle->add_option("--seed", seed, "rng seed");

    std::string p_list, grid_list;
    auto* bench = app.add_subcommand("bench", "Timing/memory table");
    bench->add_option("--p", p_list, "comma-separated gaussian counts");
    bench->add_option("--grid", grid_list, "comma-separated grids, e.g. 64x64x8,200x200x16");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_path, manifest_path, frames, out_dir, degenerate, dump);
        }
        if (splat_cmd->parsed()) {
            return cmd_splat(scene_path, out_path, config_path);
        }
        if (chk->parsed()) {
            if (const char* env = std::getenv("GAUSSOCC_SEED")) {
                seed = std::strtoull(env, nullptr, 10);
            }
            if (grads->parsed()) {
                return print_suite(check::gradient_suite(trials, seed));
            }
            return print_suite(check::oracle_suite(seed));
        }
        if (bench->parsed()) {
            return cmd_bench(p_list, grid_list);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
