#include "gaussocc/io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace gaussocc {

namespace {

using nlohmann::json;

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(os, bits);
}

float read_f32(std::istream& is) {
    const std::uint32_t bits = read_u32(is);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    return is;
}

constexpr std::uint32_t kTensorMagic = 0x474F5443;  // "GOTC"

json pose_to_json(const RigidPose& p) {
    return json{{"rotation", {p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z()}},
                {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}}};
}

RigidPose pose_from_json(const json& j) {
    const auto& r = j.at("rotation");
    const auto& t = j.at("translation");
    return {UnitQuaternion(r[0], r[1], r[2], r[3]), Vec3(t[0], t[1], t[2])};
}

}  // namespace

void save_grid(const SemanticVoxelGrid& grid, const std::string& path, bool write_sidecar) {
    auto os = open_out(path);
    write_u32(os, static_cast<std::uint32_t>(grid.spec.nx));
    write_u32(os, static_cast<std::uint32_t>(grid.spec.ny));
    write_u32(os, static_cast<std::uint32_t>(grid.spec.nz));
    write_f32(os, static_cast<float>(grid.spec.voxel_size));
    for (int i = 0; i < 3; ++i) {
        write_f32(os, static_cast<float>(grid.spec.origin[i]));
    }
    write_u32(os, static_cast<std::uint32_t>(grid.channels));
    for (double v : grid.values) {
        write_f32(os, static_cast<float>(v));
    }
    if (write_sidecar) {
        json meta{{"dims", {grid.spec.nx, grid.spec.ny, grid.spec.nz}},
                  {"voxel_size", grid.spec.voxel_size},
                  {"origin", {grid.spec.origin.x(), grid.spec.origin.y(), grid.spec.origin.z()}},
                  {"channels", grid.channels},
                  {"layout", "x-major, channels innermost, float32"}};
        std::ofstream side(path + ".json");
        side << meta.dump(2) << "\n";
    }
}

SemanticVoxelGrid load_grid(const std::string& path) {
    auto is = open_in(path);
    const int nx = static_cast<int>(read_u32(is));
    const int ny = static_cast<int>(read_u32(is));
    const int nz = static_cast<int>(read_u32(is));
    const double vs = read_f32(is);
    Vec3 origin;
    for (int i = 0; i < 3; ++i) origin[i] = read_f32(is);
    const int channels = static_cast<int>(read_u32(is));
    SemanticVoxelGrid grid(VoxelGridSpec(origin, vs, nx, ny, nz), channels);
    for (double& v : grid.values) {
        v = read_f32(is);
    }
    if (!is) {
        throw std::runtime_error("truncated grid file: " + path);
    }
    return grid;
}

void save_tensors(const std::map<std::string, NamedTensor>& tensors, const std::string& path) {
    auto os = open_out(path);
    write_u32(os, kTensorMagic);
    write_u32(os, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        write_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(os, static_cast<std::uint32_t>(t.dims.size()));
        std::size_t count = 1;
        for (std::uint32_t d : t.dims) {
            write_u32(os, d);
            count *= d;
        }
        if (count != t.data.size()) {
            throw std::invalid_argument("save_tensors: dims/data mismatch for " + name);
        }
        for (float v : t.data) {
            write_f32(os, v);
        }
    }
}

std::map<std::string, NamedTensor> load_tensors(const std::string& path) {
    auto is = open_in(path);
    if (read_u32(is) != kTensorMagic) {
        throw std::runtime_error("bad tensor container magic: " + path);
    }
    const std::uint32_t count = read_u32(is);
    std::map<std::string, NamedTensor> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = read_u32(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        NamedTensor t;
        const std::uint32_t rank = read_u32(is);
        std::size_t n = 1;
        for (std::uint32_t r = 0; r < rank; ++r) {
            t.dims.push_back(read_u32(is));
            n *= t.dims.back();
        }
        t.data.resize(n);
        for (float& v : t.data) {
            v = read_f32(is);
        }
        out.emplace(std::move(name), std::move(t));
    }
    if (!is) {
        throw std::runtime_error("truncated tensor container: " + path);
    }
    return out;
}

void save_feature_map(const FeatureMap& f, const std::string& path) {
    NamedTensor t;
    t.dims = {static_cast<std::uint32_t>(f.height), static_cast<std::uint32_t>(f.width),
              static_cast<std::uint32_t>(f.dim)};
    t.data.assign(f.data.begin(), f.data.end());
    save_tensors({{"feature_map", std::move(t)}}, path);
}

FeatureMap load_feature_map(const std::string& path) {
    const auto tensors = load_tensors(path);
    const auto it = tensors.find("feature_map");
    if (it == tensors.end() || it->second.dims.size() != 3) {
        throw std::runtime_error("not a feature map file: " + path);
    }
    const auto& t = it->second;
    FeatureMap f(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]),
                 static_cast<int>(t.dims[2]));
    std::copy(t.data.begin(), t.data.end(), f.data.begin());
    return f;
}

namespace {

void put_matrix(std::map<std::string, NamedTensor>& out, const std::string& name,
                const Eigen::MatrixXd& m) {
    NamedTensor t;
    t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
    t.data.reserve(m.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            t.data.push_back(static_cast<float>(m(r, c)));
        }
    }
    out.emplace(name, std::move(t));
}

void get_matrix(const std::map<std::string, NamedTensor>& in, const std::string& name,
                Eigen::MatrixXd& m) {
    const auto it = in.find(name);
    if (it == in.end() || it->second.dims.size() != 2 ||
        static_cast<Eigen::Index>(it->second.dims[0]) != m.rows() ||
        static_cast<Eigen::Index>(it->second.dims[1]) != m.cols()) {
        throw std::runtime_error("weight container missing or mismatched tensor: " + name);
    }
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = it->second.data[i++];
        }
    }
}

void put_mlp(std::map<std::string, NamedTensor>& out, const std::string& prefix, const Mlp& net) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        put_matrix(out, prefix + ".w" + std::to_string(l), net.weights[l]);
        put_matrix(out, prefix + ".b" + std::to_string(l), net.biases[l]);
    }
}

void get_mlp(const std::map<std::string, NamedTensor>& in, const std::string& prefix, Mlp& net) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        get_matrix(in, prefix + ".w" + std::to_string(l), net.weights[l]);
        Eigen::MatrixXd b = net.biases[l];
        get_matrix(in, prefix + ".b" + std::to_string(l), b);
        net.biases[l] = b;
    }
}

}  // namespace

void save_model_weights(const ModelWeights& weights, const std::string& path) {
    std::map<std::string, NamedTensor> out;
    put_mlp(out, "attn.offset2d", weights.attn.offset2d);
    put_mlp(out, "attn.weight2d", weights.attn.weight2d);
    put_mlp(out, "attn.offset3d", weights.attn.offset3d);
    put_mlp(out, "attn.weight3d", weights.attn.weight3d);
    put_mlp(out, "attn.offset_tsa", weights.attn.offset_tsa);
    put_mlp(out, "head", weights.head.net);
    for (int i = 0; i < 27; ++i) {
        put_matrix(out, "conv.tap" + std::to_string(i), weights.conv.taps[i]);
    }
    save_tensors(out, path);
}

void load_model_weights(ModelWeights& weights, const std::string& path) {
    const auto in = load_tensors(path);
    get_mlp(in, "attn.offset2d", weights.attn.offset2d);
    get_mlp(in, "attn.weight2d", weights.attn.weight2d);
    get_mlp(in, "attn.offset3d", weights.attn.offset3d);
    get_mlp(in, "attn.weight3d", weights.attn.weight3d);
    get_mlp(in, "attn.offset_tsa", weights.attn.offset_tsa);
    get_mlp(in, "head", weights.head.net);
    for (int i = 0; i < 27; ++i) {
        get_matrix(in, "conv.tap" + std::to_string(i), weights.conv.taps[i]);
    }
}

void save_gaussian_set(const GaussianSet& set, const std::string& path) {
    json arr = json::array();
    for (const auto& g : set.gaussians) {
        json jg;
        jg["mean"] = {g.mean.x(), g.mean.y(), g.mean.z()};
        jg["scale"] = {g.scale.x(), g.scale.y(), g.scale.z()};
        jg["rotation"] = {g.rotation.w(), g.rotation.x(), g.rotation.y(), g.rotation.z()};
        jg["logits"] = std::vector<double>(g.logits.data(), g.logits.data() + g.logits.size());
        arr.push_back(std::move(jg));
    }
    json root{{"timestamp", set.timestamp},
              {"ego_pose", pose_to_json(set.ego_pose)},
              {"gaussians", std::move(arr)}};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << root.dump(2) << "\n";
}

GaussianSet load_gaussian_set(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    json root = json::parse(is);
    GaussianSet set;
    set.timestamp = root.value("timestamp", 0);
    if (root.contains("ego_pose")) {
        set.ego_pose = pose_from_json(root["ego_pose"]);
    }
    for (const auto& jg : root.at("gaussians")) {
        const auto& m = jg.at("mean");
        const auto& s = jg.at("scale");
        const auto& r = jg.at("rotation");
        const auto logits_v = jg.at("logits").get<std::vector<double>>();
        VecX logits = Eigen::Map<const VecX>(logits_v.data(), static_cast<Eigen::Index>(logits_v.size()));
        set.gaussians.emplace_back(Vec3(m[0], m[1], m[2]), Vec3(s[0], s[1], s[2]),
                                   UnitQuaternion(r[0], r[1], r[2], r[3]), std::move(logits));
    }
    return set;
}

void save_config(const RunConfig& cfg, const std::string& path) {
    json j;
    j["grid"] = {{"origin", {cfg.grid.origin.x(), cfg.grid.origin.y(), cfg.grid.origin.z()}},
                 {"voxel_size", cfg.grid.voxel_size},
                 {"dims", {cfg.grid.nx, cfg.grid.ny, cfg.grid.nz}}};
    j["gaussian_count"] = cfg.gaussian_count;
    j["class_count"] = cfg.class_count;
    j["embed_dim"] = cfg.embed_dim;
    j["blocks"] = cfg.blocks;
    j["ref_points"] = cfg.ref_points;
    j["samples"] = cfg.samples;
    j["knn"] = cfg.knn;
    j["k_sigma"] = cfg.k_sigma;
    j["alpha"] = cfg.alpha;
    j["tau_occ"] = cfg.tau_occ;
    j["eps_dist"] = cfg.eps_dist;
    j["hidden_dim"] = cfg.hidden_dim;
    j["seed"] = cfg.seed;
    j["num_cameras"] = cfg.num_cameras;
    j["image_width"] = cfg.image_width;
    j["image_height"] = cfg.image_height;
    j["frame_count"] = cfg.frame_count;
    j["workers"] = cfg.workers;
    j["deterministic_reduction"] = cfg.deterministic_reduction;
    j["tsa_before_ica"] = cfg.tsa_before_ica;
    j["force_degenerate_history"] = cfg.force_degenerate_history;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    json j = json::parse(is);
    RunConfig cfg;
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        const auto& o = g.at("origin");
        const auto& d = g.at("dims");
        cfg.grid = VoxelGridSpec(Vec3(o[0], o[1], o[2]), g.at("voxel_size"), d[0], d[1], d[2]);
    }
    cfg.gaussian_count = j.value("gaussian_count", cfg.gaussian_count);
    cfg.class_count = j.value("class_count", cfg.class_count);
    cfg.embed_dim = j.value("embed_dim", cfg.embed_dim);
    cfg.blocks = j.value("blocks", cfg.blocks);
    cfg.ref_points = j.value("ref_points", cfg.ref_points);
    cfg.samples = j.value("samples", cfg.samples);
    cfg.knn = j.value("knn", cfg.knn);
    cfg.k_sigma = j.value("k_sigma", cfg.k_sigma);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.tau_occ = j.value("tau_occ", cfg.tau_occ);
    cfg.eps_dist = j.value("eps_dist", cfg.eps_dist);
    cfg.hidden_dim = j.value("hidden_dim", cfg.hidden_dim);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.num_cameras = j.value("num_cameras", cfg.num_cameras);
    cfg.image_width = j.value("image_width", cfg.image_width);
    cfg.image_height = j.value("image_height", cfg.image_height);
    cfg.frame_count = j.value("frame_count", cfg.frame_count);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.deterministic_reduction = j.value("deterministic_reduction", cfg.deterministic_reduction);
    cfg.tsa_before_ica = j.value("tsa_before_ica", cfg.tsa_before_ica);
    cfg.force_degenerate_history = j.value("force_degenerate_history", cfg.force_degenerate_history);
    return cfg;
}

void save_sequence(const std::vector<FrameInput>& frames, const std::string& dir,
                   const std::string& manifest_name) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    json jframes = json::array();
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const auto& frame = frames[t];
        json jcams = json::array();
        for (int n = 0; n < frame.rig.size(); ++n) {
            const auto& cam = frame.rig.cameras[n];
            const std::string fmap =
                "frame" + std::to_string(t) + "_cam" + std::to_string(n) + ".bin";
            save_feature_map(frame.rig.features[n], (fs::path(dir) / fmap).string());
            json k = json::array();
            for (int r = 0; r < 3; ++r) {
                k.push_back({cam.intrinsics(r, 0), cam.intrinsics(r, 1), cam.intrinsics(r, 2)});
            }
            jcams.push_back({{"intrinsics", k},
                             {"extrinsics", pose_to_json(cam.extrinsics)},
                             {"width", cam.width},
                             {"height", cam.height},
                             {"feature_map", fmap}});
        }
        jframes.push_back({{"timestamp", frame.timestamp},
                           {"ego_pose", pose_to_json(frame.ego_pose)},
                           {"cameras", std::move(jcams)}});
    }
    std::ofstream os((fs::path(dir) / manifest_name).string());
    if (!os) throw std::runtime_error("cannot write manifest in " + dir);
    os << json{{"frames", std::move(jframes)}}.dump(2) << "\n";
}

std::vector<FrameInput> load_sequence(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream is(manifest_path);
    if (!is) throw std::runtime_error("cannot open manifest: " + manifest_path);
    json root = json::parse(is);
    const fs::path base = fs::path(manifest_path).parent_path();
    std::vector<FrameInput> frames;
    for (const auto& jf : root.at("frames")) {
        FrameInput frame;
        frame.timestamp = jf.at("timestamp");
        frame.ego_pose = pose_from_json(jf.at("ego_pose"));
        for (const auto& jc : jf.at("cameras")) {
            Mat3 k;
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) {
                    k(r, c) = jc.at("intrinsics")[r][c];
                }
            }
            frame.rig.cameras.emplace_back(k, pose_from_json(jc.at("extrinsics")),
                                           jc.at("width").get<int>(), jc.at("height").get<int>());
            frame.rig.features.push_back(
                load_feature_map((base / jc.at("feature_map").get<std::string>()).string()));
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

void save_metrics(const MetricsRecord& rec, const std::string& path) {
    json j{{"per_class_iou", rec.per_class_iou}, {"miou", rec.miou},
           {"sc_iou", rec.sc_iou},               {"gaussian_count", rec.gaussian_count},
           {"memory_ratio", rec.memory_ratio},   {"wall_time_ms", rec.wall_time_ms}};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
}

void dump_ply(const GaussianSet& set, double tau_occ, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "ply\nformat ascii 1.0\nelement vertex " << set.size()
       << "\nproperty float x\nproperty float y\nproperty float z\n"
          "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
    for (const auto& g : set.gaussians) {
        const int label = classify(g.logits, tau_occ);
        // simple deterministic class palette
        const int r = label < 0 ? 128 : (label * 67) % 256;
        const int gg = label < 0 ? 128 : (label * 113) % 256;
        const int b = label < 0 ? 128 : (label * 199) % 256;
        os << g.mean.x() << " " << g.mean.y() << " " << g.mean.z() << " " << r << " " << gg
           << " " << b << "\n";
    }
}

}  // namespace gaussocc
