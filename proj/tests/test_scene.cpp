#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gaussocc/scene.hpp"

using namespace gaussocc;

namespace {

RunConfig desk_config() {
    RunConfig cfg;
    cfg.embed_dim = 20;
    cfg.image_width = 32;
    cfg.image_height = 24;
    return cfg;
}

}  // namespace

TEST_CASE("empty scene yields empty ground truth and black feature maps") {
    RunConfig cfg = desk_config();
    cfg.frame_count = 1;
    SyntheticScene scene;
    scene.class_count = cfg.class_count;
    const LabelGrid gt = scene_ground_truth(scene, cfg.grid, 0);
    for (int l : gt.labels) {
        CHECK(l == kEmptyLabel);
    }
    const auto cams = make_camera_ring(cfg);
    const FeatureMap f = render_feature_map(scene, cams[0], cfg.embed_dim, 0);
    for (double v : f.data) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("single ellipsoid occupies exactly its interior voxel centers") {
    const RunConfig cfg = desk_config();
    SyntheticScene scene;
    scene.class_count = cfg.class_count;
    SceneObject obj;
    obj.center = Vec3(0.25, -0.25, 0.0);
    obj.semi_axes = Vec3(2.0, 1.5, 0.8);
    obj.orientation = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), 0.6);
    obj.label = 3;
    scene.objects.push_back(obj);

    const LabelGrid gt = scene_ground_truth(scene, cfg.grid, 0);
    const Mat3 rt = quat_to_rot(obj.orientation).transpose();
    long long count = 0, expect = 0;
    for (int ix = 0; ix < cfg.grid.nx; ++ix) {
        for (int iy = 0; iy < cfg.grid.ny; ++iy) {
            for (int iz = 0; iz < cfg.grid.nz; ++iz) {
                const Vec3 c = cfg.grid.center(ix, iy, iz);
                const bool inside =
                    (rt * (c - obj.center)).cwiseQuotient(obj.semi_axes).squaredNorm() <= 1.0;
                expect += inside;
                count += gt.at(ix, iy, iz) == 3;
                CHECK(gt.at(ix, iy, iz) == (inside ? 3 : kEmptyLabel));
            }
        }
    }
    CHECK(count == expect);
    CHECK(count > 0);
}

TEST_CASE("moving object ground truth is the frame-0 truth shifted by t*v") {
    const RunConfig cfg = desk_config();
    SyntheticScene scene;
    scene.class_count = cfg.class_count;
    SceneObject obj;
    obj.center = Vec3(-2.0, 1.0, 0.0);
    obj.semi_axes = Vec3(1.8, 1.2, 0.7);
    obj.orientation = UnitQuaternion::identity();
    obj.label = 5;
    obj.velocity = Vec3(cfg.grid.voxel_size, 0.0, 0.0);  // one voxel per frame in x
    scene.objects.push_back(obj);

    const LabelGrid g0 = scene_ground_truth(scene, cfg.grid, 0);
    for (int t = 1; t <= 3; ++t) {
        const LabelGrid gt = scene_ground_truth(scene, cfg.grid, t);
        for (int ix = t; ix < cfg.grid.nx; ++ix) {
            for (int iy = 0; iy < cfg.grid.ny; ++iy) {
                for (int iz = 0; iz < cfg.grid.nz; ++iz) {
                    CHECK(gt.at(ix, iy, iz) == g0.at(ix - t, iy, iz));
                }
            }
        }
    }
}

TEST_CASE("overlap ties go to the nearest object center") {
    const RunConfig cfg = desk_config();
    SyntheticScene scene;
    scene.class_count = cfg.class_count;
    SceneObject a, b;
    a.center = Vec3(-1.0, 0.0, 0.0);
    b.center = Vec3(1.0, 0.0, 0.0);
    a.semi_axes = b.semi_axes = Vec3(2.5, 1.0, 0.8);
    a.label = 1;
    b.label = 2;
    scene.objects = {a, b};
    const LabelGrid gt = scene_ground_truth(scene, cfg.grid, 0);
    std::array<int, 3> ia, ib;
    REQUIRE(cfg.grid.locate(a.center, ia));
    REQUIRE(cfg.grid.locate(b.center, ib));
    CHECK(gt.at(ia[0], ia[1], ia[2]) == 1);
    CHECK(gt.at(ib[0], ib[1], ib[2]) == 2);
}

TEST_CASE("camera ring surrounds the volume and sees its center") {
    const RunConfig cfg = desk_config();
    const auto cams = make_camera_ring(cfg);
    REQUIRE(static_cast<int>(cams.size()) == cfg.num_cameras);
    const Vec3 mid = cfg.grid.origin +
                     0.5 * cfg.grid.voxel_size * Vec3(cfg.grid.nx, cfg.grid.ny, cfg.grid.nz);
    for (const auto& cam : cams) {
        const auto px = project_point(mid, cam);
        REQUIRE(px.has_value());
        CHECK(px->depth > 0.0);
        CHECK(px->u >= 0.0);
        CHECK(px->u < cam.width);
    }
}

TEST_CASE("rendered features are one-hot class codes of visible objects") {
    RunConfig cfg = desk_config();
    SyntheticScene scene;
    scene.class_count = cfg.class_count;
    SceneObject obj;
    obj.center = Vec3(0.0, 0.0, 0.0);
    obj.semi_axes = Vec3(2.0, 2.0, 0.8);
    obj.label = 7;
    scene.objects.push_back(obj);
    const auto cams = make_camera_ring(cfg);
    const FeatureMap f = render_feature_map(scene, cams[0], cfg.embed_dim, 0);
    int hits = 0;
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            const auto px = f.at(x, y);
            if (px.norm() == 0.0) continue;
            ++hits;
            CHECK(px[7] == 1.0);
            CHECK(px.sum() == 1.0);
        }
    }
    CHECK(hits > 0);
    CHECK_THROWS_AS(render_feature_map(scene, cams[0], scene.class_count - 1, 0),
                    std::invalid_argument);
}

TEST_CASE("random scenes respect the configured bounds and separation") {
    const RunConfig cfg = desk_config();
    const SyntheticScene scene = make_random_scene(cfg, 5, 123);
    CHECK(static_cast<int>(scene.objects.size()) == 5);
    for (const auto& obj : scene.objects) {
        CHECK(obj.label >= 0);
        CHECK(obj.label < cfg.class_count);
        CHECK(obj.semi_axes.minCoeff() > 0.0);
        std::array<int, 3> idx;
        CHECK(cfg.grid.locate(obj.center, idx));
    }
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        for (std::size_t j = i + 1; j < scene.objects.size(); ++j) {
            const double sep =
                (scene.objects[i].center - scene.objects[j].center).norm();
            CHECK(sep > scene.objects[i].semi_axes.maxCoeff() +
                            scene.objects[j].semi_axes.maxCoeff());
        }
    }
}

TEST_CASE("level-set fitted Gaussians reproduce the ground-truth labels") {
    const RunConfig cfg = desk_config();
    const SyntheticScene scene = make_random_scene(cfg, 5, 321);
    REQUIRE(static_cast<int>(scene.objects.size()) == 5);
    const GaussianSet fit = fit_scene_gaussians(scene, cfg, 0);
    const LabelGrid pred = classify_grid(splat(fit, cfg.grid, cfg.k_sigma), cfg.tau_occ);
    const LabelGrid gt = scene_ground_truth(scene, cfg.grid, 0);

    long long occupied = 0, agree = 0;
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        if (gt.labels[i] < 0) continue;
        ++occupied;
        agree += pred.labels[i] == gt.labels[i];
    }
    REQUIRE(occupied > 0);
    CHECK(static_cast<double>(agree) / occupied >= 0.90);
}
