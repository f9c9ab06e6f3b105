#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vren/fields.hpp"
#include "vren/fusion.hpp"
#include "vren/harness.hpp"
#include "vren/render_view.hpp"
#include "vren/rng.hpp"

using namespace vren;

namespace {

ViewFetch make_fetch(int index, const Vec3& color, const Vec3& dir = Vec3::UnitZ()) {
    ViewFetch f;
    f.view_index = index;
    f.value = {color.x(), color.y(), color.z()};
    f.valid = true;
    f.direction = dir.normalized();
    return f;
}

PosedImage constant_view(const Camera& cam, const Vec3& color) {
    return {cam, Image(cam.intrinsics.width, cam.intrinsics.height, color)};
}

Camera small_camera(const Vec3& center) {
    CameraIntrinsics k;
    k.fx = k.fy = 40.0;
    k.cx = k.cy = 16.0;
    k.width = k.height = 32;
    return Camera(k, Pose::look_at(center, Vec3::Zero(), Vec3::UnitZ()));
}

}  // namespace

TEST_CASE("identical fetches fuse to the same value under every scheme") {
    Vec3 v(0.2, 0.7, 0.4);
    std::vector<ViewFetch> fetches = {make_fetch(0, v, Vec3(1, 0, 1)),
                                      make_fetch(1, v, Vec3(0, 1, 1)),
                                      make_fetch(2, v, Vec3(1, 1, 0))};
    for (auto scheme : {FusionScheme::kUniform, FusionScheme::kVarianceSoftmax,
                        FusionScheme::kAngleSoftmax}) {
        auto fused = fuse(fetches, scheme, 0.1, Vec3::UnitZ());
        REQUIRE(fused.has_value());
        CHECK(fused->value[0] == doctest::Approx(v.x()).epsilon(1e-12));
        CHECK(fused->value[1] == doctest::Approx(v.y()).epsilon(1e-12));
        CHECK(fused->value[2] == doctest::Approx(v.z()).epsilon(1e-12));
    }
}

TEST_CASE("a single valid fetch gets weight one") {
    std::vector<ViewFetch> fetches = {make_fetch(0, Vec3(0.1, 0.2, 0.3))};
    ViewFetch invalid;
    invalid.view_index = 1;
    fetches.push_back(invalid);
    auto fused = fuse(fetches, FusionScheme::kVarianceSoftmax, 0.1);
    REQUIRE(fused.has_value());
    CHECK(fused->weights.weights[0] == doctest::Approx(1.0));
    CHECK(fused->weights.weights[1] == 0.0);
}

TEST_CASE("zero valid fetches reports no data") {
    std::vector<ViewFetch> fetches(3);
    CHECK_FALSE(fuse(fetches, FusionScheme::kUniform, 0.1).has_value());
}

TEST_CASE("occluded outlier is downweighted by the variance softmax") {
    // Four agreeing views plus one occluded outlier; tau set to the sample
    // variance of the agreeing fetches.
    std::vector<Vec3> agree = {Vec3(0.50, 0.40, 0.30), Vec3(0.52, 0.41, 0.29),
                               Vec3(0.49, 0.38, 0.31), Vec3(0.51, 0.42, 0.30)};
    Vec3 outlier(0.95, 0.05, 0.85);

    Vec3 mean = Vec3::Zero();
    for (const auto& v : agree)
        mean += v;
    mean /= static_cast<double>(agree.size());
    double tau = 0.0;
    for (const auto& v : agree)
        tau += (v - mean).squaredNorm();
    tau /= static_cast<double>(agree.size() - 1);

    std::vector<ViewFetch> fetches;
    for (size_t i = 0; i < agree.size(); ++i)
        fetches.push_back(make_fetch(static_cast<int>(i), agree[i]));
    fetches.push_back(make_fetch(4, outlier));

    auto fused = fuse(fetches, FusionScheme::kVarianceSoftmax, tau);
    REQUIRE(fused.has_value());
    CHECK(fused->weights.weights[4] < 0.05);

    // Independent oracle: evaluate the softmax formula directly.
    std::vector<Vec3> all = agree;
    all.push_back(outlier);
    Vec3 median;
    for (int d = 0; d < 3; ++d) {
        std::vector<double> col;
        for (const auto& v : all)
            col.push_back(v[d]);
        std::sort(col.begin(), col.end());
        median[d] = col[col.size() / 2];
    }
    double total = 0.0;
    std::vector<double> expected;
    for (const auto& v : all) {
        expected.push_back(std::exp(-(v - median).squaredNorm() / tau));
        total += expected.back();
    }
    for (size_t i = 0; i < all.size(); ++i)
        CHECK(fused->weights.weights[i] ==
              doctest::Approx(expected[i] / total).epsilon(1e-9));
}

TEST_CASE("permuting views permutes weights and keeps the fused value") {
    Rng rng(41);
    std::vector<ViewFetch> fetches;
    for (int i = 0; i < 5; ++i)
        fetches.push_back(make_fetch(
            i, Vec3(rng.uniform(), rng.uniform(), rng.uniform()),
            Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))));

    std::vector<size_t> perm = {3, 0, 4, 1, 2};
    std::vector<ViewFetch> permuted(fetches.size());
    for (size_t i = 0; i < perm.size(); ++i) {
        permuted[i] = fetches[perm[i]];
        permuted[i].view_index = static_cast<int>(i);
    }

    for (auto scheme : {FusionScheme::kUniform, FusionScheme::kVarianceSoftmax,
                        FusionScheme::kAngleSoftmax}) {
        auto base = fuse(fetches, scheme, 0.07, Vec3(0.2, -0.1, 1.0));
        auto perm_fused = fuse(permuted, scheme, 0.07, Vec3(0.2, -0.1, 1.0));
        REQUIRE(base.has_value());
        REQUIRE(perm_fused.has_value());
        for (int d = 0; d < 3; ++d)
            CHECK(perm_fused->value[d] ==
                  doctest::Approx(base->value[d]).epsilon(1e-12));
        for (size_t i = 0; i < perm.size(); ++i)
            CHECK(perm_fused->weights.weights[i] ==
                  doctest::Approx(base->weights.weights[perm[i]]).epsilon(1e-12));
    }
}

TEST_CASE("fused color stays inside the bounding box of the fetches") {
    Rng rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<ViewFetch> fetches;
        Vec3 lo = Vec3::Ones(), hi = Vec3::Zero();
        int n = 2 + static_cast<int>(rng.uniform() * 4);
        for (int i = 0; i < n; ++i) {
            Vec3 c(rng.uniform(), rng.uniform(), rng.uniform());
            lo = lo.cwiseMin(c);
            hi = hi.cwiseMax(c);
            fetches.push_back(make_fetch(i, c));
        }
        auto fused = fuse(fetches, FusionScheme::kVarianceSoftmax, 0.05);
        REQUIRE(fused.has_value());
        double weight_sum = 0.0;
        for (double w : fused->weights.weights) {
            CHECK(w >= 0.0);
            weight_sum += w;
        }
        CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-9));
        for (int d = 0; d < 3; ++d) {
            CHECK(fused->value[d] >= lo[d] - 1e-12);
            CHECK(fused->value[d] <= hi[d] + 1e-12);
        }
    }
}

TEST_CASE("fetch at a camera center is invalid") {
    Camera cam = small_camera(Vec3(0, -3, 1));
    std::vector<PosedImage> views = {constant_view(cam, Vec3(0.5, 0.5, 0.5))};
    auto fetches = fetch_views(cam.pose.camera_center(), views);
    REQUIRE(fetches.size() == 1);
    CHECK_FALSE(fetches[0].valid);
}

TEST_CASE("single view fetch validity follows the frustum") {
    Camera cam = small_camera(Vec3(0, -3, 1));
    std::vector<PosedImage> views = {constant_view(cam, Vec3(0.5, 0.5, 0.5))};
    CHECK(fetch_views(Vec3::Zero(), views)[0].valid);
    CHECK_FALSE(fetch_views(Vec3(0, -6, 2), views)[0].valid);  // behind
    CHECK_FALSE(fetch_views(Vec3(5, 0, 0), views)[0].valid);   // out of view
}

TEST_CASE("views of a textured plane fetch matching colors") {
    // Gently textured ground plane rendered from four views; fetched colors
    // for a surface point must agree up to interpolation error.
    SceneDescription scene;
    scene.background = Vec3(0.05, 0.05, 0.05);
    Primitive ground;
    ground.shape = Primitive::Shape::kBox;
    ground.center = Vec3(0.0, 0.0, -0.15);
    ground.size = Vec3(2.4, 2.4, 0.15);
    ground.sigma_max = 300.0;
    ground.texture.kind = Texture::Kind::kNoise;
    ground.texture.color_a = Vec3(0.2, 0.3, 0.5);
    ground.texture.color_b = Vec3(0.8, 0.7, 0.4);
    ground.texture.scale = 1.0;
    ground.texture.octaves = 1;
    ground.texture.seed = 77;
    scene.primitives.push_back(ground);

    RigParams params;
    params.image_width = 96;
    params.image_height = 96;
    params.n_refs = 4;
    Rig rig = make_hemisphere_rig(5, params);

    AnalyticField field(scene);
    SamplerConfig cfg;
    cfg.n_stratified = 512;
    std::vector<PosedImage> views;
    for (size_t i = 0; i < rig.refs.size(); ++i) {
        cfg.seed = hash_combine(7, i);
        RenderResult r = render_view(field, rig.refs[i], rig.t_near, rig.t_far,
                                     cfg, scene.background, 1);
        views.push_back({rig.refs[i], std::move(r.image.color)});
    }

    Rng rng(91);
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 10; ++trial) {
        Vec3 x(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9), 0.0);
        auto fetches = fetch_views(x, views);
        bool all_valid = true;
        for (const auto& f : fetches)
            all_valid = all_valid && f.valid;
        if (!all_valid)
            continue;
        ++checked;
        for (size_t a = 0; a < fetches.size(); ++a)
            for (size_t b = a + 1; b < fetches.size(); ++b)
                for (int d = 0; d < 3; ++d)
                    CHECK(std::abs(fetches[a].value[d] - fetches[b].value[d]) < 1e-2);
    }
    CHECK(checked >= 5);
}

TEST_CASE("patch descriptor carries 27 entries") {
    Camera cam = small_camera(Vec3(0, -3, 1));
    std::vector<PosedImage> views = {constant_view(cam, Vec3(0.2, 0.4, 0.6))};
    auto fetches = fetch_views(Vec3::Zero(), views, FetchDescriptor::kPatch3x3);
    REQUIRE(fetches[0].valid);
    CHECK(fetches[0].value.size() == 27);
}
