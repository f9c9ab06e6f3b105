#include <cmath>

#include "vren/harness.hpp"
#include "vren/rng.hpp"

namespace vren {

namespace {

Camera hemisphere_camera(double azimuth_deg, double elevation_deg,
                         const RigParams& params) {
    double az = azimuth_deg * M_PI / 180.0;
    double el = elevation_deg * M_PI / 180.0;
    Vec3 center(params.radius * std::cos(el) * std::cos(az),
                params.radius * std::cos(el) * std::sin(az),
                params.radius * std::sin(el));

    CameraIntrinsics k;
    k.width = params.image_width;
    k.height = params.image_height;
    double focal =
        0.5 * params.image_width / std::tan(0.5 * params.fov_deg * M_PI / 180.0);
    k.fx = k.fy = focal;
    k.cx = 0.5 * params.image_width;
    k.cy = 0.5 * params.image_height;

    Pose pose = Pose::look_at(center, Vec3::Zero(), Vec3::UnitZ());
    return Camera(k, pose);
}

}  // namespace

Rig make_hemisphere_rig(std::uint64_t seed, const RigParams& params) {
    // Reference placements are a fixed pattern with a small seeded jitter;
    // the first n_refs entries are used so view sets nest across counts.
    static const double kRefAzimuth[] = {25.0, -30.0, 55.0, -55.0,
                                         10.0, -15.0, 40.0, 70.0};
    static const double kRefElevation[] = {30.0, 40.0, 25.0, 45.0,
                                           50.0, 22.0, 35.0, 28.0};
    const int max_refs = static_cast<int>(std::size(kRefAzimuth));

    Rng rng(hash_combine(seed, 0x7269675full));  // "rig_"
    Rig rig;
    rig.t_near = params.t_near;
    rig.t_far = params.t_far;
    rig.target = hemisphere_camera(-5.0 + rng.uniform(-2.0, 2.0),
                                   35.0 + rng.uniform(-2.0, 2.0), params);
    int n = std::min(params.n_refs, max_refs);
    for (int i = 0; i < n; ++i) {
        rig.refs.push_back(hemisphere_camera(
            kRefAzimuth[i] + rng.uniform(-3.0, 3.0),
            kRefElevation[i] + rng.uniform(-3.0, 3.0), params));
    }
    return rig;
}

namespace {

Texture noise_texture(std::uint64_t seed, const Vec3& a, const Vec3& b,
                      double scale) {
    Texture tex;
    tex.kind = Texture::Kind::kNoise;
    tex.color_a = a;
    tex.color_b = b;
    tex.scale = scale;
    tex.octaves = 2;
    tex.seed = seed;
    return tex;
}

Primitive ground_plane(std::uint64_t seed, const Vec3& a, const Vec3& b) {
    Primitive ground;
    ground.shape = Primitive::Shape::kBox;
    ground.center = Vec3(0.0, 0.0, -0.15);
    ground.size = Vec3(2.4, 2.4, 0.15);
    ground.sigma_max = 200.0;
    ground.texture = noise_texture(seed, a, b, 0.2);
    return ground;
}

}  // namespace

std::vector<SuiteScene> make_scene_suite(std::uint64_t seed,
                                         const RigParams& params) {
    std::vector<SuiteScene> suite;

    {
        SuiteScene s;
        s.name = "sphere_plane";
        s.scene.background = Vec3(0.05, 0.07, 0.10);
        s.scene.primitives.push_back(ground_plane(hash_combine(seed, 11),
                                                  Vec3(0.15, 0.30, 0.55),
                                                  Vec3(0.85, 0.80, 0.35)));
        Primitive sphere;
        sphere.shape = Primitive::Shape::kSphere;
        sphere.center = Vec3(0.0, 0.0, 0.6);
        sphere.size = Vec3(0.6, 0.6, 0.6);
        sphere.sigma_max = 200.0;
        sphere.texture = noise_texture(hash_combine(seed, 12),
                                       Vec3(0.80, 0.20, 0.15),
                                       Vec3(0.95, 0.90, 0.80), 0.15);
        s.scene.primitives.push_back(sphere);
        s.rig = make_hemisphere_rig(hash_combine(seed, 1), params);
        suite.push_back(std::move(s));
    }

    {
        SuiteScene s;
        s.name = "occluding_boxes";
        s.scene.background = Vec3(0.06, 0.06, 0.09);
        s.scene.primitives.push_back(ground_plane(hash_combine(seed, 21),
                                                  Vec3(0.25, 0.40, 0.30),
                                                  Vec3(0.75, 0.70, 0.55)));
        Primitive front;
        front.shape = Primitive::Shape::kBox;
        front.center = Vec3(0.35, -0.10, 0.35);
        front.size = Vec3(0.28, 0.28, 0.35);
        front.sigma_max = 200.0;
        front.texture = noise_texture(hash_combine(seed, 22),
                                      Vec3(0.85, 0.35, 0.20),
                                      Vec3(0.95, 0.85, 0.40), 0.14);
        s.scene.primitives.push_back(front);
        Primitive back;
        back.shape = Primitive::Shape::kBox;
        back.center = Vec3(-0.40, 0.25, 0.55);
        back.size = Vec3(0.30, 0.30, 0.55);
        back.sigma_max = 200.0;
        back.texture = noise_texture(hash_combine(seed, 23),
                                     Vec3(0.20, 0.45, 0.80),
                                     Vec3(0.70, 0.90, 0.95), 0.14);
        s.scene.primitives.push_back(back);
        s.rig = make_hemisphere_rig(hash_combine(seed, 2), params);
        suite.push_back(std::move(s));
    }

    {
        SuiteScene s;
        s.name = "blob_cluster";
        s.scene.background = Vec3(0.04, 0.05, 0.08);
        Rng rng(hash_combine(seed, 31));
        static const Vec3 kPalette[] = {
            Vec3(0.85, 0.30, 0.25), Vec3(0.30, 0.70, 0.35), Vec3(0.25, 0.45, 0.85),
            Vec3(0.90, 0.75, 0.30), Vec3(0.70, 0.35, 0.80), Vec3(0.35, 0.80, 0.80),
        };
        for (int i = 0; i < 6; ++i) {
            Primitive blob;
            blob.shape = Primitive::Shape::kGaussianBlob;
            blob.center = Vec3(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7),
                               rng.uniform(0.15, 0.9));
            double stddev = rng.uniform(0.18, 0.30);
            blob.size = Vec3(stddev, stddev, stddev);
            blob.sigma_max = rng.uniform(18.0, 35.0);
            Vec3 base = kPalette[i];
            blob.texture = noise_texture(hash_combine(seed, 32 + i), base * 0.8,
                                         (base * 1.2).cwiseMin(1.0), 0.25);
            s.scene.primitives.push_back(blob);
        }
        s.rig = make_hemisphere_rig(hash_combine(seed, 3), params);
        suite.push_back(std::move(s));
    }

    return suite;
}

}  // namespace vren
