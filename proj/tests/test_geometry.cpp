#include <doctest.h>

#include <cmath>

#include "vren/geometry.hpp"
#include "vren/rng.hpp"

using namespace vren;

namespace {

Mat3 rotation_from_axis_angle(const Vec3& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Pose random_pose(Rng& rng) {
    Pose pose;
    Vec3 axis(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
              rng.uniform(-1.0, 1.0));
    if (axis.norm() < 1e-6)
        axis = Vec3::UnitX();
    pose.rotation = rotation_from_axis_angle(axis, rng.uniform(0.0, 2.0 * M_PI));
    pose.translation =
        Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    return pose;
}

CameraIntrinsics test_intrinsics() {
    CameraIntrinsics k;
    k.fx = 120.0;
    k.fy = 130.0;
    k.cx = 64.0;
    k.cy = 48.0;
    k.width = 128;
    k.height = 96;
    return k;
}

}  // namespace

TEST_CASE("ray through the principal point follows the optical axis") {
    CameraIntrinsics k;
    k.fx = k.fy = 1.0;
    k.cx = k.cy = 0.0;
    k.width = k.height = 4;
    Ray ray = ray_for_pixel(k, Pose{}, Vec2(0.0, 0.0), 0.1, 10.0);
    CHECK(ray.direction.isApprox(Vec3(0, 0, 1), 1e-12));
    CHECK(ray.origin.isApprox(Vec3::Zero(), 1e-12));
}

TEST_CASE("one focal length off the principal point gives a 45 degree ray") {
    CameraIntrinsics k;
    k.fx = k.fy = 1.0;
    k.cx = k.cy = 0.0;
    k.width = k.height = 4;
    Ray ray = ray_for_pixel(k, Pose{}, Vec2(k.cx + k.fx, k.cy), 0.1, 10.0);
    Vec3 expected = Vec3(1, 0, 1).normalized();
    CHECK(ray.direction.isApprox(expected, 1e-12));
}

TEST_CASE("pixel outside the image bounds is rejected") {
    CameraIntrinsics k = test_intrinsics();
    CHECK_THROWS_AS(ray_for_pixel(k, Pose{}, Vec2(-1.0, 5.0), 0.1, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ray_for_pixel(k, Pose{}, Vec2(5.0, 96.5), 0.1, 10.0),
                    std::invalid_argument);
}

TEST_CASE("projection of points on a ray lands back on the pixel") {
    Rng rng(11);
    CameraIntrinsics k = test_intrinsics();
    for (int trial = 0; trial < 50; ++trial) {
        Pose pose = random_pose(rng);
        Vec2 px(rng.uniform(0.0, k.width), rng.uniform(0.0, k.height));
        Ray ray = ray_for_pixel(k, pose, px, 0.5, 20.0);
        double t = rng.uniform(ray.t_near, ray.t_far);
        auto proj = project(k, pose, ray.point_at(t));
        REQUIRE(proj.has_value());
        CHECK(proj->pixel.isApprox(px, 1e-6));
    }
}

TEST_CASE("project matches the pinhole formulas") {
    CameraIntrinsics k;
    k.fx = k.fy = 1.0;
    k.cx = k.cy = 0.0;
    k.width = k.height = 4;
    auto p = project(k, Pose{}, Vec3(0, 0, 1));
    REQUIRE(p.has_value());
    CHECK(p->pixel.x() == doctest::Approx(0.0));
    CHECK(p->pixel.y() == doctest::Approx(0.0));
    CHECK(p->depth == doctest::Approx(1.0));

    CameraIntrinsics k2;
    k2.fx = k2.fy = 100.0;
    k2.cx = k2.cy = 50.0;
    k2.width = k2.height = 100;
    auto p2 = project(k2, Pose{}, Vec3(0.1, 0, 1));
    REQUIRE(p2.has_value());
    CHECK(p2->pixel.x() == doctest::Approx(60.0));
    CHECK(p2->pixel.y() == doctest::Approx(50.0));
}

TEST_CASE("points behind the camera do not project") {
    CameraIntrinsics k = test_intrinsics();
    CHECK_FALSE(project(k, Pose{}, Vec3(0, 0, -1)).has_value());
    CHECK_FALSE(project(k, Pose{}, Vec3(0, 0, 0)).has_value());
}

TEST_CASE("identical cameras give an identity homography up to scale") {
    Camera cam(test_intrinsics(),
               Pose::look_at(Vec3(0, -3, 1), Vec3::Zero(), Vec3::UnitZ()));
    for (double depth : {0.5, 2.0, 7.0}) {
        Mat3 h = plane_homography(cam, cam, depth);
        h /= h(2, 2);
        CHECK((h - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("pure x-translation baseline shifts pixels by the disparity") {
    CameraIntrinsics k = test_intrinsics();
    Camera tgt(k, Pose{});
    Pose ref_pose;
    double baseline = 0.3;
    ref_pose.translation = Vec3(-baseline, 0.0, 0.0);  // center at (b, 0, 0)
    Camera ref(k, ref_pose);

    double depth = 2.5;
    Mat3 h = plane_homography(ref, tgt, depth);
    Vec2 px(40.0, 30.0);
    auto mapped = apply_homography(h, px);
    REQUIRE(mapped.has_value());
    double expected_shift = k.fx * baseline / depth;
    CHECK(mapped->x() == doctest::Approx(px.x() - expected_shift).epsilon(1e-9));
    CHECK(mapped->y() == doctest::Approx(px.y()).epsilon(1e-9));
}

TEST_CASE("homography agrees with back-projection onto the plane") {
    // Oracle: lift the target pixel to the plane z = depth in the target
    // frame, transform to world, and project into the reference view.
    Rng rng(23);
    CameraIntrinsics k = test_intrinsics();
    for (int trial = 0; trial < 50; ++trial) {
        Camera tgt(k, random_pose(rng));
        Camera ref(k, random_pose(rng));
        double depth = rng.uniform(1.0, 6.0);
        Mat3 h = plane_homography(ref, tgt, depth);

        Vec2 px(rng.uniform(0.0, k.width), rng.uniform(0.0, k.height));
        Vec3 dir_cam((px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy, 1.0);
        Vec3 x_world = tgt.pose.to_world(dir_cam * depth);
        auto expected = project(ref.intrinsics, ref.pose, x_world);
        if (!expected)
            continue;  // plane point behind the reference camera

        auto mapped = apply_homography(h, px);
        REQUIRE(mapped.has_value());
        CHECK((*mapped - expected->pixel).norm() < 1e-6);
    }
}

TEST_CASE("composing a pose with its inverse yields identity") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Pose pose = random_pose(rng);
        Pose ident = Pose::compose(pose, pose.inverse());
        CHECK((ident.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(ident.translation.cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("invariant violations are rejected") {
    CameraIntrinsics bad = test_intrinsics();
    bad.fx = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = test_intrinsics();
    bad.cx = 1000.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    Pose skew;
    skew.rotation(0, 1) = 0.5;
    CHECK_THROWS_AS(skew.validate(), std::invalid_argument);

    Pose mirrored;
    mirrored.rotation = -Mat3::Identity();
    CHECK_THROWS_AS(mirrored.validate(), std::invalid_argument);

    Ray bad_ray;
    bad_ray.direction = Vec3(0, 0, 2);
    bad_ray.t_near = 0.1;
    bad_ray.t_far = 1.0;
    CHECK_THROWS_AS(bad_ray.validate(), std::invalid_argument);

    Camera cam(test_intrinsics(), Pose{});
    CHECK_THROWS_AS(plane_homography(cam, cam, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(plane_homography(cam, cam, -2.0), std::invalid_argument);
}
