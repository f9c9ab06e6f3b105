#pragma once

#include <Eigen/Dense>
#include <optional>

namespace vren {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/*
 * Conventions used throughout the project:
 *  - World units are meters.
 *  - Poses are world->camera: x_cam = rotation * x_world + translation.
 *    The camera frame is x right, y down, z forward (optical axis).
 *  - Continuous pixel coordinates: the center of integer pixel (i, j) is
 *    at (i + 0.5, j + 0.5). All projections and ray generation use
 *    continuous coordinates.
 */

struct CameraIntrinsics {
    double fx = 1.0, fy = 1.0;  // focal lengths, pixels
    double cx = 0.0, cy = 0.0;  // principal point, pixels
    int width = 1, height = 1;

    // Throws std::invalid_argument on violated invariants.
    void validate() const;

    Mat3 matrix() const;
    Mat3 inverse_matrix() const;
};

struct Pose {
    Mat3 rotation = Mat3::Identity();  // world -> camera
    Vec3 translation = Vec3::Zero();

    void validate(double tol = 1e-9) const;

    Vec3 to_camera(const Vec3& x_world) const {
        return rotation * x_world + translation;
    }
    Vec3 to_world(const Vec3& x_cam) const {
        return rotation.transpose() * (x_cam - translation);
    }
    Vec3 camera_center() const { return -(rotation.transpose() * translation); }

    Pose inverse() const;

    // Composition: apply b first, then a.
    static Pose compose(const Pose& a, const Pose& b);

    // Camera at `center` looking at `target`, `up` fixing the roll.
    static Pose look_at(const Vec3& center, const Vec3& target, const Vec3& up);
};

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();  // unit length
    double t_near = 0.0;
    double t_far = 1.0;

    void validate() const;
    Vec3 point_at(double t) const { return origin + t * direction; }
};

struct Camera {
    CameraIntrinsics intrinsics;
    Pose pose;

    Camera() = default;
    Camera(const CameraIntrinsics& k, const Pose& p) : intrinsics(k), pose(p) {
        intrinsics.validate();
        pose.validate();
    }
};

struct Projection {
    Vec2 pixel;      // continuous coordinates
    double depth;    // camera-frame z
    bool in_image;   // pixel within [0,w] x [0,h]
};

// Ray through the continuous pixel position px. Throws std::invalid_argument
// if px lies outside [0,w] x [0,h] or the near/far bounds are invalid.
Ray ray_for_pixel(const CameraIntrinsics& cam, const Pose& pose, const Vec2& px,
                  double t_near, double t_far);

// Ray through the center of integer pixel (i, j).
inline Ray ray_for_pixel_center(const CameraIntrinsics& cam, const Pose& pose,
                                int i, int j, double t_near, double t_far) {
    return ray_for_pixel(cam, pose, Vec2(i + 0.5, j + 0.5), t_near, t_far);
}

// Projects a world point. Returns nullopt when the point is behind the
// camera (camera-frame z <= 1e-9); out-of-image is reported via the
// in_image flag, not as an error.
std::optional<Projection> project(const CameraIntrinsics& cam, const Pose& pose,
                                  const Vec3& x);

// Homography mapping target-view pixels to reference-view pixels for points
// on the plane perpendicular to the target optical axis at `depth` in the
// target camera frame. Throws std::invalid_argument when depth <= 0.
Mat3 plane_homography(const Camera& ref, const Camera& tgt, double depth);

// Applies a homography to a continuous pixel position. Returns nullopt when
// the mapped homogeneous w is (near) zero.
std::optional<Vec2> apply_homography(const Mat3& h, const Vec2& px);

}  // namespace vren
