#include "vren/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace vren {

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw std::invalid_argument("intrinsics: focal lengths must be positive");
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("intrinsics: image size must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
        throw std::invalid_argument("intrinsics: principal point outside image");
}

Mat3 CameraIntrinsics::matrix() const {
    Mat3 k;
    k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
}

Mat3 CameraIntrinsics::inverse_matrix() const {
    Mat3 k;
    k << 1.0 / fx, 0.0, -cx / fx, 0.0, 1.0 / fy, -cy / fy, 0.0, 0.0, 1.0;
    return k;
}

void Pose::validate(double tol) const {
    Mat3 should_be_identity = rotation.transpose() * rotation;
    if ((should_be_identity - Mat3::Identity()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("pose: rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > tol)
        throw std::invalid_argument("pose: rotation determinant is not +1");
}

Pose Pose::inverse() const {
    Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
}

Pose Pose::compose(const Pose& a, const Pose& b) {
    Pose out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

Pose Pose::look_at(const Vec3& center, const Vec3& target, const Vec3& up) {
    Vec3 forward = target - center;
    double len = forward.norm();
    if (len < 1e-12)
        throw std::invalid_argument("look_at: center and target coincide");
    forward /= len;
    Vec3 right = forward.cross(up.normalized());
    double rlen = right.norm();
    if (rlen < 1e-9)
        throw std::invalid_argument("look_at: view direction parallel to up");
    right /= rlen;
    Vec3 down = forward.cross(right);

    Pose pose;
    pose.rotation.row(0) = right.transpose();
    pose.rotation.row(1) = down.transpose();
    pose.rotation.row(2) = forward.transpose();
    pose.translation = -(pose.rotation * center);
    return pose;
}

void Ray::validate() const {
    if (std::abs(direction.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("ray: direction is not unit length");
    if (!(t_near >= 0.0) || !(t_near < t_far))
        throw std::invalid_argument("ray: requires 0 <= t_near < t_far");
}

Ray ray_for_pixel(const CameraIntrinsics& cam, const Pose& pose, const Vec2& px,
                  double t_near, double t_far) {
    if (px.x() < 0.0 || px.x() > cam.width || px.y() < 0.0 || px.y() > cam.height)
        throw std::invalid_argument("ray_for_pixel: pixel out of bounds");

    Vec3 dir_cam((px.x() - cam.cx) / cam.fx, (px.y() - cam.cy) / cam.fy, 1.0);
    Ray ray;
    ray.origin = pose.camera_center();
    ray.direction = (pose.rotation.transpose() * dir_cam).normalized();
    ray.t_near = t_near;
    ray.t_far = t_far;
    ray.validate();
    return ray;
}

std::optional<Projection> project(const CameraIntrinsics& cam, const Pose& pose,
                                  const Vec3& x) {
    Vec3 xc = pose.to_camera(x);
    if (xc.z() <= 1e-9)
        return std::nullopt;
    Projection p;
    p.pixel = Vec2(cam.fx * xc.x() / xc.z() + cam.cx,
                   cam.fy * xc.y() / xc.z() + cam.cy);
    p.depth = xc.z();
    p.in_image = p.pixel.x() >= 0.0 && p.pixel.x() <= cam.width &&
                 p.pixel.y() >= 0.0 && p.pixel.y() <= cam.height;
    return p;
}

Mat3 plane_homography(const Camera& ref, const Camera& tgt, double depth) {
    if (!(depth > 0.0))
        throw std::invalid_argument("plane_homography: depth must be positive");

    // Relative transform target camera frame -> reference camera frame.
    Mat3 r_rel = ref.pose.rotation * tgt.pose.rotation.transpose();
    Vec3 t_rel = ref.pose.translation - r_rel * tgt.pose.translation;

    // Points on the plane z = depth in the target frame satisfy n^T x = depth
    // with n the target optical axis, so x_ref = (R + t n^T / depth) x_tgt.
    Mat3 mid = r_rel;
    mid.col(2) += t_rel / depth;

    return ref.intrinsics.matrix() * mid * tgt.intrinsics.inverse_matrix();
}

std::optional<Vec2> apply_homography(const Mat3& h, const Vec2& px) {
    Vec3 mapped = h * Vec3(px.x(), px.y(), 1.0);
    if (std::abs(mapped.z()) < 1e-12)
        return std::nullopt;
    return Vec2(mapped.x() / mapped.z(), mapped.y() / mapped.z());
}

}  // namespace vren
