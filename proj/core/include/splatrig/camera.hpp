#pragma once

#include "splatrig/geometry.hpp"

namespace splatrig {

/// Pinhole camera: intrinsics in pixels, rigid world-to-camera pose.
/// Camera frame is x-right, y-down, z-forward; a point p_world maps to
/// p_cam = rotation * p_world + translation and then to pixel
/// (fx * x/z + cx, fy * y/z + cy). Pixel (row r, col c) is sampled at
/// (c + 0.5, r + 0.5).
struct Camera {
  int width = 0;
  int height = 0;
  double fx = 0, fy = 0, cx = 0, cy = 0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Camera() = default;
  Camera(int w, int h, double fx_, double fy_, double cx_, double cy_,
         const Mat3& rot, const Vec3& trans)
      : width(w), height(h), fx(fx_), fy(fy_), cx(cx_), cy(cy_),
        rotation(rot), translation(trans) {
    validate();
  }

  void validate() const {
    check(width >= 1 && height >= 1, "camera: image size must be >= 1");
    check(fx > 0 && fy > 0, "camera: focal lengths must be positive");
    const Mat3 rrt = rotation * rotation.transpose();
    check((rrt - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6,
          "camera: rotation must be orthonormal");
  }

  Vec3 world_to_cam(const Vec3& p) const { return rotation * p + translation; }
  Vec3 position() const { return -rotation.transpose() * translation; }

  /// Constructs a camera at `eye` looking at `target`. `up_hint` resolves the
  /// roll; it must not be parallel to the viewing direction.
  static Camera look_at(int w, int h, double fx, double fy, const Vec3& eye,
                        const Vec3& target, const Vec3& up_hint = Vec3(0, 0, 1));

  /// look_at with square pixels derived from a horizontal field of view.
  static Camera look_at_fov(int w, int h, double fov_deg, const Vec3& eye,
                            const Vec3& target, const Vec3& up_hint = Vec3(0, 0, 1));
};

}  // namespace splatrig
