#include "vservo/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace vservo {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw std::invalid_argument("CameraIntrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw std::invalid_argument("CameraIntrinsics: image size must be positive");
  if (!(cx >= 0.0 && cx <= width && cy >= 0.0 && cy <= height))
    throw std::invalid_argument("CameraIntrinsics: principal point outside the image");
}

bool CameraIntrinsics::contains(const Vec2& pixel) const {
  return pixel.allFinite() && pixel.x() >= 0.0 && pixel.x() < width && pixel.y() >= 0.0 &&
         pixel.y() < height;
}

Pose camera_pose(const Pose& flange, const MountTransform& mount) {
  return flange * mount.camera_in_flange;
}

Projection project(const Vec3& point_world, const Pose& camera, const CameraIntrinsics& k) {
  const Vec3 pc = camera.inverse().transform_point(point_world);
  Projection out;
  out.depth = pc.z();
  if (pc.z() <= 0.0) return out;
  out.pixel = {k.cx + k.fx * pc.x() / pc.z(), k.cy + k.fy * pc.y() / pc.z()};
  out.in_frame = k.contains(out.pixel);
  return out;
}

double depth_of(const Vec3& point_world, const Pose& camera) {
  return camera.rotation.col(2).dot(point_world - camera.position);
}

Vec3 unproject(const Vec2& pixel, double depth, const CameraIntrinsics& k) {
  return {(pixel.x() - k.cx) / k.fx * depth, (pixel.y() - k.cy) / k.fy * depth, depth};
}

}  // namespace vservo
