#pragma once

#include <limits>

#include "vservo/kinematics.hpp"

namespace vservo {

/// Pinhole intrinsics. Camera frame: +z optical axis, +x image right, +y image down.
struct CameraIntrinsics {
  double fx = 615.0;
  double fy = 615.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  void validate() const;
  Vec2 center() const { return {cx, cy}; }
  bool contains(const Vec2& pixel) const;
};

/// Camera frame expressed in the flange frame.
struct MountTransform {
  Pose camera_in_flange = Pose::identity();
};

struct Projection {
  // NaN when the point is not in front of the camera.
  Vec2 pixel = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
  double depth = 0.0;
  bool in_frame = false;
};

Pose camera_pose(const Pose& flange, const MountTransform& mount);

Projection project(const Vec3& point_world, const Pose& camera, const CameraIntrinsics& k);

/// Optical-axis coordinate of the point in the camera frame.
double depth_of(const Vec3& point_world, const Pose& camera);

/// Camera-frame point on the ray through pixel at the given depth.
Vec3 unproject(const Vec2& pixel, double depth, const CameraIntrinsics& k);

}  // namespace vservo
