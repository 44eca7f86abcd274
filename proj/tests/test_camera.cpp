#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vservo/camera.hpp"
#include "vservo/harness.hpp"

using namespace vservo;

TEST_SUITE("camera") {
  TEST_CASE("identity mount leaves the flange pose unchanged") {
    Pose flange;
    flange.position = {0.2, -0.3, 0.4};
    flange.rotation = oracle::rotation_exp({0.1, 0.2, -0.3});
    const Pose cam = camera_pose(flange, MountTransform{});
    CHECK((cam.position - flange.position).norm() == 0.0);
    CHECK((cam.rotation - flange.rotation).norm() == 0.0);
  }

  TEST_CASE("mount translation along flange z") {
    Pose flange;
    flange.rotation = oracle::rotation_exp({0.0, std::numbers::pi / 2, 0.0});
    MountTransform mount;
    mount.camera_in_flange.position = {0.0, 0.0, 0.05};
    const Pose cam = camera_pose(flange, mount);
    CHECK((cam.position - 0.05 * flange.rotation.col(2)).norm() < 1e-15);
  }

  TEST_CASE("composition matches the homogeneous-matrix product") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 10; ++t) {
      Pose flange, mount_pose;
      flange.rotation = oracle::random_rotation(rng);
      flange.position = {u(rng), u(rng), u(rng)};
      mount_pose.rotation = oracle::random_rotation(rng);
      mount_pose.position = {u(rng), u(rng), u(rng)};
      const Pose cam = camera_pose(flange, MountTransform{mount_pose});
      const Mat4 ref = flange.homogeneous() * mount_pose.homogeneous();
      CHECK((cam.homogeneous() - ref).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(cam.is_valid());
    }
  }

  TEST_CASE("projection basics") {
    const CameraIntrinsics k;
    const Pose cam;
    const Projection axis = project({0, 0, 1}, cam, k);
    CHECK(axis.in_frame);
    CHECK(axis.pixel == Vec2(320, 240));
    CHECK(axis.depth == 1.0);

    CameraIntrinsics k500 = k;
    k500.fx = k500.fy = 500;
    CHECK(project({0.1, 0, 1}, cam, k500).pixel.x() == doctest::Approx(370.0));

    CHECK_FALSE(project({0, 0, -0.5}, cam, k).in_frame);
    CHECK_FALSE(project({5, 0, 1}, cam, k).in_frame);
  }

  TEST_CASE("depth_of") {
    const Pose cam;
    CHECK(depth_of({0, 0, 0.3}, cam) == doctest::Approx(0.3));
    CHECK(depth_of({0, 0, 0}, cam) == 0.0);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 10; ++t) {
      Pose rotated;
      rotated.rotation = oracle::random_rotation(rng);
      rotated.position = {u(rng), u(rng), u(rng)};
      const Vec3 p(u(rng), u(rng), u(rng));
      const Eigen::Vector4d in_cam = rotated.homogeneous().inverse() * p.homogeneous();
      CHECK(depth_of(p, rotated) == doctest::Approx(in_cam.z()).epsilon(1e-12));
    }
  }

  TEST_CASE("in-frame projections unproject to the camera-frame point and agree with depth_of") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-0.4, 0.4), z(0.1, 3.0);
    const CameraIntrinsics k;
    Pose cam;
    cam.rotation = oracle::random_rotation(rng);
    cam.position = {0.1, 0.2, 0.3};
    int in_frame = 0;
    for (int t = 0; t < 500; ++t) {
      const Vec3 pc(u(rng), u(rng), z(rng));
      const Vec3 pw = cam.transform_point(pc);
      const Projection pr = project(pw, cam, k);
      if (!pr.in_frame) continue;
      ++in_frame;
      CHECK((unproject(pr.pixel, pr.depth, k) - pc).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(depth_of(pw, cam) == doctest::Approx(pr.depth).epsilon(1e-12));
    }
    CHECK(in_frame > 100);
  }

  TEST_CASE("camera moves smoothly with the joints") {
    const ArmModel arm;
    const MountTransform mount;
    std::mt19937_64 rng(31);
    const double reach = 1.0;
    for (int t = 0; t < 20; ++t) {
      const JointVector q = oracle::random_joints(rng, 3.0);
      const Pose c0 = camera_pose(forward_kinematics(q, arm.dh), mount);
      for (int j = 0; j < 6; ++j) {
        JointVector dq = q;
        dq[j] += 1e-6;
        const Pose c1 = camera_pose(forward_kinematics(dq, arm.dh), mount);
        CHECK((c1.position - c0.position).norm() < reach * 1e-6 + 1e-9);
      }
    }
  }

  TEST_CASE("home pose looks horizontally along world -y") {
    const Pose cam = camera_pose(forward_kinematics(home_joints(), ArmModel{}.dh), MountTransform{});
    CHECK((cam.rotation.col(2) - Vec3(0, -1, 0)).norm() < 1e-12);
    CHECK((cam.rotation.col(1) - Vec3(0, 0, -1)).norm() < 1e-12);
    CHECK((cam.position - Vec3(0.1333, -0.30, 0.30)).norm() < 1e-9);
  }

  TEST_CASE("intrinsics validation") {
    CameraIntrinsics k;
    k.fx = 0;
    CHECK_THROWS(k.validate());
    k = {};
    k.cx = 700;
    CHECK_THROWS(k.validate());
  }
}
