#pragma once

#include <string_view>
#include <vector>

#include "vservo/camera.hpp"
#include "vservo/kinematics.hpp"
#include "vservo/tracker.hpp"

namespace vservo {

/// Proportional gains (m/px) and the forward advance per control cycle (m).
struct ControlGains {
  double kp_x = 5e-4;
  double kp_z = 5e-4;
  double dy_forward = 5e-3;

  /// Rejects non-positive values.
  void validate() const;
};

struct ServoConfig {
  double stop_depth = 0.20;
  int max_cycles = 500;
  ControlGains gains{};
  // Cutting-tool tip distance along the camera optical axis.
  double tool_offset = 0.20;
  int track_lost_patience = 10;

  void validate() const;
};

/// Everything the loop needs besides the target and the tracker.
struct ServoSetup {
  ArmModel arm{};
  CameraIntrinsics camera{};
  MountTransform mount{};
  IkConfig ik{};
  ServoConfig servo{};
};

struct ServoState {
  JointVector joints = JointVector::Zero();
  int cycle = 0;
  TrackedPoint last_tracked{};
  double last_depth = 0.0;
  Pose flange_pose{};
  int not_visible_streak = 0;

  static ServoState at(const JointVector& joints, const ArmModel& arm);
};

enum class ServoStatus { Running, DepthReached, CycleBudget, TrackLost, IkFailure };

std::string_view to_string(ServoStatus status);
ServoStatus servo_status_from_string(std::string_view name);

/// Camera-frame motion command: lateral, forward, vertical (m).
struct MotionCommand {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
};

struct CycleRecord {
  int cycle = 0;
  Vec2 tracked = Vec2::Zero();
  bool visible = false;
  Vec2 pixel_error = Vec2::Zero();
  double depth = 0.0;
  Vec3 flange_position = Vec3::Zero();
  JointVector joints = JointVector::Zero();
  // log-norm of the flange rotation relative to the start of the run
  double orientation_drift = 0.0;
};

struct Trajectory {
  std::vector<CycleRecord> records;
  ServoStatus termination = ServoStatus::Running;
  ServoState final_state{};
};

struct StepOutcome {
  ServoState state;
  ServoStatus status = ServoStatus::Running;
  CycleRecord record;
  MotionCommand command;  // zero when no motion was issued
};

/// (cx - u, cy - v).
Vec2 pixel_error(const TrackedPoint& tracked, const CameraIntrinsics& k);

MotionCommand control_law(const Vec2& error, const ControlGains& gains);

/// Camera-frame command axes in world coordinates. Lateral is camera -x,
/// vertical camera -y (image rows grow downward), forward the optical axis.
Mat3 command_axes(const Pose& camera);

/// Flange pose displaced by the command, orientation held.
Pose desired_pose(const Pose& flange, const MotionCommand& delta, const MountTransform& mount);

/// Cutting-tool tip in world coordinates.
Vec3 tool_point(const Pose& flange, const MountTransform& mount, double tool_offset);

StepOutcome servo_step(const ServoState& state, const Vec3& target, PointTracker& tracker,
                       const ServoSetup& setup, const Mat3& initial_rotation);

/// Throws std::invalid_argument when the target does not start in frame.
Trajectory run_servo(const JointVector& initial_joints, const Vec3& target, PointTracker& tracker,
                     const ServoSetup& setup);

}  // namespace vservo
