#include "vservo/servo.hpp"

#include <stdexcept>
#include <string>

namespace vservo {

void ControlGains::validate() const {
  if (!(kp_x > 0.0 && kp_z > 0.0 && dy_forward > 0.0))
    throw std::invalid_argument("ControlGains: kp_x, kp_z and dy_forward must be positive");
}

void ServoConfig::validate() const {
  if (!(stop_depth > 0.0)) throw std::invalid_argument("ServoConfig: stop_depth must be positive");
  if (max_cycles <= 0) throw std::invalid_argument("ServoConfig: max_cycles must be positive");
  if (!(tool_offset >= 0.0)) throw std::invalid_argument("ServoConfig: tool_offset must be >= 0");
  if (track_lost_patience < 0) throw std::invalid_argument("ServoConfig: track_lost_patience must be >= 0");
  gains.validate();
}

ServoState ServoState::at(const JointVector& joints, const ArmModel& arm) {
  ServoState s;
  s.joints = joints;
  s.flange_pose = forward_kinematics(joints, arm.dh);
  return s;
}

std::string_view to_string(ServoStatus status) {
  switch (status) {
    case ServoStatus::Running: return "Running";
    case ServoStatus::DepthReached: return "DepthReached";
    case ServoStatus::CycleBudget: return "CycleBudget";
    case ServoStatus::TrackLost: return "TrackLost";
    case ServoStatus::IkFailure: return "IkFailure";
  }
  return "Running";
}

ServoStatus servo_status_from_string(std::string_view name) {
  for (auto s : {ServoStatus::Running, ServoStatus::DepthReached, ServoStatus::CycleBudget,
                 ServoStatus::TrackLost, ServoStatus::IkFailure})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown termination reason '" + std::string(name) + "'");
}

Vec2 pixel_error(const TrackedPoint& tracked, const CameraIntrinsics& k) {
  return {k.cx - tracked.u, k.cy - tracked.v};
}

MotionCommand control_law(const Vec2& error, const ControlGains& gains) {
  return {gains.kp_x * error.x(), gains.dy_forward, gains.kp_z * error.y()};
}

Mat3 command_axes(const Pose& camera) {
  Mat3 axes;
  axes.col(0) = -camera.rotation.col(0);
  axes.col(1) = camera.rotation.col(2);
  axes.col(2) = -camera.rotation.col(1);
  return axes;
}

Pose desired_pose(const Pose& flange, const MotionCommand& delta, const MountTransform& mount) {
  Pose out = flange;
  if (delta.dx == 0.0 && delta.dy == 0.0 && delta.dz == 0.0) return out;
  // Camera and flange are rigidly attached and the rotation is held, so both
  // translate by the same world vector.
  out.position += command_axes(camera_pose(flange, mount)) * Vec3{delta.dx, delta.dy, delta.dz};
  return out;
}

Vec3 tool_point(const Pose& flange, const MountTransform& mount, double tool_offset) {
  const Pose cam = camera_pose(flange, mount);
  return cam.position + tool_offset * cam.rotation.col(2);
}

StepOutcome servo_step(const ServoState& state, const Vec3& target, PointTracker& tracker,
                       const ServoSetup& setup, const Mat3& initial_rotation) {
  const Pose cam = camera_pose(state.flange_pose, setup.mount);
  const Projection truth = project(target, cam, setup.camera);
  const TrackedPoint tracked = tracker.update(truth);
  const double depth = depth_of(target, cam);

  StepOutcome out{state, ServoStatus::Running, {}, {}};
  out.record.cycle = state.cycle;
  out.record.tracked = tracked.pixel();
  out.record.visible = tracked.visible;
  out.record.pixel_error = pixel_error(tracked, setup.camera);
  out.record.depth = depth;
  out.record.flange_position = state.flange_pose.position;
  out.record.joints = state.joints;
  out.record.orientation_drift = so3_log(state.flange_pose.rotation * initial_rotation.transpose()).norm();

  ServoState& next = out.state;
  next.cycle = state.cycle + 1;
  next.last_tracked = tracked;
  next.last_depth = depth;

  if (depth < setup.servo.stop_depth) {
    out.status = ServoStatus::DepthReached;
    return out;
  }

  next.not_visible_streak = (!truth.in_frame && !tracked.visible) ? state.not_visible_streak + 1 : 0;
  if (next.not_visible_streak > setup.servo.track_lost_patience) {
    out.status = ServoStatus::TrackLost;
    return out;
  }

  const MotionCommand command = control_law(out.record.pixel_error, setup.servo.gains);
  const Pose goal = desired_pose(state.flange_pose, command, setup.mount);
  const IkResult ik = solve_ik(state.joints, goal, setup.arm, setup.ik);
  if (!ik.converged) {
    out.status = ServoStatus::IkFailure;
    return out;
  }

  out.command = command;
  next.joints = ik.joints;
  next.flange_pose = forward_kinematics(ik.joints, setup.arm.dh);
  return out;
}

Trajectory run_servo(const JointVector& initial_joints, const Vec3& target, PointTracker& tracker,
                     const ServoSetup& setup) {
  setup.camera.validate();
  if (setup.servo.stop_depth <= 0.0 || setup.servo.max_cycles <= 0)
    throw std::invalid_argument("run_servo: invalid servo configuration");

  ServoState state = ServoState::at(initial_joints, setup.arm);
  const Pose cam = camera_pose(state.flange_pose, setup.mount);
  const Projection start = project(target, cam, setup.camera);
  if (!start.in_frame) throw std::invalid_argument("run_servo: target is not initially in frame");
  tracker.init(start.pixel);

  const Mat3 initial_rotation = state.flange_pose.rotation;
  Trajectory traj;
  traj.records.reserve(static_cast<std::size_t>(setup.servo.max_cycles));
  ServoStatus status = ServoStatus::Running;
  while (status == ServoStatus::Running && state.cycle < setup.servo.max_cycles) {
    StepOutcome step = servo_step(state, target, tracker, setup, initial_rotation);
    traj.records.push_back(step.record);
    state = step.state;
    status = step.status;
  }
  traj.termination = status == ServoStatus::Running ? ServoStatus::CycleBudget : status;
  traj.final_state = state;
  return traj;
}

}  // namespace vservo
