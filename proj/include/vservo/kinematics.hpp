#pragma once

#include <array>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

namespace vservo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Six joint angles in radians, base first.
using JointVector = Vec6;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One row of a standard (distal) Denavit-Hartenberg table.
/// The elementary transform is Rz(theta + theta_offset) Tz(d) Tx(a) Rx(alpha).
struct DHRow {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
};

using DHTable = std::array<DHRow, 6>;

/// Manufacturer-published UR5e table.
DHTable ur5e_dh();

/// Rigid transform. rotation is orthonormal with det +1.
struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  static Pose identity() { return {}; }
  static Pose from_homogeneous(const Mat4& t);

  Mat4 homogeneous() const;
  Pose inverse() const;
  Vec3 transform_point(const Vec3& p) const { return rotation * p + position; }

  /// Checks orthonormality and det(rotation) = +1 within tol.
  bool is_valid(double tol = 1e-9) const;

  friend Pose operator*(const Pose& lhs, const Pose& rhs);
};

struct PoseError {
  Vec3 position_error = Vec3::Zero();
  Vec3 orientation_error = Vec3::Zero();

  Vec6 stacked() const;
};

struct JointLimits {
  Vec6 lower = Vec6::Constant(-kTwoPi);
  Vec6 upper = Vec6::Constant(kTwoPi);
  // Maximum excursion of each wrist joint (indices 3..5) away from the seed
  // of a single IK solve.
  double wrist_excursion = std::numbers::pi;

  bool contains(const JointVector& q) const;
};

/// Kinematic description of the arm: DH chain plus joint envelope.
struct ArmModel {
  DHTable dh = ur5e_dh();
  JointLimits limits{};
};

struct IkConfig {
  double damping = 1e-4;
  int max_iterations = 1000;
  double position_tolerance = 1e-4;
  double orientation_tolerance = 1e-3;
  double step_clamp = 0.1;
  double singularity_threshold = 1e-6;
  double step_base = 0.01;
  double step_min = 0.001;
  double step_max = 0.05;
  double jacobian_perturbation = 1e-6;

  /// Throws std::invalid_argument when a field is non-positive or the step
  /// bounds are out of order.
  void validate() const;
};

struct IkResult {
  JointVector joints = JointVector::Zero();
  bool converged = false;
  int iterations = 0;
  PoseError final_error{};
};

/// Snapshot handed to an IkObserver after every accepted joint update.
struct IkIterate {
  int iteration = 0;
  JointVector joints;
  Vec6 step;
  double step_size = 0.0;
  bool near_singular = false;
};

using IkObserver = std::function<void(const IkIterate&)>;

Mat4 dh_transform(const DHRow& row, double theta);

/// Flange pose in the base frame.
Pose forward_kinematics(const JointVector& q, const DHTable& dh);

/// Skew-symmetric matrix of w.
Mat3 hat(const Vec3& w);

/// Rodrigues formula.
Mat3 so3_exp(const Vec3& w);

/// Axis-angle vector of R with norm in [0, pi]. Throws std::invalid_argument
/// when R is not a proper rotation.
Vec3 so3_log(const Mat3& r);

/// position: target - current; orientation: log(R_target R_current^T).
PoseError pose_error(const Pose& current, const Pose& target);

/// Central-difference Jacobian. Rows 0..2 are linear velocity of the flange
/// origin, rows 3..5 angular velocity in the base frame.
Mat6 numerical_jacobian(const JointVector& q, const DHTable& dh, double perturbation = 1e-6);

/// Damped pseudo-inverse step J^T (J J^T + damping I)^-1 e.
Vec6 dls_step(const Mat6& jacobian, const Vec6& error, double damping);
inline Vec6 dls_step(const Mat6& jacobian, const PoseError& error, double damping) {
  return dls_step(jacobian, error.stacked(), damping);
}

/// Error-dependent step size clip(base * (1 + |e|), min, max), halved near
/// singular configurations and kept above min.
double adaptive_step_size(double error_norm, bool near_singular, const IkConfig& config = {});

/// Scales the whole step so its largest component is at most limit.
Vec6 clamp_step(const Vec6& step, double limit);

/// Box clamp into the joint envelope.
JointVector enforce_joint_limits(const JointVector& q, const JointLimits& limits);

/// Box clamp plus the wrist excursion budget measured from origin.
JointVector enforce_joint_limits(const JointVector& q, const JointLimits& limits,
                                 const JointVector& origin);

IkResult solve_ik(const JointVector& q_init, const Pose& target, const ArmModel& arm,
                  const IkConfig& config = {}, const IkObserver& observer = {});

}  // namespace vservo
