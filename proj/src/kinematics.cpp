#include "vservo/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vservo {

namespace {

constexpr double kRotationTolerance = 1e-9;

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

}  // namespace

DHTable ur5e_dh() {
  constexpr double half_pi = std::numbers::pi / 2.0;
  return {{
      {0.0, half_pi, 0.1625, 0.0},
      {-0.425, 0.0, 0.0, 0.0},
      {-0.3922, 0.0, 0.0, 0.0},
      {0.0, half_pi, 0.1333, 0.0},
      {0.0, -half_pi, 0.0997, 0.0},
      {0.0, 0.0, 0.0996, 0.0},
  }};
}

Pose Pose::from_homogeneous(const Mat4& t) {
  Pose p;
  p.rotation = t.topLeftCorner<3, 3>();
  p.position = t.topRightCorner<3, 1>();
  return p;
}

Mat4 Pose::homogeneous() const {
  Mat4 t = Mat4::Identity();
  t.topLeftCorner<3, 3>() = rotation;
  t.topRightCorner<3, 1>() = position;
  return t;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.position = -(inv.rotation * position);
  return inv;
}

bool Pose::is_valid(double tol) const {
  if (!position.allFinite() || !rotation.allFinite()) return false;
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose operator*(const Pose& lhs, const Pose& rhs) {
  Pose out;
  out.rotation = lhs.rotation * rhs.rotation;
  out.position = lhs.rotation * rhs.position + lhs.position;
  return out;
}

Vec6 PoseError::stacked() const {
  Vec6 e;
  e << position_error, orientation_error;
  return e;
}

bool JointLimits::contains(const JointVector& q) const {
  return q.allFinite() && (q.array() >= lower.array()).all() && (q.array() <= upper.array()).all();
}

void IkConfig::validate() const {
  const bool positive = damping > 0 && max_iterations > 0 && position_tolerance > 0 &&
                        orientation_tolerance > 0 && step_clamp > 0 && singularity_threshold > 0 &&
                        step_base > 0 && step_min > 0 && step_max > 0 && jacobian_perturbation > 0;
  if (!positive) throw std::invalid_argument("IkConfig: all parameters must be positive");
  if (!(step_min <= step_base && step_base <= step_max))
    throw std::invalid_argument("IkConfig: require step_min <= step_base <= step_max");
}

Mat4 dh_transform(const DHRow& row, double theta) {
  const double th = theta + row.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Mat4 t;
  t << ct, -st * ca, st * sa, row.a * ct,
       st, ct * ca, -ct * sa, row.a * st,
       0.0, sa, ca, row.d,
       0.0, 0.0, 0.0, 1.0;
  return t;
}

Pose forward_kinematics(const JointVector& q, const DHTable& dh) {
  Mat4 t = Mat4::Identity();
  for (std::size_t i = 0; i < dh.size(); ++i) t = t * dh_transform(dh[i], q[static_cast<Eigen::Index>(i)]);
  return Pose::from_homogeneous(t);
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Mat3 so3_exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  if (theta < 1e-8) return Mat3::Identity() + k + 0.5 * k * k;
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 so3_log(const Mat3& r) {
  Pose probe;
  probe.rotation = r;
  if (!probe.is_valid(kRotationTolerance))
    throw std::invalid_argument("so3_log: input is not a proper rotation matrix");

  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const Vec3 v = 0.5 * vee(r - r.transpose());  // sin(theta) * axis
  const double s = v.norm();
  const double theta = std::atan2(s, c);

  if (s < 1e-8 && c > 0.0) return v;                  // theta ~ sin(theta)
  if (c > -0.9) return v * (theta / s);

  // Near pi the antisymmetric part vanishes; recover the axis from the
  // symmetric part, axis * axis^T = (R + R^T - 2c I) / (2 (1 - c)).
  const Mat3 outer = (r + r.transpose() - 2.0 * c * Mat3::Identity()) / (2.0 * (1.0 - c));
  Eigen::Index k = 0;
  outer.diagonal().maxCoeff(&k);
  Vec3 axis = outer.col(k) / std::sqrt(std::max(outer(k, k), 0.0));
  axis.normalize();
  if (axis.dot(v) < 0.0) axis = -axis;
  return theta * axis;
}

PoseError pose_error(const Pose& current, const Pose& target) {
  PoseError e;
  e.position_error = target.position - current.position;
  e.orientation_error = so3_log(target.rotation * current.rotation.transpose());
  return e;
}

Mat6 numerical_jacobian(const JointVector& q, const DHTable& dh, double perturbation) {
  const Pose nominal = forward_kinematics(q, dh);
  const Mat3 nominal_rt = nominal.rotation.transpose();
  const double inv = 1.0 / (2.0 * perturbation);
  Mat6 j;
  for (Eigen::Index i = 0; i < 6; ++i) {
    JointVector plus = q, minus = q;
    plus[i] += perturbation;
    minus[i] -= perturbation;
    const Pose fp = forward_kinematics(plus, dh);
    const Pose fm = forward_kinematics(minus, dh);
    j.block<3, 1>(0, i) = (fp.position - fm.position) * inv;
    j.block<3, 1>(3, i) =
        (so3_log(fp.rotation * nominal_rt) - so3_log(fm.rotation * nominal_rt)) * inv;
  }
  return j;
}

Vec6 dls_step(const Mat6& jacobian, const Vec6& error, double damping) {
  if (!(damping > 0.0)) throw std::invalid_argument("dls_step: damping must be positive");
  const Mat6 gram = jacobian * jacobian.transpose() + damping * Mat6::Identity();
  // gram is symmetric positive definite for damping > 0.
  const Vec6 x = gram.llt().solve(error);
  return jacobian.transpose() * x;
}

double adaptive_step_size(double error_norm, bool near_singular, const IkConfig& config) {
  double alpha = std::clamp(config.step_base * (1.0 + error_norm), config.step_min, config.step_max);
  if (near_singular) alpha = std::max(alpha * 0.5, config.step_min);
  return alpha;
}

Vec6 clamp_step(const Vec6& step, double limit) {
  const double largest = step.cwiseAbs().maxCoeff();
  if (largest <= limit) return step;
  Vec6 scaled = step * (limit / largest);
  // Rounding in the scale factor can leave the dominant entry a few ulps
  // above the limit; pin it.
  for (Eigen::Index i = 0; i < 6; ++i) scaled[i] = std::clamp(scaled[i], -limit, limit);
  return scaled;
}

JointVector enforce_joint_limits(const JointVector& q, const JointLimits& limits) {
  return q.cwiseMax(limits.lower).cwiseMin(limits.upper);
}

JointVector enforce_joint_limits(const JointVector& q, const JointLimits& limits,
                                 const JointVector& origin) {
  JointVector out = enforce_joint_limits(q, limits);
  for (Eigen::Index i = 3; i < 6; ++i) {
    const double lo = std::max(limits.lower[i], origin[i] - limits.wrist_excursion);
    const double hi = std::min(limits.upper[i], origin[i] + limits.wrist_excursion);
    out[i] = std::clamp(out[i], lo, hi);
  }
  return out;
}

IkResult solve_ik(const JointVector& q_init, const Pose& target, const ArmModel& arm,
                  const IkConfig& config, const IkObserver& observer) {
  config.validate();
  if (!target.is_valid(kRotationTolerance)) throw std::invalid_argument("solve_ik: invalid target pose");
  if (!arm.limits.contains(q_init)) throw std::invalid_argument("solve_ik: seed outside joint limits");

  const auto within = [&](const PoseError& e) {
    return e.position_error.norm() < config.position_tolerance &&
           e.orientation_error.norm() < config.orientation_tolerance;
  };

  IkResult result;
  JointVector q = q_init;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const PoseError e = pose_error(forward_kinematics(q, arm.dh), target);
    if (within(e)) {
      result.joints = q;
      result.converged = true;
      result.iterations = iter;
      result.final_error = e;
      return result;
    }
    const Vec6 stacked = e.stacked();
    const Mat6 j = numerical_jacobian(q, arm.dh, config.jacobian_perturbation);
    const bool near_singular = (j * j.transpose()).determinant() < config.singularity_threshold;
    const double alpha = adaptive_step_size(stacked.norm(), near_singular, config);
    const Vec6 step = clamp_step(alpha * dls_step(j, stacked, config.damping), config.step_clamp);
    q = enforce_joint_limits(q + step, arm.limits, q_init);
    if (observer) observer({iter + 1, q, step, alpha, near_singular});
  }

  result.joints = q;
  result.iterations = config.max_iterations;
  result.final_error = pose_error(forward_kinematics(q, arm.dh), target);
  result.converged = within(result.final_error);
  return result;
}

}  // namespace vservo
