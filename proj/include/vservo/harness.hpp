#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "vservo/servo.hpp"

namespace vservo {

/// Where targets may be placed relative to the initial camera view.
struct TargetBounds {
  double offset_min_px = 50.0;
  double offset_max_px = 350.0;
  double depth_min_m = 0.35;
  double depth_max_m = 0.55;
  int max_attempts = 10000;
};

/// Offsets a protocol-conformant trial must start within.
inline constexpr double kProtocolOffsetMinPx = 50.0;
inline constexpr double kProtocolOffsetMaxPx = 350.0;

/// Retracted elbow-up UR5e pose with the camera looking horizontally along
/// world -y: flange at (0.1333, -0.30, 0.30).
JointVector home_joints();

struct ProtocolConfig {
  int trials = 40;
  std::uint64_t seed = 42;
  int threads = 1;
  TrackerKind tracker = TrackerKind::Noisy;
  TrackerNoiseModel noise{};
  ServoSetup setup{};
  JointVector initial_joints = home_joints();
  TargetBounds bounds{};
  double histogram_bin_mm = 1.0;

  void validate() const;
};

struct TrialSpec {
  int trial_id = 0;
  std::uint64_t seed = 0;
  Vec3 target_position = Vec3::Zero();
  JointVector initial_joints = JointVector::Zero();
  Vec2 initial_pixel = Vec2::Zero();
  double initial_offset_px = 0.0;
  ControlGains gains{};
  TrackerNoiseModel noise{};
};

struct TrialResult {
  int trial_id = 0;
  std::uint64_t seed = 0;
  Vec3 target_position = Vec3::Zero();
  Vec2 initial_pixel = Vec2::Zero();
  double initial_offset_px = 0.0;
  int cycles = 0;
  ServoStatus termination = ServoStatus::Running;
  double final_pixel_error_px = 0.0;
  double final_ee_error_mm = 0.0;
};

struct MetricsSummary {
  int trial_count = 0;
  double mean_pixel_error_px = 0.0;
  double std_pixel_error_px = 0.0;
  double mean_ee_error_mm = 0.0;
  double std_ee_error_mm = 0.0;
  double success_rate_5mm_pct = 0.0;
  double success_rate_10mm_pct = 0.0;

  friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

struct SuccessThresholds {
  double tight_mm = 5.0;
  double loose_mm = 10.0;
};

struct TrialOutcome {
  TrialSpec spec;
  TrialResult result;
  Trajectory trajectory;
};

struct TrialsRun {
  std::vector<TrialOutcome> outcomes;
  std::vector<TrialResult> results;
  MetricsSummary summary;
};

/// Euclidean distance in millimetres between two points given in metres.
double e_pos(const Vec3& ee, const Vec3& target);

/// Euclidean distance in pixels.
double e_pixel(const Vec2& tracked, const Vec2& center);

/// Population mean/std of both error series. Only DepthReached trials count
/// towards the success-rate numerators; every trial counts in the
/// denominator. Throws std::invalid_argument on empty input.
MetricsSummary summarize(const std::vector<TrialResult>& results, const SuccessThresholds& thresholds = {});

/// splitmix64 of (master, trial_id); independent of execution order.
std::uint64_t derive_seed(std::uint64_t master, int trial_id);

/// Draws n targets whose projection through the initial camera lands in frame
/// with a pixel offset uniform in the configured range and a uniform bearing.
/// Throws std::invalid_argument when the bounds admit no valid placement.
std::vector<TrialSpec> sample_targets(int n, std::uint64_t seed, const TargetBounds& bounds,
                                      const CameraIntrinsics& k, const Pose& initial_camera,
                                      const JointVector& initial_joints);

/// Runs one trial through the servo loop.
TrialOutcome run_trial(const TrialSpec& spec, const ProtocolConfig& config);

/// Samples, runs (on config.threads workers) and summarizes a full protocol.
/// When out_dir is given, every report file is written there.
TrialsRun run_trials(const ProtocolConfig& config,
                     const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace vservo
