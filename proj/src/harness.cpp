#include "vservo/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>

#include "vservo/report.hpp"

namespace vservo {

JointVector home_joints() {
  JointVector q;
  q << std::numbers::pi / 2.0, -1.3516481791693966, 2.6434549831339003, 1.8497858496253147,
      -std::numbers::pi / 2.0, 0.0;
  return q;
}

void ProtocolConfig::validate() const {
  if (trials <= 0) throw std::invalid_argument("config: trials must be positive");
  if (threads <= 0) throw std::invalid_argument("config: threads must be positive");
  if (!(histogram_bin_mm > 0.0)) throw std::invalid_argument("config: histogram_bin_mm must be positive");
  noise.validate();
  setup.camera.validate();
  setup.ik.validate();
  setup.servo.validate();
  if (!setup.mount.camera_in_flange.is_valid()) throw std::invalid_argument("config: invalid mount transform");
  if (!setup.arm.limits.contains(initial_joints))
    throw std::invalid_argument("config: initial joints outside the joint limits");
  if (!(bounds.depth_min_m > 0.0 && bounds.depth_min_m <= bounds.depth_max_m))
    throw std::invalid_argument("config: need 0 < depth_min_m <= depth_max_m");
}

double e_pos(const Vec3& ee, const Vec3& target) { return (ee - target).norm() * 1000.0; }

double e_pixel(const Vec2& tracked, const Vec2& center) { return (tracked - center).norm(); }

MetricsSummary summarize(const std::vector<TrialResult>& results, const SuccessThresholds& thresholds) {
  if (results.empty()) throw std::invalid_argument("summarize: no trial results");
  const double n = static_cast<double>(results.size());

  double sum_px = 0.0, sum_mm = 0.0;
  int tight = 0, loose = 0;
  for (const auto& r : results) {
    sum_px += r.final_pixel_error_px;
    sum_mm += r.final_ee_error_mm;
    if (r.termination != ServoStatus::DepthReached) continue;
    if (r.final_ee_error_mm < thresholds.tight_mm) ++tight;
    if (r.final_ee_error_mm < thresholds.loose_mm) ++loose;
  }

  MetricsSummary s;
  s.trial_count = static_cast<int>(results.size());
  s.mean_pixel_error_px = sum_px / n;
  s.mean_ee_error_mm = sum_mm / n;
  double ss_px = 0.0, ss_mm = 0.0;
  for (const auto& r : results) {
    ss_px += (r.final_pixel_error_px - s.mean_pixel_error_px) * (r.final_pixel_error_px - s.mean_pixel_error_px);
    ss_mm += (r.final_ee_error_mm - s.mean_ee_error_mm) * (r.final_ee_error_mm - s.mean_ee_error_mm);
  }
  s.std_pixel_error_px = std::sqrt(ss_px / n);
  s.std_ee_error_mm = std::sqrt(ss_mm / n);
  s.success_rate_5mm_pct = 100.0 * tight / n;
  s.success_rate_10mm_pct = 100.0 * loose / n;
  return s;
}

std::uint64_t derive_seed(std::uint64_t master, int trial_id) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(trial_id) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<TrialSpec> sample_targets(int n, std::uint64_t seed, const TargetBounds& bounds,
                                      const CameraIntrinsics& k, const Pose& initial_camera,
                                      const JointVector& initial_joints) {
  if (n <= 0) throw std::invalid_argument("sample_targets: n must be positive");
  k.validate();
  if (!(bounds.offset_min_px >= kProtocolOffsetMinPx && bounds.offset_max_px <= kProtocolOffsetMaxPx &&
        bounds.offset_min_px <= bounds.offset_max_px))
    throw std::invalid_argument("sample_targets: pixel offset range must lie within [50, 350] px");
  if (!(bounds.depth_min_m > 0.0 && bounds.depth_min_m <= bounds.depth_max_m))
    throw std::invalid_argument("sample_targets: invalid depth range");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset_dist(bounds.offset_min_px, bounds.offset_max_px);
  std::uniform_real_distribution<double> bearing_dist(0.0, kTwoPi);
  std::uniform_real_distribution<double> depth_dist(bounds.depth_min_m, bounds.depth_max_m);

  std::vector<TrialSpec> specs;
  specs.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    Vec2 pixel;
    double offset = 0.0;
    bool placed = false;
    for (int attempt = 0; attempt < bounds.max_attempts && !placed; ++attempt) {
      offset = offset_dist(rng);
      const double bearing = bearing_dist(rng);
      pixel = k.center() + offset * Vec2{std::cos(bearing), std::sin(bearing)};
      placed = k.contains(pixel);
    }
    if (!placed) throw std::invalid_argument("sample_targets: no in-frame placement for the offset range");

    TrialSpec spec;
    spec.trial_id = id;
    spec.seed = derive_seed(seed, id);
    spec.target_position = initial_camera.transform_point(unproject(pixel, depth_dist(rng), k));
    spec.initial_joints = initial_joints;
    spec.initial_pixel = pixel;
    spec.initial_offset_px = offset;
    specs.push_back(spec);
  }
  return specs;
}

TrialOutcome run_trial(const TrialSpec& spec, const ProtocolConfig& config) {
  ServoSetup setup = config.setup;
  setup.servo.gains = spec.gains;
  TrackerNoiseModel noise = spec.noise;
  noise.seed = spec.seed;
  auto tracker = make_tracker(config.tracker, setup.camera, noise);

  TrialOutcome out;
  out.spec = spec;
  out.trajectory = run_servo(spec.initial_joints, spec.target_position, *tracker, setup);

  const ServoState& fin = out.trajectory.final_state;
  TrialResult& r = out.result;
  r.trial_id = spec.trial_id;
  r.seed = spec.seed;
  r.target_position = spec.target_position;
  r.initial_pixel = spec.initial_pixel;
  r.initial_offset_px = spec.initial_offset_px;
  r.cycles = static_cast<int>(out.trajectory.records.size());
  r.termination = out.trajectory.termination;
  r.final_pixel_error_px = e_pixel(fin.last_tracked.pixel(), setup.camera.center());
  r.final_ee_error_mm =
      e_pos(tool_point(fin.flange_pose, setup.mount, setup.servo.tool_offset), spec.target_position);
  return out;
}

TrialsRun run_trials(const ProtocolConfig& config, const std::optional<std::filesystem::path>& out_dir) {
  config.validate();
  const Pose initial_camera =
      camera_pose(forward_kinematics(config.initial_joints, config.setup.arm.dh), config.setup.mount);
  std::vector<TrialSpec> specs = sample_targets(config.trials, config.seed, config.bounds, config.setup.camera,
                                                initial_camera, config.initial_joints);
  for (auto& s : specs) {
    s.gains = config.setup.servo.gains;
    s.noise = config.noise;
  }

  TrialsRun run;
  run.outcomes.resize(specs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(specs.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        run.outcomes[i] = run_trial(specs[i], config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::min<int>(config.threads, static_cast<int>(specs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  run.results.reserve(specs.size());
  for (const auto& o : run.outcomes) run.results.push_back(o.result);
  run.summary = summarize(run.results);

  if (out_dir) {
    emit_report(run.summary, run.results, *out_dir, config.histogram_bin_mm);
    write_trajectories_csv(run.outcomes, *out_dir / "trajectories.csv");
  }
  return run;
}

}  // namespace vservo
