// Acceptance suite: one line per criterion, non-zero exit if any fails.
//
//   vservo_acceptance <path-to-vservo-cli> <scratch-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vservo/harness.hpp"

using namespace vservo;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("[%s] AC%-2d %-28s %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error(p.string() + ": missing");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Protocol runs shared by several criteria.
TrialsRun ideal_run, noisy_run;
double ideal_seconds = 0.0;

ProtocolConfig protocol(TrackerKind kind) {
  ProtocolConfig c;
  c.trials = 40;
  c.seed = 42;
  c.tracker = kind;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <vservo-cli> <scratch-dir>\n", argv[0]);
    return 2;
  }
  const fs::path cli = argv[1];
  const fs::path scratch = argv[2];
  const ArmModel arm;

  report(1, "IK round trip", [&] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    const int n = 200;
    int ok = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < n; ++i) {
      const JointVector q = oracle::random_joints(rng, kTwoPi - 0.1);
      const Pose target = forward_kinematics(q, arm.dh);
      const JointVector seed = q + JointVector::NullaryExpr([&] { return jitter(rng); });
      const IkResult r = solve_ik(seed, target, arm);
      const PoseError e = pose_error(forward_kinematics(r.joints, arm.dh), target);
      if (r.converged && r.iterations <= 1000 && e.position_error.norm() < 1e-4 && e.orientation_error.norm() < 1e-3)
        ++ok;
    }
    const double secs = seconds_since(t0);
    const double rate = 100.0 * ok / n;
    return Verdict{rate >= 95.0 && secs < 30.0, fmt("%d/%d converged (%.1f%%, need >= 95%%), %.2f s (< 30 s)", ok, n, rate, secs)};
  });

  report(2, "step size exactness", [&] {
    bool ok = adaptive_step_size(0.0, false) == 0.01 && adaptive_step_size(1.0, false) == 0.02 &&
              adaptive_step_size(10.0, false) == 0.05;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 8.0);
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
      const double e = u(rng);
      const double expected = std::min(std::max(0.01 * (1.0 + e), 0.001), 0.05);
      if (adaptive_step_size(e, false) != expected) ++mismatches;
    }
    ok = ok && mismatches == 0;
    return Verdict{ok, fmt("tabulated cases exact, %d/1000 random mismatches", mismatches)};
  });

  report(3, "damped solve equivalence", [&] {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Mat6 j = Mat6::Identity() + 0.3 * Mat6::NullaryExpr([&] { return u(rng); });
      const Vec6 e = Vec6::NullaryExpr([&] { return u(rng); });
      const Vec6 x = (j * j.transpose() + 1e-4 * Mat6::Identity()).fullPivLu().solve(e);
      worst = std::max(worst, (dls_step(j, e, 1e-4) - j.transpose() * x).cwiseAbs().maxCoeff());
    }
    return Verdict{worst < 1e-10, fmt("max |diff| = %.3e over 100 systems (< 1e-10)", worst)};
  });

  report(4, "Jacobian vs geometric", [&] {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const JointVector q = oracle::random_joints(rng);
      worst = std::max(worst, (numerical_jacobian(q, arm.dh) - oracle::geometric_jacobian(q, arm.dh)).cwiseAbs().maxCoeff());
    }
    return Verdict{worst < 1e-5, fmt("max |diff| = %.3e over 20 configurations (< 1e-5)", worst)};
  });

  report(5, "ideal-tracker protocol", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    ideal_run = run_trials(protocol(TrackerKind::Ideal));
    ideal_seconds = seconds_since(t0);
    int reached = 0, tight = 0, loose = 0;
    double lo = 1e9, hi = 0;
    for (const auto& o : ideal_run.outcomes) {
      lo = std::min(lo, o.spec.initial_offset_px);
      hi = std::max(hi, o.spec.initial_offset_px);
      if (o.result.termination != ServoStatus::DepthReached) continue;
      ++reached;
      tight += o.result.final_ee_error_mm < 5.0;
      loose += o.result.final_ee_error_mm < 10.0;
    }
    const int n = static_cast<int>(ideal_run.results.size());
    const bool ok = n == 40 && reached == n && loose == n && tight >= 0.9 * n && ideal_seconds < 60.0 && lo >= 50.0 &&
                    hi <= 350.0;
    return Verdict{ok, fmt("DepthReached %d/%d, <10mm %d/%d, <5mm %d/%d (need >= 36), offsets [%.0f, %.0f] px, %.1f s",
                           reached, n, loose, n, tight, n, lo, hi, ideal_seconds)};
  });

  report(6, "noisy-tracker band", [&] {
    noisy_run = run_trials(protocol(TrackerKind::Noisy));
    const auto& s = noisy_run.summary;
    const bool ok = s.trial_count == 40 && s.mean_pixel_error_px >= 5.0 && s.mean_pixel_error_px <= 15.0 &&
                    s.mean_ee_error_mm >= 2.0 && s.mean_ee_error_mm <= 8.0 && s.success_rate_10mm_pct == 100.0;
    return Verdict{ok, fmt("pixel %.2f +/- %.2f px in [5, 15], EE %.2f +/- %.2f mm in [2, 8], <10mm %.1f%%, <5mm %.1f%%",
                           s.mean_pixel_error_px, s.std_pixel_error_px, s.mean_ee_error_mm, s.std_ee_error_mm,
                           s.success_rate_10mm_pct, s.success_rate_5mm_pct)};
  });

  report(7, "sign convention", [&] {
    const ServoSetup setup;
    const ServoState s0 = ServoState::at(home_joints(), setup.arm);
    const Pose cam0 = camera_pose(s0.flange_pose, setup.mount);
    int reduced = 0;
    std::string detail;
    for (double du : {-120.0, 120.0})
      for (double dv : {-90.0, 90.0}) {
        const Vec2 pixel = setup.camera.center() + Vec2(du, dv);
        const Vec3 target = cam0.transform_point(unproject(pixel, 0.5, setup.camera));
        IdealTracker tracker(setup.camera);
        tracker.init(pixel);
        const StepOutcome out = servo_step(s0, target, tracker, setup, s0.flange_pose.rotation);
        const Projection after = project(target, camera_pose(out.state.flange_pose, setup.mount), setup.camera);
        const Vec2 e0 = setup.camera.center() - pixel, e1 = setup.camera.center() - after.pixel;
        const bool ok = out.status == ServoStatus::Running && std::abs(e1.x()) < std::abs(e0.x()) &&
                        std::abs(e1.y()) < std::abs(e0.y());
        reduced += ok;
        detail += fmt("(%+.0f,%+.0f)->(%+.1f,%+.1f) ", e0.x(), e0.y(), e1.x(), e1.y());
      }
    return Verdict{reduced == 4, fmt("%d/4 quadrants reduced: ", reduced) + detail};
  });

  report(8, "stop-depth guarantee", [&] {
    int violations = 0, trajectories = 0;
    const double stop = ServoConfig{}.stop_depth;
    for (const TrialsRun* run : {&ideal_run, &noisy_run}) {
      for (const auto& o : run->outcomes) {
        ++trajectories;
        const auto& recs = o.trajectory.records;
        std::size_t first = recs.size();
        for (std::size_t i = 0; i < recs.size(); ++i)
          if (recs[i].depth < stop) {
            first = i;
            break;
          }
        if (first == recs.size()) continue;
        for (std::size_t i = first; i < recs.size(); ++i)
          if (recs[i].joints != recs[first].joints) ++violations;
        if (o.trajectory.final_state.joints != recs[first].joints) ++violations;
        if (first + 1 != recs.size()) ++violations;
      }
    }
    return Verdict{violations == 0 && trajectories == 80,
                   fmt("%d trajectories, %d joint updates at/after the stop cycle", trajectories, violations)};
  });

  report(9, "CLI determinism", [&] {
    const fs::path a = scratch / "run_a", b = scratch / "run_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const std::string base = "\"" + cli.string() + "\" run --seed 42 --trials 40";
    const int ra = std::system((base + " --threads 1 --out \"" + a.string() + "\" > /dev/null 2>&1").c_str());
    const int rb = std::system((base + " --threads 4 --out \"" + b.string() + "\" > /dev/null 2>&1").c_str());
    if (ra != 0 || rb != 0) return Verdict{false, fmt("CLI exit codes %d, %d", ra, rb)};
    const bool trials = slurp(a / "trials.csv") == slurp(b / "trials.csv");
    const bool summary = slurp(a / "summary.json") == slurp(b / "summary.json");
    return Verdict{trials && summary, fmt("serial vs 4 threads: trials.csv %s, summary.json %s",
                                          trials ? "identical" : "DIFFER", summary ? "identical" : "DIFFER")};
  });

  report(10, "orientation preservation", [&] {
    double worst = 0.0;
    for (const TrialsRun* run : {&ideal_run, &noisy_run})
      for (const auto& o : run->outcomes) {
        const Mat3 r0 = forward_kinematics(o.spec.initial_joints, arm.dh).rotation;
        for (const auto& rec : o.trajectory.records) worst = std::max(worst, rec.orientation_drift);
        const Mat3 rf = o.trajectory.final_state.flange_pose.rotation;
        worst = std::max(worst, so3_log(rf * r0.transpose()).norm());
      }
    return Verdict{worst < 0.05, fmt("max flange rotation drift %.3e rad (< 0.05)", worst)};
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
