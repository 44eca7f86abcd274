#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string_view>

#include "vservo/camera.hpp"

namespace vservo {

struct TrackedPoint {
  double u = 0.0;
  double v = 0.0;
  bool visible = false;
  double confidence = 0.0;

  Vec2 pixel() const { return {u, v}; }
};

/// What a tracker reports for a point it cannot currently see.
enum class OcclusionBehavior {
  InferPosition,  // keep reporting the (noisy) true position
  HoldLast,       // freeze at the last visible estimate
};

struct TrackerNoiseModel {
  double pixel_sigma = 2.0;
  double occlusion_probability = 0.01;
  double occlusion_duration_mean = 3.0;  // cycles, >= 1
  std::uint64_t seed = 0;
  OcclusionBehavior occlusion_behavior = OcclusionBehavior::InferPosition;

  void validate() const;
};

enum class TrackerKind { Ideal, Noisy };

std::string_view to_string(TrackerKind kind);
TrackerKind tracker_kind_from_string(std::string_view name);

/// Point-tracker contract: initialised once with a query pixel, then fed the
/// true projection of the tracked point every control cycle.
class PointTracker {
 public:
  explicit PointTracker(const CameraIntrinsics& intrinsics) : intrinsics_(intrinsics) {}
  virtual ~PointTracker() = default;

  PointTracker(const PointTracker&) = delete;
  PointTracker& operator=(const PointTracker&) = delete;

  /// Throws std::out_of_range when the query lies outside the image.
  void init(const Vec2& query_pixel);
  bool initialized() const { return last_.has_value(); }

  /// Throws std::logic_error when called before init().
  TrackedPoint update(const Projection& truth);

 protected:
  virtual TrackedPoint estimate(const Projection& truth, const TrackedPoint& previous) = 0;
  virtual void reset() {}

  const CameraIntrinsics& intrinsics() const { return intrinsics_; }

 private:
  CameraIntrinsics intrinsics_;
  std::optional<TrackedPoint> last_;
};

/// Returns the true pixel; visible exactly when the point is in frame.
class IdealTracker final : public PointTracker {
 public:
  using PointTracker::PointTracker;

 protected:
  TrackedPoint estimate(const Projection& truth, const TrackedPoint& previous) override;
};

/// Isotropic Gaussian pixel noise plus Bernoulli-onset occlusion episodes of
/// geometric duration. Owns its RNG; deterministic for a given seed.
class NoisyTracker final : public PointTracker {
 public:
  NoisyTracker(const CameraIntrinsics& intrinsics, const TrackerNoiseModel& noise);

  bool occluded() const { return occluded_; }

 protected:
  TrackedPoint estimate(const Projection& truth, const TrackedPoint& previous) override;
  void reset() override;

 private:
  TrackerNoiseModel noise_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  bool occluded_ = false;
};

std::unique_ptr<PointTracker> make_tracker(TrackerKind kind, const CameraIntrinsics& intrinsics,
                                           const TrackerNoiseModel& noise);

}  // namespace vservo
