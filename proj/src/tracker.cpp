#include "vservo/tracker.hpp"

#include <stdexcept>
#include <string>

namespace vservo {

void TrackerNoiseModel::validate() const {
  if (!(pixel_sigma >= 0.0)) throw std::invalid_argument("TrackerNoiseModel: pixel_sigma must be >= 0");
  if (!(occlusion_probability >= 0.0 && occlusion_probability <= 1.0))
    throw std::invalid_argument("TrackerNoiseModel: occlusion_probability must be in [0, 1]");
  if (!(occlusion_duration_mean >= 1.0))
    throw std::invalid_argument("TrackerNoiseModel: occlusion_duration_mean must be >= 1");
}

std::string_view to_string(TrackerKind kind) {
  return kind == TrackerKind::Ideal ? "ideal" : "noisy";
}

TrackerKind tracker_kind_from_string(std::string_view name) {
  if (name == "ideal") return TrackerKind::Ideal;
  if (name == "noisy") return TrackerKind::Noisy;
  throw std::invalid_argument("unknown tracker kind '" + std::string(name) + "'");
}

void PointTracker::init(const Vec2& query_pixel) {
  if (!intrinsics_.contains(query_pixel))
    throw std::out_of_range("tracker query pixel (" + std::to_string(query_pixel.x()) + ", " +
                            std::to_string(query_pixel.y()) + ") is outside the image");
  last_ = TrackedPoint{query_pixel.x(), query_pixel.y(), true, 1.0};
  reset();
}

TrackedPoint PointTracker::update(const Projection& truth) {
  if (!last_) throw std::logic_error("tracker updated before init()");
  last_ = estimate(truth, *last_);
  return *last_;
}

TrackedPoint IdealTracker::estimate(const Projection& truth, const TrackedPoint& previous) {
  if (!truth.pixel.allFinite()) return {previous.u, previous.v, false, 0.0};
  return {truth.pixel.x(), truth.pixel.y(), truth.in_frame, 1.0};
}

NoisyTracker::NoisyTracker(const CameraIntrinsics& intrinsics, const TrackerNoiseModel& noise)
    : PointTracker(intrinsics), noise_(noise), rng_(noise.seed) {
  noise_.validate();
}

void NoisyTracker::reset() {
  rng_.seed(noise_.seed);
  gauss_.reset();
  occluded_ = false;
}

TrackedPoint NoisyTracker::estimate(const Projection& truth, const TrackedPoint& previous) {
  // Occlusion state machine: onset with fixed probability, episodes end with
  // probability 1 / mean duration per cycle.
  if (occluded_) {
    if (uniform_(rng_) < 1.0 / noise_.occlusion_duration_mean) occluded_ = false;
  } else if (noise_.occlusion_probability > 0.0 && uniform_(rng_) < noise_.occlusion_probability) {
    occluded_ = true;
  }

  const double nu = noise_.pixel_sigma * gauss_(rng_);
  const double nv = noise_.pixel_sigma * gauss_(rng_);

  if (!truth.pixel.allFinite()) return {previous.u, previous.v, false, 0.0};
  if (occluded_ && noise_.occlusion_behavior == OcclusionBehavior::HoldLast)
    return {previous.u, previous.v, false, 0.5};

  TrackedPoint out{truth.pixel.x() + nu, truth.pixel.y() + nv, truth.in_frame, 1.0};
  if (occluded_) {
    out.visible = false;
    out.confidence = 0.5;
  }
  return out;
}

std::unique_ptr<PointTracker> make_tracker(TrackerKind kind, const CameraIntrinsics& intrinsics,
                                           const TrackerNoiseModel& noise) {
  if (kind == TrackerKind::Ideal) return std::make_unique<IdealTracker>(intrinsics);
  return std::make_unique<NoisyTracker>(intrinsics, noise);
}

}  // namespace vservo
