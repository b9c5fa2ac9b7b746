#pragma once

// Frame sampling, native-resolution resize planning and patch-grid sizing.
//
// Resize targets are computed in exact integer arithmetic: for the shrink and
// grow branches, floor(H * sqrt(area / (H * W))) == isqrt(floor(H * area / W)),
// so no floating-point rounding can push a target across a patch boundary.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sft/error.hpp"

namespace sft {

struct Resolution {
  std::int64_t height = 0;
  std::int64_t width = 0;

  std::int64_t area() const { return height * width; }
  bool operator==(const Resolution&) const = default;
};

inline void validate(const Resolution& res) {
  if (res.height < 1 || res.width < 1) {
    throw InvalidArgument("resolution must be at least 1x1, got " + std::to_string(res.height) +
                          "x" + std::to_string(res.width));
  }
}

/// Closed pixel-area interval a resized image is steered into.
struct AreaThresholds {
  std::int64_t min_area = 0;
  std::int64_t max_area = 1;

  bool operator==(const AreaThresholds&) const = default;
};

inline void validate(const AreaThresholds& t) {
  if (t.min_area < 0 || t.max_area < 1 || t.min_area >= t.max_area) {
    throw InvalidArgument("area thresholds require 0 <= min_area < max_area, got [" +
                          std::to_string(t.min_area) + ", " + std::to_string(t.max_area) + "]");
  }
}

enum class ScaleBranch { kShrink, kGrow, kKeep };

struct ResizePlan {
  double scale = 1.0;
  ScaleBranch branch = ScaleBranch::kKeep;
  Resolution source;
  Resolution target;
  std::int64_t patch = 1;
  /// Flooring after the grow branch left the target under min_area.
  bool below_min = false;
};

struct PatchGrid {
  std::int64_t rows = 0;
  std::int64_t cols = 0;

  std::int64_t tokens() const { return rows * cols; }
  bool operator==(const PatchGrid&) const = default;
};

namespace detail {

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// floor(side * sqrt(area / (side * other))) without leaving the integers.
inline std::int64_t scaled_side(std::int64_t side, std::int64_t other, std::int64_t area) {
  const auto num = static_cast<unsigned __int128>(side) * static_cast<unsigned __int128>(area);
  const auto q = num / static_cast<unsigned __int128>(other);
  return static_cast<std::int64_t>(isqrt(static_cast<std::uint64_t>(q)));
}

}  // namespace detail

inline ScaleBranch scale_branch(const Resolution& res, const AreaThresholds& t) {
  const auto area = res.area();
  if (area > t.max_area) return ScaleBranch::kShrink;
  if (area < t.min_area) return ScaleBranch::kGrow;
  return ScaleBranch::kKeep;
}

inline double compute_scale(const Resolution& res, const AreaThresholds& t) {
  validate(res);
  validate(t);
  const auto area = static_cast<double>(res.area());
  switch (scale_branch(res, t)) {
    case ScaleBranch::kShrink:
      return std::sqrt(static_cast<double>(t.max_area) / area);
    case ScaleBranch::kGrow:
      return std::sqrt(static_cast<double>(t.min_area) / area);
    case ScaleBranch::kKeep:
      break;
  }
  return 1.0;
}

inline ResizePlan plan_resize(const Resolution& res, const AreaThresholds& t, std::int64_t patch) {
  if (patch < 1) throw InvalidArgument("patch size must be positive");
  ResizePlan plan;
  plan.scale = compute_scale(res, t);
  plan.branch = scale_branch(res, t);
  plan.source = res;
  plan.patch = patch;

  std::int64_t scaled_h = res.height;
  std::int64_t scaled_w = res.width;
  if (plan.branch != ScaleBranch::kKeep) {
    const auto area = plan.branch == ScaleBranch::kShrink ? t.max_area : t.min_area;
    scaled_h = detail::scaled_side(res.height, res.width, area);
    scaled_w = detail::scaled_side(res.width, res.height, area);
  }
  plan.target = {scaled_h / patch * patch, scaled_w / patch * patch};
  if (plan.target.height == 0 || plan.target.width == 0) {
    throw DegenerateResize("resize of " + std::to_string(res.height) + "x" +
                           std::to_string(res.width) + " with patch " + std::to_string(patch) +
                           " yields an empty " + std::to_string(plan.target.height) + "x" +
                           std::to_string(plan.target.width) + " target");
  }
  plan.below_min = plan.target.area() < t.min_area;
  return plan;
}

inline PatchGrid patch_grid(const ResizePlan& plan) {
  return {plan.target.height / plan.patch, plan.target.width / plan.patch};
}

enum class SamplingMode { kFps, kUniformFallback };

struct SamplingPlan {
  SamplingMode mode = SamplingMode::kFps;
  std::vector<double> timestamps;
  double source_duration = 0.0;
  double target_fps = 1.0;
  std::int64_t max_frames = 1;
};

/// Number of frames fps sampling would produce before the max_frames cap:
/// ceil(duration * fps), corrected so that exactly the k with k / fps < duration count.
inline std::int64_t fps_frame_count(double duration, double target_fps) {
  auto count = static_cast<std::int64_t>(std::ceil(duration * target_fps));
  while (count > 0 && static_cast<double>(count - 1) / target_fps >= duration) --count;
  while (static_cast<double>(count) / target_fps < duration) ++count;
  return count;
}

/// Samples at target_fps from t=0; clips longer than max_frames frames fall
/// back to max_frames bin-centred timestamps spread over the whole clip.
inline SamplingPlan sample_frames(double duration, double target_fps, std::int64_t max_frames) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidDuration("video duration must be positive and finite, got " +
                          std::to_string(duration));
  }
  if (!(target_fps > 0.0) || !std::isfinite(target_fps)) {
    throw InvalidArgument("target fps must be positive");
  }
  if (max_frames < 1) throw InvalidArgument("max_frames must be at least 1");

  SamplingPlan plan;
  plan.source_duration = duration;
  plan.target_fps = target_fps;
  plan.max_frames = max_frames;

  const auto count = fps_frame_count(duration, target_fps);
  if (count > max_frames) {
    plan.mode = SamplingMode::kUniformFallback;
    plan.timestamps.reserve(static_cast<std::size_t>(max_frames));
    const double bin = duration / static_cast<double>(max_frames);
    for (std::int64_t i = 0; i < max_frames; ++i) {
      plan.timestamps.push_back((static_cast<double>(i) + 0.5) * bin);
    }
    return plan;
  }

  plan.timestamps.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    plan.timestamps.push_back(static_cast<double>(k) / target_fps);
  }
  return plan;
}

inline const char* to_string(SamplingMode mode) {
  return mode == SamplingMode::kFps ? "fps" : "uniform-fallback";
}

}  // namespace sft
