#pragma once

// Visual-token accounting against a training stage's context length.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sft/error.hpp"
#include "sft/geometry.hpp"
#include "sft/projector.hpp"

namespace sft {

enum class Stage { kI, kII };

inline const char* to_string(Stage s) { return s == Stage::kI ? "I" : "II"; }

/// Resolution and context settings of one training stage. Stage I is
/// image-only, so its video fields stay empty.
struct StageConfig {
  Stage stage = Stage::kII;
  std::int64_t context_length = 16384;
  std::int64_t max_image_area = 1536 * 1536;
  std::int64_t min_image_area = 0;
  std::int64_t base_image_side = 384;
  std::optional<std::int64_t> video_min_area = 288 * 288;
  std::optional<std::int64_t> video_max_area = 480 * 480;
  std::optional<std::int64_t> max_frames = 128;
  std::int64_t patch = 16;
  std::optional<PathwayConfig> video_projector = PathwayConfig{};

  bool has_video() const { return video_min_area || video_max_area || max_frames || video_projector; }

  AreaThresholds image_thresholds() const { return {min_image_area, max_image_area}; }
  AreaThresholds video_thresholds() const {
    if (!video_min_area || !video_max_area) {
      throw InvalidArgument("stage " + std::string(to_string(stage)) + " has no video area thresholds");
    }
    return {*video_min_area, *video_max_area};
  }
};

/// Image-only warm-up stage: 8K context, 1280^2 max image area.
inline StageConfig stage_one_defaults() {
  StageConfig s;
  s.stage = Stage::kI;
  s.context_length = 8192;
  s.max_image_area = 1280 * 1280;
  s.min_image_area = 0;
  s.base_image_side = 384;
  s.video_min_area.reset();
  s.video_max_area.reset();
  s.max_frames.reset();
  s.video_projector.reset();
  s.patch = 16;
  return s;
}

/// Joint image and video stage: 16K context, 1536^2 image area, 128 frames
/// with per-frame area in [288^2, 480^2], default GSF projector.
inline StageConfig stage_two_defaults() { return StageConfig{}; }

inline constexpr std::int64_t kDefaultTextAllowance = 512;

struct BudgetReport {
  std::int64_t slow_tokens = 0;
  std::int64_t fast_tokens = 0;
  std::int64_t separator_tokens = 0;
  /// Image inputs only: base-resolution and native-resolution token counts.
  std::int64_t low_res_tokens = 0;
  std::int64_t high_res_tokens = 0;
  std::int64_t total_tokens = 0;
  /// Content tokens floored to thousands, the figure tables quote as "9K".
  std::int64_t rounded_k = 0;
  bool fits_context = true;
  std::int64_t text_allowance = kDefaultTextAllowance;
  std::int64_t context_length = 0;

  std::int64_t content_tokens() const { return total_tokens - separator_tokens; }
  bool operator==(const BudgetReport&) const = default;
};

namespace detail {

inline void finish(BudgetReport& r, std::int64_t context_length, std::int64_t text_allowance) {
  r.total_tokens = r.slow_tokens + r.fast_tokens + r.separator_tokens + r.low_res_tokens +
                   r.high_res_tokens;
  r.rounded_k = r.content_tokens() / 1000;
  r.text_allowance = text_allowance;
  r.context_length = context_length;
  r.fits_context = r.total_tokens + text_allowance <= context_length;
}

}  // namespace detail

/// Largest square frame the stage admits, planned onto the patch grid.
inline PatchGrid default_video_grid(const StageConfig& stage) {
  const auto t = stage.video_thresholds();
  const auto side = static_cast<std::int64_t>(detail::isqrt(static_cast<std::uint64_t>(t.max_area)));
  return patch_grid(plan_resize({side, side}, t, stage.patch));
}

/// Token counts from the arrangement length laws; no features are materialised.
inline BudgetReport video_budget(const PathwayConfig& cfg, const PatchGrid& grid,
                                 const StageConfig& stage,
                                 std::int64_t text_allowance = kDefaultTextAllowance) {
  validate(cfg, grid);
  if (stage.video_max_area &&
      grid.rows * grid.cols * stage.patch * stage.patch > *stage.video_max_area) {
    throw InvalidArgument("patch grid " + std::to_string(grid.rows) + "x" +
                          std::to_string(grid.cols) + " exceeds the stage's max video area");
  }
  BudgetReport r;
  r.slow_tokens = cfg.n_slow * (grid.rows / cfg.stride_h) * (grid.cols / cfg.stride_w);
  r.fast_tokens = cfg.n_fast() * cfg.fast_rows * cfg.fast_cols;
  r.separator_tokens = cfg.arrangement == Arrangement::kGsf ? 1 : cfg.n_total;
  detail::finish(r, stage.context_length, text_allowance);
  return r;
}

/// Low-resolution base image tokens plus native-resolution tokens.
inline BudgetReport image_budget(const Resolution& res, const StageConfig& stage,
                                 std::int64_t text_allowance = kDefaultTextAllowance) {
  validate(res);
  if (stage.base_image_side < stage.patch || stage.base_image_side % stage.patch != 0) {
    throw InvalidArgument("base image side must be a positive multiple of the patch size");
  }
  const auto base = stage.base_image_side / stage.patch;
  BudgetReport r;
  r.low_res_tokens = base * base;
  r.high_res_tokens = patch_grid(plan_resize(res, stage.image_thresholds(), stage.patch)).tokens();
  detail::finish(r, stage.context_length, text_allowance);
  return r;
}

inline std::vector<BudgetReport> sweep(const std::vector<PathwayConfig>& configs,
                                       const PatchGrid& grid, const StageConfig& stage,
                                       std::int64_t text_allowance = kDefaultTextAllowance) {
  if (configs.empty()) throw InvalidArgument("sweep needs at least one pathway config");
  std::vector<BudgetReport> out;
  out.reserve(configs.size());
  for (const auto& cfg : configs) out.push_back(video_budget(cfg, grid, stage, text_allowance));
  return out;
}

struct Finding {
  std::string code;
  std::string message;

  bool operator==(const Finding&) const = default;
};

/// Consistency review of a stage configuration. Never throws on an
/// inconsistent stage; every problem becomes a finding.
inline std::vector<Finding> validate_stage(const StageConfig& stage,
                                           std::int64_t text_allowance = kDefaultTextAllowance) {
  std::vector<Finding> out;
  auto add = [&out](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };

  if (stage.patch < 1) {
    add("patch", "patch size must be positive");
    return out;
  }
  if (stage.context_length < 1) add("context", "context length must be positive");
  if (stage.min_image_area < 0 || stage.max_image_area < 1 ||
      stage.min_image_area >= stage.max_image_area) {
    add("image_area", "image area thresholds require 0 <= min < max");
  }
  if (stage.base_image_side < stage.patch || stage.base_image_side % stage.patch != 0) {
    add("base_side", "base image side " + std::to_string(stage.base_image_side) +
                         " is not a positive multiple of patch " + std::to_string(stage.patch));
  }

  // Worst case: any resize target holds at most max_area / patch^2 patches.
  if (out.empty()) {
    const auto base = stage.base_image_side / stage.patch;
    const auto image_tokens = base * base + stage.max_image_area / (stage.patch * stage.patch);
    if (image_tokens + text_allowance > stage.context_length) {
      add("image_budget", "largest image needs " + std::to_string(image_tokens) + " + " +
                              std::to_string(text_allowance) + " tokens, context is " +
                              std::to_string(stage.context_length));
    }
  }

  if (stage.stage == Stage::kI) {
    if (stage.has_video()) add("stage_video", "stage I is image-only but sets video fields");
    return out;
  }

  if (!stage.video_min_area || !stage.video_max_area || !stage.max_frames || !stage.video_projector) {
    add("video_missing", "stage II needs video area thresholds, max_frames and a video projector");
    return out;
  }
  if (*stage.video_min_area < 0 || *stage.video_min_area >= *stage.video_max_area) {
    add("video_area", "video area thresholds require 0 <= min < max");
    return out;
  }
  const auto& cfg = *stage.video_projector;
  try {
    validate(cfg);
  } catch (const Error& e) {
    add("projector", e.what());
    return out;
  }
  if (cfg.n_total > *stage.max_frames) {
    add("frames", "projector takes " + std::to_string(cfg.n_total) + " frames but max_frames is " +
                      std::to_string(*stage.max_frames));
  }

  PatchGrid grid;
  try {
    grid = default_video_grid(stage);
    const auto report = video_budget(cfg, grid, stage, text_allowance);
    if (!report.fits_context) {
      add("video_budget", "video needs " + std::to_string(report.total_tokens) + " + " +
                              std::to_string(text_allowance) + " tokens, context is " +
                              std::to_string(stage.context_length));
    }
  } catch (const Error& e) {
    add("projector", e.what());
    return out;
  }
  if (!fast_coarser_than_slow(cfg, grid)) {
    add("fast_grid", "fast grid " + std::to_string(cfg.fast_rows) + "x" +
                         std::to_string(cfg.fast_cols) + " is not coarser than the slow grid");
  }
  return out;
}

}  // namespace sft
