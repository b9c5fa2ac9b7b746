#pragma once

// Published reference configurations: the pathway ablation rows and the
// projector-comparison rows, each with its token count rounded to thousands.
// All of them are evaluated on the 30x30 patch grid of a 480x480 frame.

#include <cstdint>
#include <string>
#include <vector>

#include "sft/config.hpp"
#include "sft/projector.hpp"

namespace sft::reference {

struct GoldenRow {
  SweepEntry entry;
  std::int64_t content_tokens;
  std::int64_t rounded_k;
};

inline PathwayConfig slow_only(std::int64_t frames) {
  // n_slow == n_total under ISF leaves the fast set empty.
  return {frames, frames, 2, 2, 4, 4, Arrangement::kIsf};
}

inline PathwayConfig fast_only(std::int64_t frames) {
  return {frames, 0, 2, 2, 4, 4, Arrangement::kGsf};
}

inline PathwayConfig slowfast_default() { return {}; }

/// Slow-only, fast-only and SlowFast ablation over 32..128 frames.
inline std::vector<GoldenRow> pathway_ablation() {
  return {
      {{"slow-only 32", slow_only(32)}, 7200, 7},
      {{"slow-only 48", slow_only(48)}, 10800, 10},
      {{"slow-only 64", slow_only(64)}, 14400, 14},
      {{"slow-only 128", slow_only(128)}, 28800, 28},
      {{"fast-only 128", fast_only(128)}, 2048, 2},
      {{"slowfast 32+128", slowfast_default()}, 9248, 9},
  };
}

/// Video projectors compared at 128 input frames. Pooling-based projectors
/// keep 15x15 tokens per frame; query-based resamplers emit 16 per frame.
inline std::vector<GoldenRow> projector_comparison() {
  return {
      {{"Spatial Pooling", slow_only(128)}, 28800, 28},
      {{"Dynamic Compressor", slow_only(128)}, 28800, 28},
      {{"Qformer", fast_only(128)}, 2048, 2},
      {{"Perceiver Resampler", fast_only(128)}, 2048, 2},
      {{"SlowFast", slowfast_default()}, 9248, 9},
  };
}

inline PatchGrid reference_grid() { return {30, 30}; }

}  // namespace sft::reference
