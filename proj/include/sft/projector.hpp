#pragma once

// Two-stream SlowFast video projector: a Slow pathway that keeps spatial detail
// on a uniform subset of frames, a Fast pathway that keeps every (or every
// remaining) frame at a coarse adaptive grid, and the two token arrangements
// that flatten both streams into one sequence.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sft/error.hpp"
#include "sft/geometry.hpp"
#include "sft/numerics.hpp"

namespace sft {

enum class Arrangement { kGsf, kIsf };

inline const char* to_string(Arrangement a) { return a == Arrangement::kGsf ? "GSF" : "ISF"; }

inline Arrangement parse_arrangement(std::string_view s) {
  if (s == "GSF" || s == "gsf") return Arrangement::kGsf;
  if (s == "ISF" || s == "isf") return Arrangement::kIsf;
  throw InvalidArgument("unknown arrangement '" + std::string(s) + "' (expected GSF or ISF)");
}

struct PathwayConfig {
  std::int64_t n_total = 128;
  std::int64_t n_slow = 32;
  std::int64_t stride_h = 2;
  std::int64_t stride_w = 2;
  std::int64_t fast_rows = 4;
  std::int64_t fast_cols = 4;
  Arrangement arrangement = Arrangement::kGsf;

  /// GSF feeds every frame to the Fast pathway; ISF feeds only the non-slow frames.
  std::int64_t n_fast() const {
    return arrangement == Arrangement::kGsf ? n_total : n_total - n_slow;
  }

  bool operator==(const PathwayConfig&) const = default;
};

/// Shape-independent checks. A slow count of zero is allowed so fast-only
/// baselines can be expressed.
inline void validate(const PathwayConfig& cfg) {
  if (cfg.n_total < 1) throw InvalidCount("n_total must be at least 1");
  if (cfg.n_slow < 0 || cfg.n_slow > cfg.n_total) {
    throw InvalidCount("n_slow must lie in [0, n_total], got " + std::to_string(cfg.n_slow) +
                       " with n_total " + std::to_string(cfg.n_total));
  }
  if (cfg.stride_h < 1 || cfg.stride_w < 1) throw InvalidArgument("pooling strides must be positive");
  if (cfg.fast_rows < 1 || cfg.fast_cols < 1) throw InvalidArgument("fast grid must be at least 1x1");
}

/// Checks against a concrete per-frame patch grid: strides divide it and the
/// fast grid fits inside it.
inline void validate(const PathwayConfig& cfg, const PatchGrid& grid) {
  validate(cfg);
  if (grid.rows % cfg.stride_h != 0 || grid.cols % cfg.stride_w != 0) {
    throw NonDivisibleStride("stride " + std::to_string(cfg.stride_h) + "x" +
                             std::to_string(cfg.stride_w) + " does not divide patch grid " +
                             std::to_string(grid.rows) + "x" + std::to_string(grid.cols));
  }
  if (cfg.fast_rows > grid.rows || cfg.fast_cols > grid.cols) {
    throw InvalidOutputShape("fast grid " + std::to_string(cfg.fast_rows) + "x" +
                             std::to_string(cfg.fast_cols) + " exceeds patch grid " +
                             std::to_string(grid.rows) + "x" + std::to_string(grid.cols));
  }
}

/// The Fast pathway is meant to be much coarser than the Slow one. Reported
/// as a finding by stage validation, not enforced, so miniature layouts with
/// 1x1 grids on both sides stay expressible.
inline bool fast_coarser_than_slow(const PathwayConfig& cfg, const PatchGrid& grid) {
  const auto slow_rows = grid.rows / cfg.stride_h;
  const auto slow_cols = grid.cols / cfg.stride_w;
  return cfg.fast_rows <= slow_rows && cfg.fast_cols <= slow_cols &&
         cfg.fast_rows * cfg.fast_cols < slow_rows * slow_cols;
}

/// Uniform slow-frame indices floor(i * n_total / n_slow).
inline std::vector<std::int64_t> select_slow_frames(std::int64_t n_total, std::int64_t n_slow) {
  if (n_total < 1) throw InvalidCount("n_total must be at least 1");
  if (n_slow < 0 || n_slow > n_total) {
    throw InvalidCount("cannot select " + std::to_string(n_slow) + " slow frames out of " +
                       std::to_string(n_total));
  }
  std::vector<std::int64_t> idx;
  idx.reserve(static_cast<std::size_t>(n_slow));
  for (std::int64_t i = 0; i < n_slow; ++i) idx.push_back(i * n_total / n_slow);
  return idx;
}

/// Frames of [0, n_total) not chosen by select_slow_frames.
inline std::vector<std::int64_t> complement_frames(std::int64_t n_total,
                                                   const std::vector<std::int64_t>& chosen) {
  std::vector<std::int64_t> rest;
  std::size_t next = 0;
  for (std::int64_t f = 0; f < n_total; ++f) {
    if (next < chosen.size() && chosen[next] == f) {
      ++next;
      continue;
    }
    rest.push_back(f);
  }
  return rest;
}

enum class Pathway { kSlow, kFast };

inline const char* to_string(Pathway p) { return p == Pathway::kSlow ? "slow" : "fast"; }

/// One pathway's pooled output for one source frame.
struct FrameTokens {
  std::int64_t frame_index = 0;
  Pathway pathway = Pathway::kSlow;
  FrameGrid grid;
};

namespace detail {

inline void check_frames(const std::vector<FrameGrid>& frames, const PathwayConfig& cfg) {
  if (static_cast<std::int64_t>(frames.size()) != cfg.n_total) {
    throw InvalidCount("pathway expects " + std::to_string(cfg.n_total) + " frames, got " +
                       std::to_string(frames.size()));
  }
  for (const auto& f : frames) {
    if (!f.same_shape(frames.front())) {
      throw InvalidArgument("all frames must share one shape; got " + f.shape_string() +
                            " and " + frames.front().shape_string());
    }
  }
}

}  // namespace detail

inline std::vector<FrameTokens> run_slow_pathway(const std::vector<FrameGrid>& frames,
                                                 const PathwayConfig& cfg) {
  validate(cfg);
  detail::check_frames(frames, cfg);
  std::vector<FrameTokens> out;
  for (auto f : select_slow_frames(cfg.n_total, cfg.n_slow)) {
    out.push_back({f, Pathway::kSlow,
                   avg_pool_strided(frames[static_cast<std::size_t>(f)], cfg.stride_h, cfg.stride_w)});
  }
  return out;
}

inline std::vector<FrameTokens> run_fast_pathway(const std::vector<FrameGrid>& frames,
                                                 const PathwayConfig& cfg) {
  validate(cfg);
  detail::check_frames(frames, cfg);
  std::vector<std::int64_t> chosen;
  if (cfg.arrangement == Arrangement::kGsf) {
    chosen.resize(static_cast<std::size_t>(cfg.n_total));
    for (std::int64_t f = 0; f < cfg.n_total; ++f) chosen[static_cast<std::size_t>(f)] = f;
  } else {
    chosen = complement_frames(cfg.n_total, select_slow_frames(cfg.n_total, cfg.n_slow));
  }
  std::vector<FrameTokens> out;
  out.reserve(chosen.size());
  for (auto f : chosen) {
    out.push_back({f, Pathway::kFast,
                   avg_pool_adaptive(frames[static_cast<std::size_t>(f)], cfg.fast_rows, cfg.fast_cols)});
  }
  return out;
}

enum class TokenKind { kContent, kSeparator };

struct TokenRecord {
  TokenKind kind = TokenKind::kContent;
  std::optional<std::int64_t> frame_index;
  std::optional<Pathway> pathway;
  std::optional<std::int64_t> row;
  std::optional<std::int64_t> col;

  static TokenRecord separator() { return {TokenKind::kSeparator, {}, {}, {}, {}}; }
  static TokenRecord content(std::int64_t frame, Pathway p, std::int64_t r, std::int64_t c) {
    return {TokenKind::kContent, frame, p, r, c};
  }

  bool operator==(const TokenRecord&) const = default;
};

/// Flattened visual-token sequence. Feature vectors are kept for content
/// tokens only, `channels` values per token in sequence order.
struct TokenSequence {
  std::vector<TokenRecord> records;
  Arrangement arrangement = Arrangement::kGsf;
  std::int64_t channels = 0;
  std::vector<double> features;

  std::int64_t size() const { return static_cast<std::int64_t>(records.size()); }

  std::int64_t separator_count() const {
    return std::count_if(records.begin(), records.end(),
                         [](const TokenRecord& t) { return t.kind == TokenKind::kSeparator; });
  }
  std::int64_t content_count() const { return size() - separator_count(); }

  /// Feature vector of the n-th content token.
  std::span<const double> feature(std::int64_t content_ordinal) const {
    return std::span<const double>(features).subspan(
        static_cast<std::size_t>(content_ordinal * channels), static_cast<std::size_t>(channels));
  }
};

namespace detail {

inline void append_frame(TokenSequence& seq, const FrameTokens& ft) {
  if (seq.channels == 0) seq.channels = ft.grid.channels();
  if (ft.grid.channels() != seq.channels) {
    throw InvalidArgument("pathway outputs disagree on channel count");
  }
  for (std::int64_t r = 0; r < ft.grid.rows(); ++r) {
    for (std::int64_t c = 0; c < ft.grid.cols(); ++c) {
      seq.records.push_back(TokenRecord::content(ft.frame_index, ft.pathway, r, c));
      auto cell = ft.grid.cell(r, c);
      seq.features.insert(seq.features.end(), cell.begin(), cell.end());
    }
  }
}

}  // namespace detail

/// Group-based layout: every slow token, one separator, every fast token.
inline TokenSequence arrange_gsf(const std::vector<FrameTokens>& slow,
                                 const std::vector<FrameTokens>& fast) {
  TokenSequence seq;
  seq.arrangement = Arrangement::kGsf;
  for (const auto& ft : slow) detail::append_frame(seq, ft);
  seq.records.push_back(TokenRecord::separator());
  for (const auto& ft : fast) detail::append_frame(seq, ft);
  return seq;
}

/// Interleaved layout: frames in temporal order, each from exactly one
/// pathway and closed by its own separator.
inline TokenSequence arrange_isf(const std::vector<FrameTokens>& slow,
                                 const std::vector<FrameTokens>& fast, const PathwayConfig& cfg) {
  std::vector<const FrameTokens*> by_frame(static_cast<std::size_t>(cfg.n_total), nullptr);
  auto place = [&](const FrameTokens& ft) {
    if (ft.frame_index < 0 || ft.frame_index >= cfg.n_total) {
      throw PartitionViolation("frame " + std::to_string(ft.frame_index) + " lies outside [0, " +
                               std::to_string(cfg.n_total) + ")");
    }
    auto& slot = by_frame[static_cast<std::size_t>(ft.frame_index)];
    if (slot != nullptr) {
      throw PartitionViolation("frame " + std::to_string(ft.frame_index) +
                               " appears in more than one pathway");
    }
    slot = &ft;
  };
  for (const auto& ft : slow) place(ft);
  for (const auto& ft : fast) place(ft);

  TokenSequence seq;
  seq.arrangement = Arrangement::kIsf;
  for (std::int64_t f = 0; f < cfg.n_total; ++f) {
    const auto* ft = by_frame[static_cast<std::size_t>(f)];
    if (ft == nullptr) {
      throw PartitionViolation("frame " + std::to_string(f) + " is missing from both pathways");
    }
    detail::append_frame(seq, *ft);
    seq.records.push_back(TokenRecord::separator());
  }
  return seq;
}

/// Runs both pathways on the given frames and arranges their outputs per cfg.
inline TokenSequence project(const std::vector<FrameGrid>& frames, const PathwayConfig& cfg) {
  auto slow = run_slow_pathway(frames, cfg);
  auto fast = run_fast_pathway(frames, cfg);
  return cfg.arrangement == Arrangement::kGsf ? arrange_gsf(slow, fast)
                                              : arrange_isf(slow, fast, cfg);
}

/// Writes one token per line as `kind pathway frame row col`; separators
/// are `SEP - - - -` and content tokens use kind `TOK`.
inline void write_layout(std::ostream& os, const TokenSequence& seq) {
  for (const auto& t : seq.records) {
    if (t.kind == TokenKind::kSeparator) {
      os << "SEP - - - -\n";
      continue;
    }
    os << "TOK " << to_string(*t.pathway) << ' ' << *t.frame_index << ' ' << *t.row << ' '
       << *t.col << '\n';
  }
}

}  // namespace sft
