#pragma once

// Dense patch-token grids and the pooling/resampling kernels applied to them.
// Values are stored row-major with channels innermost: index (r * cols + c) * channels + ch.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sft/error.hpp"
#include "sft/geometry.hpp"

namespace sft {

class FrameGrid {
 public:
  FrameGrid() = default;

  FrameGrid(std::int64_t rows, std::int64_t cols, std::int64_t channels, double fill = 0.0)
      : rows_(rows), cols_(cols), channels_(channels) {
    if (rows < 1 || cols < 1 || channels < 1) {
      throw InvalidArgument("frame grid dimensions must be positive, got " + shape_string());
    }
    values_.assign(static_cast<std::size_t>(rows * cols * channels), fill);
  }

  FrameGrid(std::int64_t rows, std::int64_t cols, std::int64_t channels, std::vector<double> values)
      : FrameGrid(rows, cols, channels) {
    if (values.size() != values_.size()) {
      throw InvalidArgument("frame grid " + shape_string() + " expects " +
                            std::to_string(values_.size()) + " values, got " +
                            std::to_string(values.size()));
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw InvalidArgument("frame grid values must be finite");
    }
    values_ = std::move(values);
  }

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t channels() const { return channels_; }
  std::int64_t cells() const { return rows_ * cols_; }

  double& at(std::int64_t r, std::int64_t c, std::int64_t ch = 0) {
    return values_[index(r, c, ch)];
  }
  double at(std::int64_t r, std::int64_t c, std::int64_t ch = 0) const {
    return values_[index(r, c, ch)];
  }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Channel vector of one cell.
  std::span<const double> cell(std::int64_t r, std::int64_t c) const {
    return std::span<const double>(values_).subspan(index(r, c, 0),
                                                    static_cast<std::size_t>(channels_));
  }

  bool same_shape(const FrameGrid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && channels_ == other.channels_;
  }

  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_) + "x" + std::to_string(channels_);
  }

  bool operator==(const FrameGrid&) const = default;

 private:
  std::size_t index(std::int64_t r, std::int64_t c, std::int64_t ch) const {
    return static_cast<std::size_t>((r * cols_ + c) * channels_ + ch);
  }

  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::int64_t channels_ = 0;
  std::vector<double> values_;
};

/// Mean of each stride_h x stride_w block, per channel.
inline FrameGrid avg_pool_strided(const FrameGrid& g, std::int64_t stride_h, std::int64_t stride_w) {
  if (stride_h < 1 || stride_w < 1 || g.rows() % stride_h != 0 || g.cols() % stride_w != 0) {
    throw NonDivisibleStride("stride " + std::to_string(stride_h) + "x" +
                             std::to_string(stride_w) + " does not divide grid " +
                             g.shape_string());
  }
  const auto out_rows = g.rows() / stride_h;
  const auto out_cols = g.cols() / stride_w;
  const auto ch = g.channels();
  FrameGrid out(out_rows, out_cols, ch);
  auto dst = out.values();
  auto src = g.values();

  // Accumulate input rows into their output row, then scale once.
  for (std::int64_t r = 0; r < g.rows(); ++r) {
    const auto orow = r / stride_h;
    for (std::int64_t c = 0; c < g.cols(); ++c) {
      const auto ocol = c / stride_w;
      const auto* in = &src[static_cast<std::size_t>((r * g.cols() + c) * ch)];
      auto* acc = &dst[static_cast<std::size_t>((orow * out_cols + ocol) * ch)];
      for (std::int64_t k = 0; k < ch; ++k) acc[k] += in[k];
    }
  }
  const double inv = 1.0 / static_cast<double>(stride_h * stride_w);
  for (double& v : dst) v *= inv;
  return out;
}

/// First input index of adaptive bin i when n inputs are split into out bins.
inline std::int64_t adaptive_bin_start(std::int64_t i, std::int64_t n, std::int64_t out) {
  return i * n / out;
}

/// Mean over floor-boundary bins [floor(i*n/out), floor((i+1)*n/out)) per axis,
/// computed separably: column bins first, then row bins. Bins are rectangles,
/// so the mean of row means equals the block mean; one-cell bins copy exactly.
inline FrameGrid avg_pool_adaptive(const FrameGrid& g, std::int64_t out_rows, std::int64_t out_cols) {
  if (out_rows < 1 || out_cols < 1 || out_rows > g.rows() || out_cols > g.cols()) {
    throw InvalidOutputShape("adaptive pooling target " + std::to_string(out_rows) + "x" +
                             std::to_string(out_cols) + " does not fit inside grid " +
                             g.shape_string());
  }
  const auto rows = g.rows();
  const auto cols = g.cols();
  const auto ch = g.channels();

  FrameGrid across(rows, out_cols, ch);
  for (std::int64_t j = 0; j < out_cols; ++j) {
    const auto c0 = adaptive_bin_start(j, cols, out_cols);
    const auto c1 = adaptive_bin_start(j + 1, cols, out_cols);
    const double inv = 1.0 / static_cast<double>(c1 - c0);
    for (std::int64_t r = 0; r < rows; ++r) {
      for (std::int64_t k = 0; k < ch; ++k) {
        double sum = 0.0;
        for (std::int64_t c = c0; c < c1; ++c) sum += g.at(r, c, k);
        across.at(r, j, k) = c1 - c0 == 1 ? sum : sum * inv;
      }
    }
  }

  FrameGrid out(out_rows, out_cols, ch);
  for (std::int64_t i = 0; i < out_rows; ++i) {
    const auto r0 = adaptive_bin_start(i, rows, out_rows);
    const auto r1 = adaptive_bin_start(i + 1, rows, out_rows);
    const double inv = 1.0 / static_cast<double>(r1 - r0);
    for (std::int64_t j = 0; j < out_cols; ++j) {
      for (std::int64_t k = 0; k < ch; ++k) {
        double sum = 0.0;
        for (std::int64_t r = r0; r < r1; ++r) sum += across.at(r, j, k);
        out.at(i, j, k) = r1 - r0 == 1 ? sum : sum * inv;
      }
    }
  }
  return out;
}

/// Align-corners source coordinate of output index i; a single output samples the midpoint.
inline double align_corners_coord(std::int64_t i, std::int64_t in, std::int64_t out) {
  if (out == 1) return static_cast<double>(in - 1) / 2.0;
  return static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
}

/// Bilinear resampling with align-corners semantics, as used to rescale
/// position-embedding tables to a new patch grid.
inline FrameGrid bilinear_resample(const FrameGrid& g, std::int64_t out_rows, std::int64_t out_cols) {
  if (out_rows < 1 || out_cols < 1) {
    throw InvalidOutputShape("bilinear target must be at least 1x1");
  }
  struct Tap {
    std::int64_t lo;
    std::int64_t hi;
    double w;
  };
  auto taps = [](std::int64_t in, std::int64_t out) {
    std::vector<Tap> t(static_cast<std::size_t>(out));
    for (std::int64_t i = 0; i < out; ++i) {
      const double x = align_corners_coord(i, in, out);
      auto lo = static_cast<std::int64_t>(std::floor(x));
      if (lo > in - 1) lo = in - 1;
      const auto hi = lo + 1 < in ? lo + 1 : lo;
      t[static_cast<std::size_t>(i)] = {lo, hi, x - static_cast<double>(lo)};
    }
    return t;
  };
  const auto ty = taps(g.rows(), out_rows);
  const auto tx = taps(g.cols(), out_cols);
  const auto ch = g.channels();

  FrameGrid out(out_rows, out_cols, ch);
  for (std::int64_t i = 0; i < out_rows; ++i) {
    const auto& y = ty[static_cast<std::size_t>(i)];
    for (std::int64_t j = 0; j < out_cols; ++j) {
      const auto& x = tx[static_cast<std::size_t>(j)];
      const double w00 = (1.0 - y.w) * (1.0 - x.w);
      const double w01 = (1.0 - y.w) * x.w;
      const double w10 = y.w * (1.0 - x.w);
      const double w11 = y.w * x.w;
      for (std::int64_t k = 0; k < ch; ++k) {
        out.at(i, j, k) = w00 * g.at(y.lo, x.lo, k) + w01 * g.at(y.lo, x.hi, k) +
                          w10 * g.at(y.hi, x.lo, k) + w11 * g.at(y.hi, x.hi, k);
      }
    }
  }
  return out;
}

/// SplitMix64: fixed integer mixing, identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi]; modulo bias is negligible for the small ranges used here.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Deterministic stand-in for frozen vision-encoder features: every value is a
/// hash of (frame_index, row, col, channel) mapped into [-1, 1).
inline FrameGrid synth_features(std::int64_t frame_index, const PatchGrid& grid, std::int64_t channels) {
  FrameGrid out(grid.rows, grid.cols, channels);
  for (std::int64_t r = 0; r < grid.rows; ++r) {
    for (std::int64_t c = 0; c < grid.cols; ++c) {
      for (std::int64_t k = 0; k < channels; ++k) {
        std::uint64_t h = SplitMix64::mix(static_cast<std::uint64_t>(frame_index) + 0x51F15EEDULL);
        h = SplitMix64::mix(h ^ static_cast<std::uint64_t>(r));
        h = SplitMix64::mix(h ^ static_cast<std::uint64_t>(c));
        h = SplitMix64::mix(h ^ static_cast<std::uint64_t>(k));
        out.at(r, c, k) = static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
      }
    }
  }
  return out;
}

/// Order-sensitive 64-bit FNV-1a digest of a grid's shape and raw value bits.
inline std::uint64_t checksum(const FrameGrid& g) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xFFU;
      h *= 0x100000001B3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(g.rows()));
  feed(static_cast<std::uint64_t>(g.cols()));
  feed(static_cast<std::uint64_t>(g.channels()));
  for (double v : g.values()) {
    feed(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

}  // namespace sft
