#pragma once

// Naive reference implementations of the grid kernels. Each one is written
// from the definition rather than from the optimised kernel it checks:
// explicit block sums, explicit bin loops, and a tent-kernel formulation of
// bilinear interpolation summed over every input cell.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "sft/numerics.hpp"

namespace sft::oracle {

inline FrameGrid avg_pool_strided(const FrameGrid& g, std::int64_t sh, std::int64_t sw) {
  FrameGrid out(g.rows() / sh, g.cols() / sw, g.channels());
  for (std::int64_t i = 0; i < out.rows(); ++i) {
    for (std::int64_t j = 0; j < out.cols(); ++j) {
      for (std::int64_t k = 0; k < g.channels(); ++k) {
        double sum = 0.0;
        for (std::int64_t dr = 0; dr < sh; ++dr) {
          for (std::int64_t dc = 0; dc < sw; ++dc) sum += g.at(i * sh + dr, j * sw + dc, k);
        }
        out.at(i, j, k) = sum / static_cast<double>(sh * sw);
      }
    }
  }
  return out;
}

inline FrameGrid avg_pool_adaptive(const FrameGrid& g, std::int64_t out_rows, std::int64_t out_cols) {
  FrameGrid out(out_rows, out_cols, g.channels());
  for (std::int64_t i = 0; i < out_rows; ++i) {
    const auto r0 = static_cast<std::int64_t>(std::floor(static_cast<double>(i * g.rows()) / out_rows));
    const auto r1 = static_cast<std::int64_t>(std::floor(static_cast<double>((i + 1) * g.rows()) / out_rows));
    for (std::int64_t j = 0; j < out_cols; ++j) {
      const auto c0 = static_cast<std::int64_t>(std::floor(static_cast<double>(j * g.cols()) / out_cols));
      const auto c1 = static_cast<std::int64_t>(std::floor(static_cast<double>((j + 1) * g.cols()) / out_cols));
      for (std::int64_t k = 0; k < g.channels(); ++k) {
        double sum = 0.0;
        std::int64_t n = 0;
        for (std::int64_t r = r0; r < r1; ++r) {
          for (std::int64_t c = c0; c < c1; ++c) {
            sum += g.at(r, c, k);
            ++n;
          }
        }
        out.at(i, j, k) = sum / static_cast<double>(n);
      }
    }
  }
  return out;
}

inline FrameGrid bilinear_resample(const FrameGrid& g, std::int64_t out_rows, std::int64_t out_cols) {
  auto source = [](std::int64_t i, std::int64_t in, std::int64_t out) {
    if (out == 1) return 0.5 * static_cast<double>(in - 1);
    return static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
  };
  auto tent = [](double d) { return std::max(0.0, 1.0 - std::abs(d)); };

  FrameGrid out(out_rows, out_cols, g.channels());
  for (std::int64_t i = 0; i < out_rows; ++i) {
    const double y = source(i, g.rows(), out_rows);
    for (std::int64_t j = 0; j < out_cols; ++j) {
      const double x = source(j, g.cols(), out_cols);
      for (std::int64_t k = 0; k < g.channels(); ++k) {
        double acc = 0.0;
        for (std::int64_t r = 0; r < g.rows(); ++r) {
          const double wy = tent(y - static_cast<double>(r));
          if (wy == 0.0) continue;
          for (std::int64_t c = 0; c < g.cols(); ++c) {
            acc += wy * tent(x - static_cast<double>(c)) * g.at(r, c, k);
          }
        }
        out.at(i, j, k) = acc;
      }
    }
  }
  return out;
}

inline double max_abs_diff(const FrameGrid& a, const FrameGrid& b) {
  if (!a.same_shape(b)) return INFINITY;
  double worst = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) worst = std::max(worst, std::abs(av[i] - bv[i]));
  return worst;
}

}  // namespace sft::oracle
