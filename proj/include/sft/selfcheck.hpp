#pragma once

// Oracle-equivalence self-check: every grid kernel is compared against its
// naive reference on seeded random grids, and the published token tables are
// recomputed. Output is a pure function of the seed and trial count.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "sft/budget.hpp"
#include "sft/numerics.hpp"
#include "sft/oracle.hpp"
#include "sft/reference.hpp"

namespace sft::selfcheck {

using Kernel = std::function<FrameGrid(const FrameGrid&, std::int64_t, std::int64_t)>;

/// The kernels under test; substitutable so a perturbed kernel can be injected.
struct Kernels {
  Kernel strided = [](const FrameGrid& g, std::int64_t a, std::int64_t b) {
    return avg_pool_strided(g, a, b);
  };
  Kernel adaptive = [](const FrameGrid& g, std::int64_t a, std::int64_t b) {
    return avg_pool_adaptive(g, a, b);
  };
  Kernel bilinear = [](const FrameGrid& g, std::int64_t a, std::int64_t b) {
    return bilinear_resample(g, a, b);
  };
};

inline const std::vector<std::string>& kernel_names() {
  static const std::vector<std::string> names = {"avg_pool_strided", "avg_pool_adaptive",
                                                 "bilinear_resample"};
  return names;
}

/// Wraps the named kernel so its first output value is off by `delta`.
inline Kernels perturbed(Kernels k, const std::string& name, double delta = 1e-3) {
  auto wrap = [delta](Kernel inner) {
    return Kernel([inner, delta](const FrameGrid& g, std::int64_t a, std::int64_t b) {
      auto out = inner(g, a, b);
      out.values()[0] += delta;
      return out;
    });
  };
  if (name == "avg_pool_strided") {
    k.strided = wrap(k.strided);
  } else if (name == "avg_pool_adaptive") {
    k.adaptive = wrap(k.adaptive);
  } else if (name == "bilinear_resample") {
    k.bilinear = wrap(k.bilinear);
  } else {
    throw InvalidArgument("unknown kernel '" + name + "'");
  }
  return k;
}

struct Options {
  std::uint64_t seed = 42;
  std::int64_t trials = 1000;
  std::int64_t max_side = 64;
  std::int64_t max_channels = 8;
  double tolerance = 1e-6;
  double affine_tolerance = 1e-9;
  double mean_tolerance = 1e-9;
  bool color = false;
};

struct Outcome {
  std::string name;
  bool passed = true;
  std::string detail;
};

inline FrameGrid random_grid(SplitMix64& rng, std::int64_t rows, std::int64_t cols,
                             std::int64_t channels) {
  FrameGrid g(rows, cols, channels);
  for (double& v : g.values()) v = rng.unit() * 200.0 - 100.0;
  return g;
}

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t salt, std::int64_t trial) {
  return SplitMix64::mix(seed ^ SplitMix64::mix(salt + static_cast<std::uint64_t>(trial)));
}

// Runs `trials` random comparisons; `draw` builds (kernel output, oracle output, shape text).
template <typename Draw>
Outcome compare(const std::string& name, std::uint64_t salt, const Options& opt, double tol,
                Draw draw) {
  double worst = 0.0;
  for (std::int64_t t = 0; t < opt.trials; ++t) {
    const auto ts = trial_seed(opt.seed, salt, t);
    SplitMix64 rng(ts);
    auto [got, want, shape] = draw(rng);
    const double err = oracle::max_abs_diff(got, want);
    if (!(err <= tol)) {
      return {name, false,
              "seed=" + std::to_string(opt.seed) + " trial=" + std::to_string(t) +
                  " trial_seed=" + std::to_string(ts) + " grid=" + shape +
                  " max_err=" + fmt("%.3e", err)};
    }
    if (err > worst) worst = err;
  }
  return {name, true,
          "seed=" + std::to_string(opt.seed) + " trials=" + std::to_string(opt.trials) +
              " max_err=" + fmt("%.3e", worst)};
}

inline Outcome golden(const std::string& name, const std::vector<reference::GoldenRow>& rows) {
  const auto stage = stage_two_defaults();
  std::string got;
  for (const auto& row : rows) {
    const auto r = video_budget(row.entry.pathway, reference::reference_grid(), stage);
    if (r.content_tokens() != row.content_tokens || r.rounded_k != row.rounded_k) {
      return {name, false,
              row.entry.label + " gave " + std::to_string(r.content_tokens()) + " tokens (" +
                  std::to_string(r.rounded_k) + "K), expected " +
                  std::to_string(row.content_tokens) + " (" + std::to_string(row.rounded_k) + "K)"};
    }
    got += (got.empty() ? "" : ",") + std::to_string(r.rounded_k) + "K";
  }
  return {name, true, got};
}

}  // namespace detail

inline std::vector<Outcome> run_checks(const Options& opt, const Kernels& k = {}) {
  std::vector<Outcome> out;
  const auto side = opt.max_side;
  const auto max_ch = opt.max_channels;

  out.push_back(detail::compare("avg_pool_strided", 1, opt, opt.tolerance, [&](SplitMix64& rng) {
    const auto sh = rng.range(1, 4);
    const auto sw = rng.range(1, 4);
    const auto rows = sh * rng.range(1, side / sh);
    const auto cols = sw * rng.range(1, side / sw);
    const auto g = random_grid(rng, rows, cols, rng.range(1, max_ch));
    return std::tuple{k.strided(g, sh, sw), oracle::avg_pool_strided(g, sh, sw), g.shape_string()};
  }));

  out.push_back(detail::compare("avg_pool_adaptive", 2, opt, opt.tolerance, [&](SplitMix64& rng) {
    const auto rows = rng.range(1, side);
    const auto cols = rng.range(1, side);
    const auto g = random_grid(rng, rows, cols, rng.range(1, max_ch));
    const auto orow = rng.range(1, rows);
    const auto ocol = rng.range(1, cols);
    return std::tuple{k.adaptive(g, orow, ocol), oracle::avg_pool_adaptive(g, orow, ocol),
                      g.shape_string()};
  }));

  out.push_back(detail::compare("bilinear_resample", 3, opt, opt.tolerance, [&](SplitMix64& rng) {
    const auto g = random_grid(rng, rng.range(1, side), rng.range(1, side), rng.range(1, max_ch));
    const auto orow = rng.range(1, side);
    const auto ocol = rng.range(1, side);
    return std::tuple{k.bilinear(g, orow, ocol), oracle::bilinear_resample(g, orow, ocol),
                      g.shape_string()};
  }));

  out.push_back(detail::compare("bilinear_affine", 4, opt, opt.affine_tolerance, [&](SplitMix64& rng) {
    const auto rows = rng.range(1, side);
    const auto cols = rng.range(1, side);
    const auto ch = rng.range(1, max_ch);
    std::vector<double> a(static_cast<std::size_t>(ch)), b(a), d(a);
    for (std::int64_t c = 0; c < ch; ++c) {
      a[static_cast<std::size_t>(c)] = rng.unit() * 2.0 - 1.0;
      b[static_cast<std::size_t>(c)] = rng.unit() * 2.0 - 1.0;
      d[static_cast<std::size_t>(c)] = rng.unit() * 20.0 - 10.0;
    }
    auto field = [&](double r, double c, std::int64_t ch_i) {
      const auto i = static_cast<std::size_t>(ch_i);
      return a[i] * r + b[i] * c + d[i];
    };
    FrameGrid g(rows, cols, ch);
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t c = 0; c < cols; ++c)
        for (std::int64_t q = 0; q < ch; ++q) g.at(r, c, q) = field(r, c, q);
    const auto orow = rng.range(1, side);
    const auto ocol = rng.range(1, side);
    auto coord = [](std::int64_t i, std::int64_t in, std::int64_t out) {
      return out == 1 ? 0.5 * static_cast<double>(in - 1)
                      : static_cast<double>(i * (in - 1)) / static_cast<double>(out - 1);
    };
    FrameGrid want(orow, ocol, ch);
    for (std::int64_t i = 0; i < orow; ++i)
      for (std::int64_t j = 0; j < ocol; ++j)
        for (std::int64_t q = 0; q < ch; ++q)
          want.at(i, j, q) = field(coord(i, rows, orow), coord(j, cols, ocol), q);
    return std::tuple{k.bilinear(g, orow, ocol), want, g.shape_string()};
  }));

  out.push_back(detail::compare("strided_mean", 5, opt, opt.mean_tolerance, [&](SplitMix64& rng) {
    const auto sh = rng.range(1, 4);
    const auto sw = rng.range(1, 4);
    const auto rows = sh * rng.range(1, side / sh);
    const auto cols = sw * rng.range(1, side / sw);
    const auto g = random_grid(rng, rows, cols, rng.range(1, max_ch));
    const auto pooled = k.strided(g, sh, sw);
    auto channel_means = [](const FrameGrid& x) {
      FrameGrid m(1, 1, x.channels());
      for (std::int64_t r = 0; r < x.rows(); ++r)
        for (std::int64_t c = 0; c < x.cols(); ++c)
          for (std::int64_t q = 0; q < x.channels(); ++q) m.at(0, 0, q) += x.at(r, c, q);
      for (double& v : m.values()) v /= static_cast<double>(x.cells());
      return m;
    };
    return std::tuple{channel_means(pooled), channel_means(g), g.shape_string()};
  }));

  out.push_back(detail::golden("pathway_ablation_tokens", reference::pathway_ablation()));
  out.push_back(detail::golden("projector_comparison_tokens", reference::projector_comparison()));
  return out;
}

/// Prints one verdict line per check; returns true iff all passed.
inline bool report(std::ostream& os, const std::vector<Outcome>& outcomes, bool color) {
  bool ok = true;
  for (const auto& o : outcomes) {
    const char* tag = o.passed ? "PASS" : "FAIL";
    if (color) {
      os << (o.passed ? "\x1b[32m" : "\x1b[31m") << tag << "\x1b[0m";
    } else {
      os << tag;
    }
    os << ' ' << o.name << ' ' << o.detail << '\n';
    ok = ok && o.passed;
  }
  return ok;
}

}  // namespace sft::selfcheck
