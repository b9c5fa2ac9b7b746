// Acceptance gate: one PASS/FAIL line per criterion, followed by indented
// detail lines. Exits non-zero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sft/sft.hpp"

namespace {

constexpr double kTable4Seconds = 1.0;
constexpr double kTable5Seconds = 1.0;
constexpr double kResizeSeconds = 5.0;
constexpr double kOracleSeconds = 10.0;
constexpr std::int64_t kSpareTokens = 512;
constexpr int kResizeTrials = 10000;
constexpr std::int64_t kOracleTrials = 1000;
constexpr double kOracleTolerance = 1e-6;
constexpr double kAffineTolerance = 1e-9;
constexpr int kArrangementTrials = 1000;
constexpr int kSamplingTrials = 1000;
constexpr double kMaxDuration = 1e4;

struct Verdict {
  bool passed = true;
  std::vector<std::string> details;

  void fail(const std::string& why) {
    passed = false;
    details.push_back(why);
  }
  void note(const std::string& what) { details.push_back(what); }
};

struct Criterion {
  std::string name;
  std::function<Verdict()> run;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = "SFT_NO_COLOR=1 \"" SFT_CLI_PATH "\" " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cl(line);
    for (std::string c; std::getline(cl, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string join(const std::vector<std::int64_t>& v, const char* suffix = "") {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : "/") + std::to_string(x) + suffix;
  return s;
}

// Runs `sweep <config>` and compares the content and rounded columns.
Verdict table_sweep(const std::string& config, const std::vector<std::int64_t>& content,
                    const std::vector<std::int64_t>& rounded, double limit) {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const auto r = cli("sweep " + config);
  const double secs = seconds_since(start);
  if (r.code != 0) {
    v.fail("sft sweep exited " + std::to_string(r.code));
    return v;
  }
  std::vector<std::int64_t> got_content, got_rounded;
  for (const auto& row : csv_rows(r.out)) {
    if (row.size() != 8) {
      v.fail("malformed csv row");
      return v;
    }
    got_content.push_back(std::stoll(row[4]));
    got_rounded.push_back(std::stoll(row[6]));
  }
  if (!content.empty() && got_content != content) {
    v.fail("content tokens " + join(got_content) + ", expected " + join(content));
  }
  if (got_rounded != rounded) {
    v.fail("rounded " + join(got_rounded, "K") + ", expected " + join(rounded, "K"));
  }
  if (secs >= limit) v.fail("runtime " + fmt("%.3f", secs) + " s exceeds " + fmt("%.1f", limit) + " s");
  v.note("content " + join(got_content) + "; rounded " + join(got_rounded, "K") + "; " +
         fmt("%.3f", secs) + " s");
  return v;
}

Verdict stage_two_defaults() {
  Verdict v;
  const auto doc = sft::load_config_document("table1_stage2.cfg");
  const auto cfg = sft::resolve_config(doc);
  const auto& st = cfg.stage;
  const auto& p = cfg.pathway;
  const bool shape = st.stage == sft::Stage::kII && st.context_length == 16384 &&
                     st.patch == 16 && st.video_max_area == 480 * 480 && st.max_frames == 128 &&
                     p.n_total == 128 && p.n_slow == 32 && p.stride_h == 2 && p.stride_w == 2 &&
                     p.fast_rows == 4 && p.fast_cols == 4;
  if (!shape) v.fail("bundled stage II config does not carry the published settings");
  for (const auto& f : sft::validate_stage(st)) v.fail("finding " + f.code + ": " + f.message);
  const auto r = sft::video_budget(p, sft::default_video_grid(st), st);
  const auto spare = st.context_length - r.total_tokens;
  if (spare < kSpareTokens) v.fail("only " + std::to_string(spare) + " spare tokens");
  v.note("grid 30x30, total " + std::to_string(r.total_tokens) + " of " +
         std::to_string(st.context_length) + ", spare " + std::to_string(spare));
  return v;
}

Verdict resize_properties() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const sft::AreaThresholds th{288 * 288, 480 * 480};
  const std::int64_t p = 16;
  sft::SplitMix64 rng(20240101);
  int planned = 0, degenerate = 0;
  int area_bad = 0, multiple_bad = 0, drift_bad = 0, corrected_bad = 0;
  std::string first_drift;
  for (int i = 0; i < kResizeTrials; ++i) {
    const sft::Resolution res{rng.range(16, 4096), rng.range(16, 4096)};
    sft::ResizePlan plan;
    try {
      plan = sft::plan_resize(res, th, p);
    } catch (const sft::DegenerateResize&) {
      ++degenerate;
      continue;
    }
    ++planned;
    const auto& t = plan.target;
    if (plan.branch == sft::ScaleBranch::kShrink && t.area() > th.max_area) ++area_bad;
    if (t.height % p != 0 || t.width % p != 0) ++multiple_bad;
    const double want = static_cast<double>(res.height) / static_cast<double>(res.width);
    const double got = static_cast<double>(t.height) / static_cast<double>(t.width);
    const double drift = std::abs(got - want);
    const double bound = static_cast<double>(p) * (1.0 / static_cast<double>(t.width) +
                                                   1.0 / static_cast<double>(t.height));
    if (drift > bound) {
      if (drift_bad++ == 0) {
        first_drift = std::to_string(res.height) + "x" + std::to_string(res.width) + " -> " +
                      std::to_string(t.height) + "x" + std::to_string(t.width) + " drift " +
                      fmt("%.4f", drift) + " > bound " + fmt("%.4f", bound);
      }
    }
    const double corrected = static_cast<double>(p) / static_cast<double>(t.width) * std::max(1.0, want);
    if (drift > corrected * (1.0 + 1e-12)) ++corrected_bad;
  }
  const double secs = seconds_since(start);
  if (area_bad) v.fail(std::to_string(area_bad) + " shrink plans exceed the max area");
  if (multiple_bad) v.fail(std::to_string(multiple_bad) + " targets are not multiples of p");
  if (drift_bad) {
    v.fail(std::to_string(drift_bad) + " of " + std::to_string(planned) +
           " plans exceed the drift bound p*(1/tw + 1/th); first: " + first_drift);
  }
  if (secs >= kResizeSeconds) v.fail("runtime " + fmt("%.3f", secs) + " s");
  v.note("area <= max on shrink: " + std::to_string(area_bad) + " violations; multiples of p: " +
         std::to_string(multiple_bad) + " violations; degenerate skipped: " +
         std::to_string(degenerate));
  v.note("drift within (p/tw)*max(1, h/w): " + std::to_string(corrected_bad) + " violations");
  v.note(fmt("%.3f", secs) + " s");
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  sft::selfcheck::Options opt;
  opt.seed = 42;
  opt.trials = kOracleTrials;
  opt.max_side = 64;
  opt.max_channels = 8;
  opt.tolerance = kOracleTolerance;
  opt.affine_tolerance = kAffineTolerance;
  for (const auto& o : sft::selfcheck::run_checks(opt)) {
    if (o.name.find("_tokens") != std::string::npos) continue;
    if (!o.passed) v.fail(o.name + " " + o.detail);
    else v.note(o.name + " " + o.detail);
  }
  const double secs = seconds_since(start);
  if (secs >= kOracleSeconds) v.fail("runtime " + fmt("%.3f", secs) + " s");
  v.note(fmt("%.3f", secs) + " s");
  return v;
}

Verdict arrangement_laws() {
  Verdict v;
  sft::SplitMix64 rng(77);
  int violations = 0;
  std::string first;
  auto bad = [&](const std::string& why) {
    if (violations++ == 0) first = why;
  };
  for (int t = 0; t < kArrangementTrials; ++t) {
    sft::PathwayConfig cfg;
    cfg.stride_h = rng.range(1, 3);
    cfg.stride_w = rng.range(1, 3);
    const sft::PatchGrid grid{cfg.stride_h * rng.range(1, 4), cfg.stride_w * rng.range(1, 4)};
    cfg.n_total = rng.range(1, 12);
    cfg.n_slow = rng.range(0, cfg.n_total);
    cfg.fast_rows = rng.range(1, grid.rows);
    cfg.fast_cols = rng.range(1, grid.cols);
    std::vector<sft::FrameGrid> frames;
    for (std::int64_t f = 0; f < cfg.n_total; ++f) frames.push_back(sft::synth_features(f, grid, 2));

    const auto slow = (grid.rows / cfg.stride_h) * (grid.cols / cfg.stride_w);
    const auto fast = cfg.fast_rows * cfg.fast_cols;
    const std::string tag = "n_total=" + std::to_string(cfg.n_total) +
                            " n_slow=" + std::to_string(cfg.n_slow) + " grid=" +
                            std::to_string(grid.rows) + "x" + std::to_string(grid.cols);

    cfg.arrangement = sft::Arrangement::kGsf;
    const auto gsf = sft::project(frames, cfg);
    if (gsf.size() != cfg.n_slow * slow + 1 + cfg.n_total * fast) bad("GSF length " + tag);
    if (gsf.separator_count() != 1) bad("GSF separators " + tag);

    cfg.arrangement = sft::Arrangement::kIsf;
    const auto isf = sft::project(frames, cfg);
    const auto n_fast = cfg.n_total - cfg.n_slow;
    if (isf.size() != cfg.n_slow * slow + n_fast * fast + cfg.n_total) bad("ISF length " + tag);

    // Every frame appears exactly once, in order, under exactly one pathway.
    std::vector<std::int64_t> order;
    std::vector<int> slow_seen(static_cast<std::size_t>(cfg.n_total), 0);
    for (const auto& rec : isf.records) {
      if (!rec.frame_index) continue;
      if (order.empty() || order.back() != *rec.frame_index) order.push_back(*rec.frame_index);
      if (*rec.pathway == sft::Pathway::kSlow) slow_seen[static_cast<std::size_t>(*rec.frame_index)] = 1;
    }
    std::vector<std::int64_t> all(static_cast<std::size_t>(cfg.n_total));
    for (std::int64_t f = 0; f < cfg.n_total; ++f) all[static_cast<std::size_t>(f)] = f;
    if (order != all) bad("ISF partition " + tag);
    if (std::count(slow_seen.begin(), slow_seen.end(), 1) != cfg.n_slow) bad("ISF slow count " + tag);

    if (gsf.content_count() - isf.content_count() != cfg.n_slow * fast) bad("GSF-ISF content " + tag);
  }
  if (violations) v.fail(std::to_string(violations) + " violations; first: " + first);
  v.note(std::to_string(kArrangementTrials) + " random configs, " + std::to_string(violations) +
         " violations");
  return v;
}

Verdict sampling_contract() {
  Verdict v;
  sft::SplitMix64 rng(4242);
  int violations = 0, fallbacks = 0;
  std::string first;
  auto bad = [&](const std::string& why) {
    if (violations++ == 0) first = why;
  };
  for (int i = 0; i < kSamplingTrials; ++i) {
    // Alternate uniform and log-uniform draws over (0, 1e4] so both modes are exercised.
    const double u = 1.0 - rng.unit();
    const double duration = i % 4 < 2 ? u * kMaxDuration : kMaxDuration * std::pow(10.0, -6.0 * (1.0 - u));
    const double fps = i % 2 == 0 ? 1.0 : 0.25 + rng.unit() * 4.0;
    const auto cap = i % 2 == 0 ? std::int64_t{128} : rng.range(1, 256);
    const auto plan = sft::sample_frames(duration, fps, cap);
    const std::string tag = "duration=" + fmt("%.6f", duration) + " fps=" + fmt("%.4f", fps) +
                            " max_frames=" + std::to_string(cap);

    // ceil(duration * fps) counted exactly: the k with k / fps < duration.
    std::int64_t count = 0;
    while (static_cast<double>(count) / fps < duration) ++count;

    const auto n = static_cast<std::int64_t>(plan.timestamps.size());
    const bool fallback = count > cap;
    if (n != std::min(count, cap)) bad("count " + std::to_string(n) + " " + tag);
    if ((plan.mode == sft::SamplingMode::kUniformFallback) != fallback) bad("mode " + tag);
    for (std::size_t k = 0; k < plan.timestamps.size(); ++k) {
      const double ts = plan.timestamps[k];
      if (!(ts >= 0.0 && ts < duration)) bad("out of range " + tag);
      if (k > 0 && !(ts > plan.timestamps[k - 1])) bad("not monotone " + tag);
      if (!fallback && ts != static_cast<double>(k) / fps) bad("fps timestamp " + tag);
    }
    if (fallback) ++fallbacks;
  }
  if (violations) v.fail(std::to_string(violations) + " violations; first: " + first);
  v.note(std::to_string(kSamplingTrials) + " durations, " + std::to_string(fallbacks) +
         " in uniform fallback, " + std::to_string(violations) + " violations");
  return v;
}

Verdict determinism() {
  Verdict v;
  const auto a = cli("check --seed 42");
  const auto b = cli("check --seed 42");
  if (a.code != 0 || b.code != 0) v.fail("check exited " + std::to_string(a.code) + "/" + std::to_string(b.code));
  if (a.out.empty() || a.out != b.out) v.fail("check --seed 42 output differs between runs");

  const auto layout = cli("arrange gsf_miniature.cfg");
  std::ifstream in(std::string(SFT_GOLDEN_DIR) + "/gsf_miniature.layout", std::ios::binary);
  std::ostringstream golden;
  golden << in.rdbuf();
  if (layout.code != 0 || layout.out != golden.str()) v.fail("miniature layout differs from golden file");
  v.note("check output " + std::to_string(a.out.size()) + " bytes, identical; layout " +
         std::to_string(layout.out.size()) + " bytes, identical");
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"pathway_ablation_table",
       [] { return table_sweep("table4.cfg", {7200, 10800, 14400, 28800, 2048, 9248}, {7, 10, 14, 28, 2, 9}, kTable4Seconds); }},
      {"projector_comparison_table",
       [] { return table_sweep("table5.cfg", {}, {28, 28, 2, 2, 9}, kTable5Seconds); }},
      {"stage_two_defaults", stage_two_defaults},
      {"resize_properties", resize_properties},
      {"oracle_equivalence", oracle_equivalence},
      {"arrangement_laws", arrangement_laws},
      {"sampling_contract", sampling_contract},
      {"determinism", determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::cout << (v.passed ? "PASS " : "FAIL ") << c.name << '\n';
    for (const auto& d : v.details) std::cout << "    " << d << '\n';
    if (!v.passed) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
