// sft: plan, sweep, arrange and self-check SlowFast video-token budgets.
//
// Exit codes: 0 success, 1 usage or config error, 2 context overflow (plan),
// 3 oracle mismatch (check).

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sft/sft.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitOverflow = 2;
constexpr int kExitOracle = 3;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string format;
  std::string out_path;
  std::uint64_t seed = 42;
  std::int64_t trials = 1000;
  std::string perturb;
};

sft::ResolvedConfig load(const Options& opt) {
  sft::Json doc = sft::Json::object();
  if (!opt.config_path.empty()) doc = sft::load_config_document(opt.config_path);
  for (const auto& o : opt.overrides) sft::apply_override(doc, o);
  return sft::resolve_config(doc);
}

std::string format_or(const Options& opt, const std::string& fallback) {
  const auto f = opt.format.empty() ? fallback : opt.format;
  if (f != "json" && f != "csv" && f != "text") {
    throw sft::ConfigError("unknown format '" + f + "' (expected json, csv or text)");
  }
  return f;
}

/// Writes to --out when given, otherwise stdout. The file is only created
/// once the whole output is ready.
void emit(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) throw sft::ConfigError("cannot write output file '" + opt.out_path + "'");
  out << text;
}

bool color_enabled(const Options& opt) {
  const char* no_color = std::getenv("SFT_NO_COLOR");
  if (no_color != nullptr && std::string(no_color) == "1") return false;
  return opt.out_path.empty() && isatty(STDOUT_FILENO) != 0;
}

int run_plan(const Options& opt) {
  const auto cfg = load(opt);
  const auto format = format_or(opt, "json");
  sft::BudgetReport report;
  if (cfg.image) {
    if (format == "csv") throw sft::ConfigError("csv output is only defined for video budgets");
    report = sft::image_budget(*cfg.image, cfg.stage, cfg.text_allowance);
  } else {
    if (!cfg.stage.video_max_area && cfg.grid.rows == 0) {
      throw sft::ConfigError("stage I has no video grid; set grid_rows/grid_cols or image_height/image_width");
    }
    report = sft::video_budget(cfg.pathway, cfg.grid, cfg.stage, cfg.text_allowance);
  }

  std::ostringstream os;
  if (format == "json") {
    os << sft::to_json(report).dump(2) << '\n';
  } else if (format == "csv") {
    os << sft::kSweepCsvHeader << '\n' << sft::csv_row(cfg.pathway, report) << '\n';
  } else {
    sft::write_text(os, report);
  }
  emit(opt, os.str());
  return report.fits_context ? kExitOk : kExitOverflow;
}

int run_sweep(const Options& opt) {
  const auto cfg = load(opt);
  const auto format = format_or(opt, "csv");
  auto entries = cfg.sweep;
  if (entries.empty()) entries.push_back({cfg.label, cfg.pathway});

  std::vector<sft::PathwayConfig> configs;
  for (const auto& e : entries) configs.push_back(e.pathway);
  const auto reports = sft::sweep(configs, cfg.grid, cfg.stage, cfg.text_allowance);

  std::ostringstream os;
  if (format == "csv") {
    os << sft::kSweepCsvHeader << '\n';
    for (std::size_t i = 0; i < reports.size(); ++i) os << sft::csv_row(configs[i], reports[i]) << '\n';
  } else if (format == "json") {
    sft::Json rows = sft::Json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) rows.push_back(sft::sweep_row_json(entries[i], reports[i]));
    os << rows.dump(2) << '\n';
  } else {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      os << (entries[i].label.empty() ? "row " + std::to_string(i) : entries[i].label) << ": "
         << reports[i].content_tokens() << " content tokens (" << reports[i].rounded_k << "K), "
         << reports[i].separator_tokens << " separators, "
         << (reports[i].fits_context ? "fits" : "overflows") << '\n';
    }
  }
  emit(opt, os.str());
  return kExitOk;
}

int run_arrange(const Options& opt) {
  const auto cfg = load(opt);
  if (format_or(opt, "text") != "text") {
    throw sft::ConfigError("arrange only writes the text token layout");
  }
  if (cfg.grid.rows < 1 || cfg.grid.cols < 1) throw sft::ConfigError("arrange needs a patch grid");
  sft::validate(cfg.pathway, cfg.grid);

  std::vector<sft::FrameGrid> frames;
  frames.reserve(static_cast<std::size_t>(cfg.pathway.n_total));
  for (std::int64_t f = 0; f < cfg.pathway.n_total; ++f) {
    frames.push_back(sft::synth_features(f, cfg.grid, cfg.channels));
  }
  const auto seq = sft::project(frames, cfg.pathway);
  std::ostringstream os;
  sft::write_layout(os, seq);
  emit(opt, os.str());
  return kExitOk;
}

int run_check(const Options& opt) {
  sft::selfcheck::Options copt;
  copt.seed = opt.seed;
  copt.trials = opt.trials;
  copt.color = color_enabled(opt);
  if (copt.trials < 1) throw sft::ConfigError("--trials must be positive");
  sft::selfcheck::Kernels kernels;
  if (!opt.perturb.empty()) kernels = sft::selfcheck::perturbed(kernels, opt.perturb);

  std::ostringstream os;
  const bool ok = sft::selfcheck::report(os, sft::selfcheck::run_checks(copt, kernels), copt.color);
  emit(opt, os.str());
  return ok ? kExitOk : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SlowFast video-token planner"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub, bool takes_config) {
    if (takes_config) {
      sub->add_option("config,--config", opt.config_path,
                      "Config file (bare names also search the bundled configs)");
      sub->add_option("--set", opt.overrides, "KEY=VALUE override (repeatable)");
    }
    sub->add_option("--format", opt.format, "json, csv or text");
    sub->add_option("--out", opt.out_path, "Output file (default: stdout)");
  };

  auto* plan = app.add_subcommand("plan", "Token budget for one configuration");
  add_common(plan, true);
  auto* sweep = app.add_subcommand("sweep", "Token budgets for every configuration in a sweep");
  add_common(sweep, true);
  auto* arrange = app.add_subcommand("arrange", "Write the token layout of one configuration");
  add_common(arrange, true);
  auto* check = app.add_subcommand("check", "Oracle-equivalence and golden-table self-check");
  add_common(check, false);
  check->add_option("--seed", opt.seed, "Random seed");
  check->add_option("--trials", opt.trials, "Random grids per kernel");
  check->add_option("--perturb", opt.perturb, "Perturb a kernel (fault injection)")
      ->check(CLI::IsMember(sft::selfcheck::kernel_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*plan) return run_plan(opt);
    if (*sweep) return run_sweep(opt);
    if (*arrange) return run_arrange(opt);
    return run_check(opt);
  } catch (const std::exception& e) {
    std::cerr << "sft: " << e.what() << '\n';
    return kExitConfig;
  }
}
