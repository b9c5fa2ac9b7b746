#pragma once

// Serialisation of budget reports: JSON objects, the sweep CSV table, and a
// short human-readable text form.

#include <ostream>
#include <string>
#include <vector>

#include "sft/budget.hpp"
#include "sft/config.hpp"

namespace sft {

inline constexpr const char* kSweepCsvHeader =
    "n_slow,n_fast,n_total,arrangement,content_tokens,separators,rounded_k,fits_context";

inline Json to_json(const BudgetReport& r) {
  Json j;
  j["slow_tokens"] = r.slow_tokens;
  j["fast_tokens"] = r.fast_tokens;
  j["separator_tokens"] = r.separator_tokens;
  j["low_res_tokens"] = r.low_res_tokens;
  j["high_res_tokens"] = r.high_res_tokens;
  j["total_tokens"] = r.total_tokens;
  j["content_tokens"] = r.content_tokens();
  j["rounded_k"] = r.rounded_k;
  j["fits_context"] = r.fits_context;
  j["text_allowance"] = r.text_allowance;
  j["context_length"] = r.context_length;
  return j;
}

inline Json to_json(const PathwayConfig& cfg) {
  Json j;
  j["n_slow"] = cfg.n_slow;
  j["n_fast"] = cfg.n_fast();
  j["n_total"] = cfg.n_total;
  j["stride_h"] = cfg.stride_h;
  j["stride_w"] = cfg.stride_w;
  j["fast_rows"] = cfg.fast_rows;
  j["fast_cols"] = cfg.fast_cols;
  j["arrangement"] = to_string(cfg.arrangement);
  return j;
}

inline Json sweep_row_json(const SweepEntry& e, const BudgetReport& r) {
  Json j;
  if (!e.label.empty()) j["label"] = e.label;
  j["config"] = to_json(e.pathway);
  j["report"] = to_json(r);
  return j;
}

inline std::string csv_row(const PathwayConfig& cfg, const BudgetReport& r) {
  return std::to_string(cfg.n_slow) + "," + std::to_string(cfg.n_fast()) + "," +
         std::to_string(cfg.n_total) + "," + to_string(cfg.arrangement) + "," +
         std::to_string(r.content_tokens()) + "," + std::to_string(r.separator_tokens) + "," +
         std::to_string(r.rounded_k) + "," + (r.fits_context ? "true" : "false");
}

inline void write_text(std::ostream& os, const BudgetReport& r) {
  if (r.low_res_tokens != 0 || r.high_res_tokens != 0) {
    os << "image tokens   " << r.low_res_tokens << " low-res + " << r.high_res_tokens
       << " high-res\n";
  } else {
    os << "slow tokens    " << r.slow_tokens << "\n"
       << "fast tokens    " << r.fast_tokens << "\n"
       << "separators     " << r.separator_tokens << "\n";
  }
  os << "content tokens " << r.content_tokens() << " (" << r.rounded_k << "K)\n"
     << "total tokens   " << r.total_tokens << "\n"
     << "context        " << r.total_tokens << " + " << r.text_allowance << " text of "
     << r.context_length << (r.fits_context ? " fits" : " OVERFLOWS") << "\n";
}

}  // namespace sft
