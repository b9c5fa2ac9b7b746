#pragma once

// Flat JSON configuration documents. Keys mirror the StageConfig and
// PathwayConfig field names; a few extra keys pick the frame grid and the
// sweep rows. `--set key=value` overrides are applied to the top-level object
// before anything is resolved.
//
//   stage                     "I" or "II"; selects the defaults everything else overrides
//   context_length, max_image_area, min_image_area, base_image_side,
//   video_min_area, video_max_area, max_frames, patch
//   n_total, n_slow, n_fast, stride_h, stride_w, fast_rows, fast_cols, arrangement
//   frame_height, frame_width  frame resolution planned into the patch grid
//   grid_rows, grid_cols       patch grid given directly
//   image_height, image_width  makes `plan` report an image budget instead
//   text_allowance, channels, label, description
//   sweep                      array of objects carrying pathway keys (+ label)
//   ranges                     object of pathway key -> [values] or {from, to, step}

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sft/budget.hpp"
#include "sft/error.hpp"
#include "sft/geometry.hpp"
#include "sft/projector.hpp"

namespace sft {

using Json = nlohmann::ordered_json;

struct SweepEntry {
  std::string label;
  PathwayConfig pathway;
};

struct ResolvedConfig {
  StageConfig stage;
  PathwayConfig pathway;
  PatchGrid grid;
  std::optional<Resolution> image;
  std::int64_t text_allowance = kDefaultTextAllowance;
  std::int64_t channels = 1;
  std::string label;
  std::vector<SweepEntry> sweep;
};

namespace detail {

inline const std::set<std::string, std::less<>>& pathway_keys() {
  static const std::set<std::string, std::less<>> keys = {
      "n_total", "n_slow", "n_fast", "stride_h", "stride_w", "fast_rows", "fast_cols", "arrangement"};
  return keys;
}

inline const std::set<std::string, std::less<>>& top_level_keys() {
  static const std::set<std::string, std::less<>> keys = [] {
    std::set<std::string, std::less<>> k = {
        "stage",        "context_length", "max_image_area", "min_image_area", "base_image_side",
        "video_min_area", "video_max_area", "max_frames",   "patch",          "frame_height",
        "frame_width",  "grid_rows",      "grid_cols",      "image_height",   "image_width",
        "text_allowance", "channels",     "label",          "description",    "sweep",
        "ranges"};
    k.insert(pathway_keys().begin(), pathway_keys().end());
    return k;
  }();
  return keys;
}

inline std::int64_t get_int(const Json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (!v.is_number_integer()) {
    throw ConfigError("key '" + std::string(key) + "' must be an integer, got " + v.dump());
  }
  return v.get<std::int64_t>();
}

inline std::optional<std::int64_t> get_optional_int(const Json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (v.is_null()) return std::nullopt;
  return get_int(j, key);
}

inline std::string get_string(const Json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (!v.is_string()) throw ConfigError("key '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

/// Overlays pathway keys from `j` onto `cfg`; n_fast, when present, must
/// agree with what the arrangement implies.
inline void apply_pathway(const Json& j, PathwayConfig& cfg) {
  if (j.contains("n_total")) cfg.n_total = get_int(j, "n_total");
  if (j.contains("n_slow")) cfg.n_slow = get_int(j, "n_slow");
  if (j.contains("stride_h")) cfg.stride_h = get_int(j, "stride_h");
  if (j.contains("stride_w")) cfg.stride_w = get_int(j, "stride_w");
  if (j.contains("fast_rows")) cfg.fast_rows = get_int(j, "fast_rows");
  if (j.contains("fast_cols")) cfg.fast_cols = get_int(j, "fast_cols");
  if (j.contains("arrangement")) {
    try {
      cfg.arrangement = parse_arrangement(get_string(j, "arrangement"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("n_fast") && get_int(j, "n_fast") != cfg.n_fast()) {
    throw ConfigError("n_fast " + std::to_string(get_int(j, "n_fast")) + " contradicts " +
                      to_string(cfg.arrangement) + " with n_total " + std::to_string(cfg.n_total) +
                      " and n_slow " + std::to_string(cfg.n_slow) + " (implies " +
                      std::to_string(cfg.n_fast()) + ")");
  }
  try {
    validate(cfg);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

inline std::vector<std::int64_t> range_values(const std::string& key, const Json& spec) {
  std::vector<std::int64_t> values;
  if (spec.is_array()) {
    for (const auto& v : spec) {
      if (!v.is_number_integer()) throw ConfigError("range '" + key + "' must list integers");
      values.push_back(v.get<std::int64_t>());
    }
  } else if (spec.is_object()) {
    for (const auto& [k, v] : spec.items()) {
      if (k != "from" && k != "to" && k != "step") {
        throw ConfigError("range '" + key + "' has unknown field '" + k + "'");
      }
    }
    const auto from = get_int(spec, "from");
    const auto to = get_int(spec, "to");
    const auto step = spec.contains("step") ? get_int(spec, "step") : 1;
    if (step < 1 || to < from) {
      throw ConfigError("range '" + key + "' needs from <= to and step >= 1");
    }
    for (auto v = from; v <= to; v += step) values.push_back(v);
  } else {
    throw ConfigError("range '" + key + "' must be an array or {from, to, step}");
  }
  if (values.empty()) throw ConfigError("range '" + key + "' is empty");
  return values;
}

/// Cartesian product of the ranges in document order; the last key varies fastest.
inline std::vector<SweepEntry> expand_ranges(const Json& ranges, const Json& base,
                                             const PathwayConfig& defaults) {
  if (!ranges.is_object() || ranges.empty()) {
    throw ConfigError("'ranges' must be a non-empty object");
  }
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> axes;
  for (const auto& [k, v] : ranges.items()) {
    if (!pathway_keys().contains(k) || k == "arrangement") {
      throw ConfigError("'ranges' cannot vary '" + k + "'");
    }
    axes.emplace_back(k, range_values(k, v));
  }
  std::vector<SweepEntry> out;
  std::vector<std::size_t> pos(axes.size(), 0);
  while (true) {
    Json row = base;
    std::string label;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      row[axes[a].first] = axes[a].second[pos[a]];
      label += (a ? " " : "") + axes[a].first + "=" + std::to_string(axes[a].second[pos[a]]);
    }
    SweepEntry e{label, defaults};
    apply_pathway(row, e.pathway);
    out.push_back(std::move(e));

    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++pos[a] < axes[a].second.size()) break;
      pos[a] = 0;
      if (a == 0) return out;
    }
  }
}

}  // namespace detail

/// Parses `key=value`; the value is read as JSON when it parses, otherwise as a string.
inline void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not KEY=VALUE");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  auto parsed = Json::parse(raw, nullptr, false);
  doc[key] = parsed.is_discarded() ? Json(raw) : parsed;
}

inline ResolvedConfig resolve_config(const Json& doc) {
  using detail::get_int;
  using detail::get_optional_int;
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (!detail::top_level_keys().contains(k)) throw ConfigError("unknown config key '" + k + "'");
  }

  ResolvedConfig out;
  try {
    auto& st = out.stage;
    st = stage_two_defaults();
    if (doc.contains("stage")) {
      const auto& s = doc.at("stage");
      if (s == "I" || s == 1) {
        st = stage_one_defaults();
      } else if (!(s == "II" || s == 2)) {
        throw ConfigError("stage must be \"I\" or \"II\", got " + s.dump());
      }
    }
    if (doc.contains("context_length")) st.context_length = get_int(doc, "context_length");
    if (doc.contains("max_image_area")) st.max_image_area = get_int(doc, "max_image_area");
    if (doc.contains("min_image_area")) st.min_image_area = get_int(doc, "min_image_area");
    if (doc.contains("base_image_side")) st.base_image_side = get_int(doc, "base_image_side");
    if (doc.contains("video_min_area")) st.video_min_area = get_optional_int(doc, "video_min_area");
    if (doc.contains("video_max_area")) st.video_max_area = get_optional_int(doc, "video_max_area");
    if (doc.contains("max_frames")) st.max_frames = get_optional_int(doc, "max_frames");
    if (doc.contains("patch")) st.patch = get_int(doc, "patch");
    if (st.patch < 1) throw ConfigError("patch must be positive");

    const bool has_pathway = std::any_of(detail::pathway_keys().begin(), detail::pathway_keys().end(),
                                         [&](const std::string& k) { return doc.contains(k); });
    detail::apply_pathway(doc, out.pathway);
    if (has_pathway || st.stage == Stage::kII) {
      st.video_projector = out.pathway;
    }

    if (doc.contains("text_allowance")) out.text_allowance = get_int(doc, "text_allowance");
    if (out.text_allowance < 0) throw ConfigError("text_allowance must be non-negative");
    if (doc.contains("channels")) out.channels = get_int(doc, "channels");
    if (out.channels < 1) throw ConfigError("channels must be positive");
    if (doc.contains("label")) out.label = detail::get_string(doc, "label");

    if (doc.contains("grid_rows") || doc.contains("grid_cols")) {
      out.grid = {get_int(doc, "grid_rows"), get_int(doc, "grid_cols")};
      if (out.grid.rows < 1 || out.grid.cols < 1) throw ConfigError("grid must be at least 1x1");
    } else if (doc.contains("frame_height") || doc.contains("frame_width")) {
      const Resolution frame{get_int(doc, "frame_height"), get_int(doc, "frame_width")};
      out.grid = patch_grid(plan_resize(frame, st.video_thresholds(), st.patch));
    } else if (st.video_min_area && st.video_max_area) {
      out.grid = default_video_grid(st);
    }

    if (doc.contains("image_height") || doc.contains("image_width")) {
      out.image = Resolution{get_int(doc, "image_height"), get_int(doc, "image_width")};
    }

    if (doc.contains("sweep")) {
      const auto& rows = doc.at("sweep");
      if (!rows.is_array() || rows.empty()) throw ConfigError("'sweep' must be a non-empty array");
      for (const auto& row : rows) {
        if (!row.is_object()) throw ConfigError("sweep rows must be objects");
        for (const auto& [k, v] : row.items()) {
          if (!detail::pathway_keys().contains(k) && k != "label") {
            throw ConfigError("unknown sweep row key '" + k + "'");
          }
        }
        SweepEntry e{row.contains("label") ? detail::get_string(row, "label") : "", out.pathway};
        detail::apply_pathway(row, e.pathway);
        out.sweep.push_back(std::move(e));
      }
    }
    if (doc.contains("ranges")) {
      auto more = detail::expand_ranges(doc.at("ranges"), Json::object(), out.pathway);
      out.sweep.insert(out.sweep.end(), more.begin(), more.end());
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return out;
}

/// Directory of the bundled reference configs: $SFT_CONFIG_DIR, else the
/// install-time default compiled in as SFT_DEFAULT_CONFIG_DIR.
inline std::filesystem::path bundled_config_dir() {
  if (const char* env = std::getenv("SFT_CONFIG_DIR"); env != nullptr && *env != '\0') return env;
#ifdef SFT_DEFAULT_CONFIG_DIR
  return SFT_DEFAULT_CONFIG_DIR;
#else
  return "configs";
#endif
}

/// A path that exists is used as-is; a bare name falls back to the bundled configs.
inline std::filesystem::path locate_config(const std::filesystem::path& p) {
  if (std::filesystem::exists(p)) return p;
  if (p.parent_path().empty()) {
    auto bundled = bundled_config_dir() / p;
    if (std::filesystem::exists(bundled)) return bundled;
  }
  throw ConfigError("cannot open config file '" + p.string() + "'");
}

inline Json load_config_document(const std::filesystem::path& p) {
  const auto path = locate_config(p);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  auto doc = Json::parse(in, nullptr, false, /*ignore_comments=*/true);
  if (doc.is_discarded()) throw ConfigError("config file '" + path.string() + "' is not valid JSON");
  return doc;
}

}  // namespace sft
