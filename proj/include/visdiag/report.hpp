// Copyright 2026 The visdiag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "visdiag/ranges.hpp"

namespace visdiag {

inline constexpr char kToolName[] = "visdiag";
inline constexpr char kToolVersion[] = "0.1.0";

/// Identifies a run: tool version, the full config snapshot, and input file
/// digests.  Runs with equal manifests produce byte-identical reports, so
/// wall times are carried for the status line but never serialized, and the
/// worker count is likewise excluded (it must not change any output).
struct RunManifest {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  EvalConfig config;
  std::string gt_path;  // as given on the command line
  std::string gt_sha256;
  std::string pred_path;
  std::string pred_sha256;
  std::map<std::string, double> timings_ms;  // display only
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Digests both inputs and snapshots the config.
RunManifest make_manifest(const EvalConfig& cfg,
                          const std::filesystem::path& gt_path,
                          const std::filesystem::path& pred_path);

nlohmann::json manifest_to_json(const RunManifest& manifest);

/// Everything an evaluation run produces, bundled for the writers.  The
/// range report also carries the unfiltered (global) evaluation, taxonomy
/// and weights.
struct ReportBundle {
  RunManifest manifest;
  const Dataset& dataset;    // for category names and input tallies
  const RangeReport& report;
};

/// Headline metrics, per-category AP, error decomposition and range bins in
/// one document; every number the terminal table prints appears here.
nlohmann::json summary_to_json(const ReportBundle& bundle);
/// {threshold, base_ap50, weights{kind}, fix_all_ap50, counts{kind}}.
nlohmann::json weights_to_json(const ReportBundle& bundle);
/// {bins:[{label,lo,hi,n_gt,...,weights}], global:{...}}.
nlohmann::json ranges_to_json(const ReportBundle& bundle);
/// One compact JSON object per error record, newline separated.
std::string errors_to_jsonl(const ReportBundle& bundle);
/// Wide format, one row per (category, bin); the ALL row of each bin also
/// carries the bin's weights and counts.  Metrics in percent, 2 decimals.
std::string report_to_csv(const ReportBundle& bundle);
/// Human-readable digest of the same numbers.
std::string terminal_table(const ReportBundle& bundle);

struct ChartOptions {
  std::string title;
  std::string timestamp;  // embedded as an SVG comment when non-empty
};

/// Bar chart of the seven per-kind weights, value labels at 2 decimals.
/// Self-contained SVG, generic fonts only.  Weights must be finite.
std::string render_error_chart(const WeightReport& weights,
                               const ChartOptions& opts = {});
/// Grouped bars: one cluster of seven per temporal-length bin.  Bins
/// without ground truth render as an empty cluster marked "n/a".
std::string render_range_chart(const RangeReport& report,
                               const ChartOptions& opts = {});

struct WriteOptions {
  bool json = true;  // summary.json, errors.jsonl, weights.json, ranges.json
  bool csv = true;   // report.csv
  bool svg = true;   // error_weights.svg, range_weights.svg
  bool deterministic = false;  // suppress the figure timestamp
};

/// Writes the enabled artifacts into `out_dir` (created if missing) and
/// returns the file names in emission order.
std::vector<std::string> write_reports(const ReportBundle& bundle,
                                       const std::filesystem::path& out_dir,
                                       const WriteOptions& opts = {});

}  // namespace visdiag
