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

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "visdiag/eval.hpp"

namespace visdiag {

/// The seven mutually exclusive mis-prediction kinds.
///
///   Cls  — right place, wrong class (IoU with a different-class GT >= thr_f)
///   Dup  — extra detection on a GT already claimed by a better one
///   Spat — right class, poor pixels, but tracking holds up
///   Temp — right class, association broken across frames
///   Both — wrong class and poor localization at once
///   Bkg  — hallucination overlapping nothing
///   Miss — GT no prediction accounts for
enum class ErrorKind { kCls = 0, kDup, kSpat, kTemp, kBoth, kBkg, kMiss };

inline constexpr int kErrorKindCount = 7;
inline constexpr std::array<ErrorKind, kErrorKindCount> kAllErrorKinds = {
    ErrorKind::kCls,  ErrorKind::kDup, ErrorKind::kSpat, ErrorKind::kTemp,
    ErrorKind::kBoth, ErrorKind::kBkg, ErrorKind::kMiss};

std::string to_string(ErrorKind kind);
ErrorKind error_kind_from_string(const std::string& name);

struct ErrorRecord {
  ErrorKind kind = ErrorKind::kBkg;
  int video_id = 0;
  int category_id = 0;  // prediction's (effective) category; GT's for Miss
  int pred_idx = -1;    // vector index into Dataset::predictions; -1 for Miss
  double score = 0.0;   // NaN for Miss
  /// Best sequence IoU backing the decision: same-class max for
  /// Dup/Spat/Temp, different-class max for Cls/Both, overall max for Bkg.
  double iou_max = 0.0;  // NaN for Miss
  /// Tracking-quality ratio against the target GT; set for Spat/Temp only.
  double overlap_temp = 0.0;  // NaN elsewhere
  int gt_idx = -1;  // vector index into Dataset::gt_tracks; -1 for Bkg
  int gt_id = -1;   // annotation id; -1 for Bkg
};

struct ErrorAnalysis {
  std::vector<ErrorRecord> records;  // deterministic order
  std::array<int, kErrorKindCount> counts{};
  /// The single-threshold matching (at thr_f) the records were derived from.
  EvalResult matching;
};

inline int& count_of(std::array<int, kErrorKindCount>& counts, ErrorKind k) {
  return counts[static_cast<int>(k)];
}
inline int count_of(const std::array<int, kErrorKindCount>& counts,
                    ErrorKind k) {
  return counts[static_cast<int>(k)];
}

/// Partitions every counted false positive of the thr_f matching into one of
/// {Cls, Dup, Spat, Temp, Both, Bkg}, then issues Miss for every unignored
/// unmatched GT that no Cls/Spat/Temp/Both record covers.
ErrorAnalysis classify_errors(const EvalContext& ctx,
                              const DatasetView& view = {});

std::array<int, kErrorKindCount> error_summary(
    const std::vector<ErrorRecord>& records);

/// One record as a JSON object; NaN-valued fields are omitted.
nlohmann::json error_record_to_json(const ErrorRecord& record);

}  // namespace visdiag
