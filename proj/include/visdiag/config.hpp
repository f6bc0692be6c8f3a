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

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace visdiag {

/// How an instance's temporal length is counted: frames where it is visible,
/// or the span first..last visible frame (differs for tracks with gaps).
enum class TemporalLengthMode { kVisible, kExtent };

/// Denominator of the temporal-overlap ratio: union of the two non-empty
/// frame sets, or union of the two contiguous first..last index ranges.
enum class TemporalUnionMode { kNonEmptySet, kExtentRange };

/// Temporal-length bins. `edges` holds the interior boundaries in frames;
/// bin i covers [edges[i-1], edges[i]) with 1 and +inf at the ends, so a
/// length equal to an edge falls into the upper bin. Empty edges = one bin.
struct RangeBins {
  std::vector<int> edges{16, 32};

  int bin_count() const { return static_cast<int>(edges.size()) + 1; }
  int lower(int bin) const { return bin == 0 ? 1 : edges[bin - 1]; }
  int upper(int bin) const {  // exclusive; INT_MAX for the last bin
    return bin == bin_count() - 1 ? std::numeric_limits<int>::max()
                                  : edges[bin];
  }
  std::string label(int bin) const;
  int bin_of(int temporal_length) const;
  void validate() const;
};

/// Every knob of the evaluation: matching thresholds, the error-taxonomy
/// thresholds, the IoU sweep, detection caps and temporal bins.
struct EvalConfig {
  double thr_f = 0.5;     // foreground sequence-IoU threshold
  double thr_b = 0.1;     // background sequence-IoU threshold
  double thr_spat = 0.1;  // per-frame IoU bar for a "matched" frame
  double thr_temp = 0.7;  // temporal-overlap bar splitting Spat from Temp
  std::vector<double> iou_sweep = default_iou_sweep();
  int max_dets = 100;  // top-scored predictions kept per video and category
  RangeBins range_bins;
  TemporalLengthMode length_mode = TemporalLengthMode::kVisible;
  TemporalUnionMode union_mode = TemporalUnionMode::kNonEmptySet;
  bool weight_full_sweep = false;  // also compute error weights at every sweep IoU

  static std::vector<double> default_iou_sweep() {
    return make_iou_sweep(0.5, 0.05, 0.95);
  }
  static std::vector<double> make_iou_sweep(double lo, double step, double hi);

  /// Parses the "lo:step:hi" CLI form.
  static std::vector<double> parse_iou_sweep(const std::string& text);

  void validate() const;  // throws std::invalid_argument on bad thresholds
};

std::string to_string(TemporalLengthMode mode);
std::string to_string(TemporalUnionMode mode);

}  // namespace visdiag
