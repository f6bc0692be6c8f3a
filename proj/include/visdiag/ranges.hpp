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

#include <string>
#include <vector>

#include "visdiag/errors.hpp"
#include "visdiag/eval.hpp"
#include "visdiag/weights.hpp"

namespace visdiag {

/// Metrics restricted to instances of one temporal-length bin.
struct BinMetrics {
  std::string label;
  int lo = 1;       // inclusive, frames
  int hi = 0;       // exclusive; INT_MAX marks the open-ended bin
  int n_gt = 0;     // countable (unignored) ground truth inside the bin
  int n_pred = 0;   // predictions whose own length lies inside the bin
  bool applicable = false;  // false when the bin holds no ground truth
  double map = 0.0;         // percent; NaN when not applicable
  double ap50 = 0.0;        // percent at thr_f; NaN when not applicable
  std::array<int, kErrorKindCount> error_counts{};
  WeightReport weights;  // all-NaN APs when not applicable
  std::vector<CategoryEval> per_category;  // empty when not applicable
};

struct RangeReport {
  std::vector<BinMetrics> bins;
  EvalResult global;
  ErrorAnalysis global_errors;
  WeightReport global_weights;
};

/// Restricts evaluation to one temporal-length bin on top of `base`:
/// out-of-bin ground truth becomes ignored (absorbs matches, counts for
/// nothing) and out-of-bin predictions drop from the ranking unless they
/// match in-bin ground truth. Tracks visible nowhere are left untouched.
DatasetView range_view(const EvalContext& ctx, const DatasetView& base,
                       int bin);

/// Per-bin mAP, taxonomy counts and fix weights, plus the unfiltered
/// metrics. A bin without ground truth is reported not-applicable.
RangeReport range_report(const EvalContext& ctx, const DatasetView& base = {},
                         int threads = 0);

}  // namespace visdiag
