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
#include <vector>

#include "visdiag/errors.hpp"
#include "visdiag/eval.hpp"

namespace visdiag {

/// One row of the optional threshold sweep: the same counterfactual fixes,
/// re-scored at another sweep IoU.  The fix set stays the one chosen at
/// thr_f, so an off-threshold delta can legitimately come out negative (a
/// relabeled detection may land as a false positive in its new category);
/// those clamp to zero without the logic-error guard below.
struct WeightSweepRow {
  double threshold = 0.0;
  double base_ap = 0.0;  // percent
  std::array<double, kErrorKindCount> weights{};
  double fix_all_ap = 0.0;  // percent; reaches 100 only at thr_f

  double weight(ErrorKind k) const { return weights[static_cast<int>(k)]; }
};

/// Each kind's weight is the AP gain (at thr_f, percent) from hypothetically
/// fixing all errors of that kind alone; fixes are independent, never
/// cumulative, so the weights are order-free by construction.
struct WeightReport {
  double threshold = 0.5;  // the thr_f the APs below are measured at
  double base_ap = 0.0;    // percent
  std::array<double, kErrorKindCount> weights{};
  double fix_all_ap = 0.0;  // percent, after fixing every kind cumulatively
  /// One row per iou_sweep value when EvalConfig::weight_full_sweep is set;
  /// empty otherwise.
  std::vector<WeightSweepRow> sweep;

  double weight(ErrorKind k) const { return weights[static_cast<int>(k)]; }
};

/// The counterfactual view for fixing one kind on top of `base`:
///   Cls        — reassign each offender to its target GT's category, or
///                delete it when that GT is already matched
///   Spat/Temp  — force the offender's IoU with its target GT to 1.0, or
///                delete it when that GT is already matched
///   Both/Dup/Bkg — delete the offender
///   Miss       — drop the missed GT from the ground truth
/// Kinds with zero records return `base` unchanged.
DatasetView apply_fix(const EvalContext& ctx, const DatasetView& base,
                      const ErrorAnalysis& analysis, ErrorKind kind);

/// All fixes at once, in the documented order Cls, Spat, Temp, then the
/// deletions, then Miss removals. A GT may be claimed by at most one
/// surviving offender; later records targeting a claimed GT are deleted.
DatasetView apply_all_fixes(const EvalContext& ctx, const DatasetView& base,
                            const ErrorAnalysis& analysis);

/// AP(fixed) - AP(base) at thr_f, in percentage points. Clamped to zero
/// within 1e-9; a genuinely negative delta throws std::logic_error.
double error_weight(const EvalContext& ctx, const DatasetView& base,
                    const ErrorAnalysis& analysis, ErrorKind kind,
                    double base_ap);

WeightReport compute_weight_report(const EvalContext& ctx,
                                   const DatasetView& base,
                                   const ErrorAnalysis& analysis,
                                   int threads = 0);

}  // namespace visdiag
