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

#include "visdiag/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "visdiag/parallel.hpp"

namespace visdiag {

namespace {

// Ground truth claimed by a true positive in the thr_f matching.
std::unordered_set<int> matched_gts(const EvalResult& matching) {
  std::unordered_set<int> matched;
  for (const auto& cell : matching.cells) {
    for (const auto& gt : cell.gts) {
      if (gt.match_pred[0] != -1) matched.insert(gt.gt_idx);
    }
  }
  return matched;
}

void fix_one(const EvalContext& ctx, DatasetView& view,
             std::unordered_set<int>& claimed, const ErrorRecord& rec) {
  switch (rec.kind) {
    case ErrorKind::kCls:
      if (claimed.insert(rec.gt_idx).second) {
        view.pred_category[rec.pred_idx] =
            ctx.dataset().gt_tracks[rec.gt_idx].category_id;
      } else {
        view.pred_removed.insert(rec.pred_idx);
      }
      break;
    case ErrorKind::kSpat:
    case ErrorKind::kTemp:
      if (claimed.insert(rec.gt_idx).second) {
        view.iou_override[DatasetView::pair_key(rec.pred_idx, rec.gt_idx)] =
            1.0;
      } else {
        view.pred_removed.insert(rec.pred_idx);
      }
      break;
    case ErrorKind::kBoth:
    case ErrorKind::kDup:
    case ErrorKind::kBkg:
      view.pred_removed.insert(rec.pred_idx);
      break;
    case ErrorKind::kMiss:
      view.gt_removed.insert(rec.gt_idx);
      break;
  }
}

// Non-negative AP delta in percentage points.  The strict form (the thr_f
// pass) treats a genuinely negative delta as a logic error; sweep rows
// measure thr_f-chosen fixes at other thresholds where a negative gain is
// legitimate, and clamp silently.
double clamped_delta(double delta, ErrorKind kind, bool strict) {
  if (std::isnan(delta)) return std::numeric_limits<double>::quiet_NaN();
  if (strict && delta < -1e-9) {
    throw std::logic_error("fixing " + to_string(kind) +
                           " errors lowered AP by " + std::to_string(-delta));
  }
  return std::max(delta, 0.0);
}

}  // namespace

DatasetView apply_fix(const EvalContext& ctx, const DatasetView& base,
                      const ErrorAnalysis& analysis, ErrorKind kind) {
  DatasetView view = base;
  std::unordered_set<int> claimed = matched_gts(analysis.matching);
  for (const auto& rec : analysis.records) {
    if (rec.kind == kind) fix_one(ctx, view, claimed, rec);
  }
  return view;
}

DatasetView apply_all_fixes(const EvalContext& ctx, const DatasetView& base,
                            const ErrorAnalysis& analysis) {
  DatasetView view = base;
  std::unordered_set<int> claimed = matched_gts(analysis.matching);
  const ErrorKind order[] = {ErrorKind::kCls,  ErrorKind::kSpat,
                             ErrorKind::kTemp, ErrorKind::kBoth,
                             ErrorKind::kDup,  ErrorKind::kBkg,
                             ErrorKind::kMiss};
  for (ErrorKind kind : order) {
    for (const auto& rec : analysis.records) {
      if (rec.kind == kind) fix_one(ctx, view, claimed, rec);
    }
  }
  return view;
}

double error_weight(const EvalContext& ctx, const DatasetView& base,
                    const ErrorAnalysis& analysis, ErrorKind kind,
                    double base_ap) {
  double fixed_ap = ap_at_threshold(
      ctx, apply_fix(ctx, base, analysis, kind), ctx.config().thr_f);
  return clamped_delta(fixed_ap - base_ap, kind, /*strict=*/true);
}

WeightReport compute_weight_report(const EvalContext& ctx,
                                   const DatasetView& base,
                                   const ErrorAnalysis& analysis,
                                   int threads) {
  WeightReport report;
  report.threshold = ctx.config().thr_f;
  report.base_ap = ap_at_threshold(ctx, base, report.threshold);
  // The seven counterfactual evaluations are independent; results land in
  // per-kind slots so scheduling cannot reorder them.  The fixed views are
  // kept so an enabled sweep re-scores them instead of rebuilding.
  std::vector<DatasetView> fixed(kAllErrorKinds.size());
  parallel_for(kAllErrorKinds.size(), threads, [&](std::size_t i) {
    fixed[i] = apply_fix(ctx, base, analysis, kAllErrorKinds[i]);
    report.weights[i] = clamped_delta(
        ap_at_threshold(ctx, fixed[i], report.threshold) - report.base_ap,
        kAllErrorKinds[i], /*strict=*/true);
  });
  DatasetView all_fixed = apply_all_fixes(ctx, base, analysis);
  report.fix_all_ap = ap_at_threshold(ctx, all_fixed, report.threshold);
  if (ctx.config().weight_full_sweep) {
    const std::vector<double>& thresholds = ctx.config().iou_sweep;
    report.sweep.resize(thresholds.size());
    parallel_for(thresholds.size(), threads, [&](std::size_t t) {
      WeightSweepRow& row = report.sweep[t];
      row.threshold = thresholds[t];
      row.base_ap = ap_at_threshold(ctx, base, row.threshold);
      for (std::size_t i = 0; i < kAllErrorKinds.size(); ++i) {
        row.weights[i] = clamped_delta(
            ap_at_threshold(ctx, fixed[i], row.threshold) - row.base_ap,
            kAllErrorKinds[i], /*strict=*/false);
      }
      row.fix_all_ap = ap_at_threshold(ctx, all_fixed, row.threshold);
    });
  }
  return report;
}

}  // namespace visdiag
