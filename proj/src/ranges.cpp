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

#include "visdiag/ranges.hpp"

#include <limits>

namespace visdiag {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

DatasetView range_view(const EvalContext& ctx, const DatasetView& base,
                       int bin) {
  const Dataset& ds = ctx.dataset();
  const EvalConfig& cfg = ctx.config();
  DatasetView view = base;
  for (std::size_t g = 0; g < ds.gt_tracks.size(); ++g) {
    if (view.gt_removed.count(static_cast<int>(g))) continue;
    int len = temporal_length(ds.gt_tracks[g], cfg.length_mode);
    if (len < 1) continue;  // nowhere visible: length is undefined
    if (cfg.range_bins.bin_of(len) != bin) {
      view.gt_ignored.insert(static_cast<int>(g));
    }
  }
  for (std::size_t p = 0; p < ds.predictions.size(); ++p) {
    if (view.pred_removed.count(static_cast<int>(p))) continue;
    int len = temporal_length(ds.predictions[p], cfg.length_mode);
    if (len < 1) continue;
    if (cfg.range_bins.bin_of(len) != bin) {
      view.pred_ignore_if_unmatched.insert(static_cast<int>(p));
    }
  }
  return view;
}

RangeReport range_report(const EvalContext& ctx, const DatasetView& base,
                         int threads) {
  const Dataset& ds = ctx.dataset();
  const EvalConfig& cfg = ctx.config();
  RangeReport report;
  report.global = evaluate(ctx, base);
  report.global_errors = classify_errors(ctx, base);
  report.global_weights =
      compute_weight_report(ctx, base, report.global_errors, threads);

  for (int bin = 0; bin < cfg.range_bins.bin_count(); ++bin) {
    BinMetrics bm;
    bm.label = cfg.range_bins.label(bin);
    bm.lo = cfg.range_bins.lower(bin);
    bm.hi = cfg.range_bins.upper(bin);

    DatasetView view = range_view(ctx, base, bin);
    for (std::size_t p = 0; p < ds.predictions.size(); ++p) {
      if (view.pred_removed.count(static_cast<int>(p))) continue;
      int len = temporal_length(ds.predictions[p], cfg.length_mode);
      if (len >= 1 && cfg.range_bins.bin_of(len) == bin) ++bm.n_pred;
    }

    EvalResult eval = evaluate(ctx, view);
    bm.n_gt = eval.n_gt;
    bm.applicable = bm.n_gt > 0;
    if (bm.applicable) {
      bm.map = eval.map;
      bm.per_category = std::move(eval.per_category);
      ErrorAnalysis errors = classify_errors(ctx, view);
      bm.error_counts = errors.counts;
      bm.weights = compute_weight_report(ctx, view, errors, threads);
      bm.ap50 = bm.weights.base_ap;
    } else {
      bm.map = kNaN;
      bm.ap50 = kNaN;
      bm.weights.threshold = cfg.thr_f;
      bm.weights.base_ap = kNaN;
      bm.weights.fix_all_ap = kNaN;
      bm.weights.weights.fill(kNaN);
    }
    report.bins.push_back(std::move(bm));
  }
  return report;
}

}  // namespace visdiag
