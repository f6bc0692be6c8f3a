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

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "visdiag/config.hpp"
#include "visdiag/dataset.hpp"

namespace visdiag {

/// Precomputed sequence-IoU values for every prediction x ground-truth pair
/// that shares a video. Built once (in parallel) and shared by the base
/// evaluation and every counterfactual re-evaluation.
class EvalContext {
 public:
  EvalContext(const Dataset& dataset, EvalConfig config, int threads = 0);

  const Dataset& dataset() const { return *dataset_; }
  const EvalConfig& config() const { return config_; }

  /// Cached sequence IoU between predictions[pred_idx] and gt_tracks[gt_idx]
  /// (vector indices). Crowd ground truth uses intersection over prediction
  /// area. Throws std::invalid_argument if the two live in different videos.
  double pair_iou(int pred_idx, int gt_idx) const;

  /// Vector indices of the predictions / ground-truth tracks in a video.
  const std::vector<int>& video_preds(int video_id) const;
  const std::vector<int>& video_gts(int video_id) const;

 private:
  struct VideoCache {
    std::vector<int> preds;  // indices into dataset.predictions
    std::vector<int> gts;    // indices into dataset.gt_tracks
    std::unordered_map<int, int> pred_local;
    std::unordered_map<int, int> gt_local;
    std::vector<double> iou;  // [pred_local * gts.size() + gt_local]
  };

  const Dataset* dataset_;
  EvalConfig config_;
  std::vector<VideoCache> videos_;            // parallel to dataset.videos
  std::unordered_map<int, int> video_slot_;   // video id -> index in videos_
};

/// An overlay of counterfactual edits applied on top of the base dataset.
/// Evaluation always reads through a view; the base dataset is never copied
/// or mutated. All keys are vector indices into Dataset::predictions /
/// Dataset::gt_tracks.
struct DatasetView {
  std::unordered_set<int> pred_removed;
  std::unordered_map<int, int> pred_category;  // reassigned category id
  std::unordered_set<int> gt_removed;
  std::unordered_set<int> gt_ignored;
  /// Predictions that, if they end up unmatched, drop out of the ranking
  /// instead of counting as false positives (temporal-range filtering).
  std::unordered_set<int> pred_ignore_if_unmatched;
  /// Forced pair overlaps (oracle localization fixes).
  std::unordered_map<std::uint64_t, double> iou_override;

  static std::uint64_t pair_key(int pred_idx, int gt_idx) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(pred_idx))
            << 32) |
           static_cast<std::uint32_t>(gt_idx);
  }

  int effective_category(const Dataset& ds, int pred_idx) const {
    auto it = pred_category.find(pred_idx);
    return it != pred_category.end()
               ? it->second
               : ds.predictions[pred_idx].category_id;
  }

  /// Crowd regions are always ignored; the overlay can ignore more.
  bool gt_is_ignored(const Dataset& ds, int gt_idx) const {
    return ds.gt_tracks[gt_idx].iscrowd || gt_ignored.count(gt_idx) > 0;
  }

  double pair_iou(const EvalContext& ctx, int pred_idx, int gt_idx) const {
    if (!iou_override.empty()) {
      auto it = iou_override.find(pair_key(pred_idx, gt_idx));
      if (it != iou_override.end()) return it->second;
    }
    return ctx.pair_iou(pred_idx, gt_idx);
  }
};

/// Greedy matching outcome for one (video, category) pair, at every IoU
/// threshold of the sweep.
struct DetRecord {
  int pred_idx = -1;
  double score = 0.0;
  std::vector<int> match_gt;           // per threshold: gt index or -1
  std::vector<std::uint8_t> ignored;   // per threshold
};

struct GtRecord {
  int gt_idx = -1;
  bool ignored = false;
  std::vector<int> match_pred;  // per threshold: pred index or -1
};

struct CellResult {
  int video_id = 0;
  int category_id = 0;
  std::vector<DetRecord> dets;  // score-descending, truncated to max_dets
  std::vector<GtRecord> gts;    // unignored first, then ignored
};

/// Per-category precision-recall outcome across the sweep.
struct CategoryEval {
  int category_id = 0;
  int n_gt = 0;                    // unignored ground-truth tracks
  std::vector<double> ap;          // percent, per threshold; NaN if n_gt == 0
  std::vector<double> max_recall;  // fraction, per threshold; NaN if n_gt == 0
};

struct EvalResult {
  std::vector<double> iou_sweep;
  std::vector<CategoryEval> per_category;
  std::vector<CellResult> cells;

  double map = 0.0;                 // percent, averaged over sweep x categories
  std::vector<double> map_per_iou;  // percent, per threshold
  double ap50 = 0.0;                // percent; NaN when 0.5 not in the sweep
  double ap75 = 0.0;
  double ar1 = 0.0;  // percent, recall averaged over the sweep, capped dets
  double ar10 = 0.0;
  double ar_max = 0.0;  // at max_dets
  int n_gt = 0;         // total unignored ground-truth tracks

  /// AP (percent) at one sweep threshold; NaN when absent.
  double ap_at(double threshold) const;
};

/// Runs matching and precision-recall accumulation over the view.
EvalResult evaluate(const EvalContext& ctx, const DatasetView& view);

inline EvalResult evaluate(const EvalContext& ctx) {
  return evaluate(ctx, DatasetView{});
}

/// Full evaluation with a one-threshold sweep, regardless of the configured
/// sweep. The error taxonomy runs on this matching at thr_f.
EvalResult evaluate_single(const EvalContext& ctx, const DatasetView& view,
                           double threshold);

/// Mean AP (percent) at a single explicit threshold.
double ap_at_threshold(const EvalContext& ctx, const DatasetView& view,
                       double threshold);

}  // namespace visdiag
