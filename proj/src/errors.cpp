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

#include "visdiag/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "visdiag/iou.hpp"

namespace visdiag {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kCls:
      return "Cls";
    case ErrorKind::kDup:
      return "Dup";
    case ErrorKind::kSpat:
      return "Spat";
    case ErrorKind::kTemp:
      return "Temp";
    case ErrorKind::kBoth:
      return "Both";
    case ErrorKind::kBkg:
      return "Bkg";
    case ErrorKind::kMiss:
      return "Miss";
  }
  throw std::invalid_argument("unknown error kind");
}

ErrorKind error_kind_from_string(const std::string& name) {
  for (ErrorKind k : kAllErrorKinds) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown error kind '" + name + "'");
}

std::array<int, kErrorKindCount> error_summary(
    const std::vector<ErrorRecord>& records) {
  std::array<int, kErrorKindCount> counts{};
  for (const auto& r : records) ++count_of(counts, r.kind);
  return counts;
}

nlohmann::json error_record_to_json(const ErrorRecord& r) {
  nlohmann::json o{{"kind", to_string(r.kind)},
                   {"video_id", r.video_id},
                   {"category_id", r.category_id},
                   {"pred_idx", r.pred_idx},
                   {"gt_idx", r.gt_idx},
                   {"gt_id", r.gt_id}};
  if (std::isfinite(r.score)) o["score"] = r.score;
  if (std::isfinite(r.iou_max)) o["iou_max"] = r.iou_max;
  if (std::isfinite(r.overlap_temp)) o["overlap_temp"] = r.overlap_temp;
  return o;
}

namespace {

struct BestGt {
  double iou = -1.0;
  int gt_idx = -1;
};

}  // namespace

ErrorAnalysis classify_errors(const EvalContext& ctx,
                              const DatasetView& view) {
  const Dataset& ds = ctx.dataset();
  const EvalConfig& cfg = ctx.config();
  ErrorAnalysis analysis;
  analysis.matching = evaluate_single(ctx, view, cfg.thr_f);

  std::unordered_set<int> covered;  // gt indices claimed by an error record

  for (const auto& cell : analysis.matching.cells) {
    for (const auto& det : cell.dets) {
      if (det.match_gt[0] != -1 || det.ignored[0]) continue;

      const TrackPrediction& pred = ds.predictions[det.pred_idx];
      int cat = cell.category_id;  // effective category under the view
      BestGt same, other;
      for (int g : ctx.video_gts(pred.video_id)) {
        if (view.gt_removed.count(g) || view.gt_is_ignored(ds, g)) continue;
        double iou = view.pair_iou(ctx, det.pred_idx, g);
        BestGt& slot = ds.gt_tracks[g].category_id == cat ? same : other;
        if (iou > slot.iou) {
          slot.iou = iou;
          slot.gt_idx = g;
        }
      }

      ErrorRecord rec;
      rec.video_id = pred.video_id;
      rec.category_id = cat;
      rec.pred_idx = det.pred_idx;
      rec.score = det.score;
      rec.overlap_temp = kNaN;
      if (other.gt_idx != -1 && other.iou >= cfg.thr_f) {
        rec.kind = ErrorKind::kCls;
        rec.iou_max = other.iou;
        rec.gt_idx = other.gt_idx;
      } else if (same.gt_idx != -1 && same.iou >= cfg.thr_b &&
                 same.iou < cfg.thr_f) {
        const auto& gt = ds.gt_tracks[same.gt_idx];
        double ot = temporal_overlap(pred.masks, gt.masks, cfg.thr_spat,
                                     cfg.union_mode);
        rec.kind = ot >= cfg.thr_temp ? ErrorKind::kSpat : ErrorKind::kTemp;
        rec.iou_max = same.iou;
        rec.overlap_temp = ot;
        rec.gt_idx = same.gt_idx;
      } else if (other.gt_idx != -1 && other.iou >= cfg.thr_b &&
                 other.iou < cfg.thr_f) {
        rec.kind = ErrorKind::kBoth;
        rec.iou_max = other.iou;
        rec.gt_idx = other.gt_idx;
      } else if (same.gt_idx != -1 && same.iou >= cfg.thr_f) {
        rec.kind = ErrorKind::kDup;
        rec.iou_max = same.iou;
        rec.gt_idx = same.gt_idx;
      } else if (std::max(same.iou, other.iou) < cfg.thr_b ||
                 (same.gt_idx == -1 && other.gt_idx == -1)) {
        rec.kind = ErrorKind::kBkg;
        rec.iou_max = std::max({same.iou, other.iou, 0.0});
        rec.gt_idx = -1;
      } else {
        throw std::logic_error("false positive fits no error kind");
      }
      if (rec.gt_idx != -1) {
        rec.gt_id = ds.gt_tracks[rec.gt_idx].id;
        if (rec.kind != ErrorKind::kDup) covered.insert(rec.gt_idx);
      }
      analysis.records.push_back(rec);
    }
  }

  for (const auto& cell : analysis.matching.cells) {
    for (const auto& gt : cell.gts) {
      if (gt.ignored || gt.match_pred[0] != -1) continue;
      if (covered.count(gt.gt_idx)) continue;
      ErrorRecord rec;
      rec.kind = ErrorKind::kMiss;
      rec.video_id = cell.video_id;
      rec.category_id = cell.category_id;
      rec.score = kNaN;
      rec.iou_max = kNaN;
      rec.overlap_temp = kNaN;
      rec.gt_idx = gt.gt_idx;
      rec.gt_id = ds.gt_tracks[gt.gt_idx].id;
      analysis.records.push_back(rec);
    }
  }

  analysis.counts = error_summary(analysis.records);
  return analysis;
}

}  // namespace visdiag
