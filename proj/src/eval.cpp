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

#include "visdiag/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "visdiag/iou.hpp"
#include "visdiag/parallel.hpp"

namespace visdiag {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

EvalContext::EvalContext(const Dataset& dataset, EvalConfig config,
                         int threads)
    : dataset_(&dataset), config_(std::move(config)) {
  config_.validate();
  videos_.resize(dataset.videos.size());
  for (std::size_t s = 0; s < dataset.videos.size(); ++s) {
    video_slot_[dataset.videos[s].id] = static_cast<int>(s);
  }
  for (std::size_t p = 0; p < dataset.predictions.size(); ++p) {
    auto it = video_slot_.find(dataset.predictions[p].video_id);
    if (it == video_slot_.end()) {
      throw std::invalid_argument("prediction references unknown video id " +
                                  std::to_string(dataset.predictions[p].video_id));
    }
    VideoCache& vc = videos_[it->second];
    vc.pred_local[static_cast<int>(p)] = static_cast<int>(vc.preds.size());
    vc.preds.push_back(static_cast<int>(p));
  }
  for (std::size_t g = 0; g < dataset.gt_tracks.size(); ++g) {
    auto it = video_slot_.find(dataset.gt_tracks[g].video_id);
    if (it == video_slot_.end()) {
      throw std::invalid_argument("ground truth references unknown video id " +
                                  std::to_string(dataset.gt_tracks[g].video_id));
    }
    VideoCache& vc = videos_[it->second];
    vc.gt_local[static_cast<int>(g)] = static_cast<int>(vc.gts.size());
    vc.gts.push_back(static_cast<int>(g));
  }
  // The all-pairs overlap matrices dominate the runtime; one video per task.
  parallel_for(videos_.size(), threads, [&](std::size_t s) {
    VideoCache& vc = videos_[s];
    vc.iou.assign(vc.preds.size() * vc.gts.size(), 0.0);
    for (std::size_t pl = 0; pl < vc.preds.size(); ++pl) {
      const TrackPrediction& pred = dataset_->predictions[vc.preds[pl]];
      for (std::size_t gl = 0; gl < vc.gts.size(); ++gl) {
        const InstanceTrack& gt = dataset_->gt_tracks[vc.gts[gl]];
        vc.iou[pl * vc.gts.size() + gl] =
            sequence_iou(pred.masks, gt.masks, gt.iscrowd);
      }
    }
  });
}

double EvalContext::pair_iou(int pred_idx, int gt_idx) const {
  const TrackPrediction& pred = dataset_->predictions[pred_idx];
  const InstanceTrack& gt = dataset_->gt_tracks[gt_idx];
  if (pred.video_id != gt.video_id) {
    throw std::invalid_argument("IoU requested across different videos");
  }
  const VideoCache& vc = videos_[video_slot_.at(pred.video_id)];
  int pl = vc.pred_local.at(pred_idx);
  int gl = vc.gt_local.at(gt_idx);
  return vc.iou[pl * vc.gts.size() + gl];
}

const std::vector<int>& EvalContext::video_preds(int video_id) const {
  return videos_[video_slot_.at(video_id)].preds;
}

const std::vector<int>& EvalContext::video_gts(int video_id) const {
  return videos_[video_slot_.at(video_id)].gts;
}

namespace {

// Greedy assignment for one cell at every threshold. Detections descend by
// score; each takes the highest-IoU ground truth still available at that
// threshold. Ignored ground truth sits at the back of the scan order and is
// only taken when nothing countable cleared the bar; region-style (crowd)
// ground truth may be taken repeatedly.
CellResult match_cell(const EvalContext& ctx, const DatasetView& view,
                      int video_id, int category_id, std::vector<int> det_idx,
                      const std::vector<int>& gt_idx,
                      const std::vector<double>& sweep, int max_dets) {
  const Dataset& ds = ctx.dataset();
  CellResult cell;
  cell.video_id = video_id;
  cell.category_id = category_id;

  std::stable_sort(det_idx.begin(), det_idx.end(), [&](int a, int b) {
    return ds.predictions[a].score > ds.predictions[b].score;
  });
  if (static_cast<int>(det_idx.size()) > max_dets) {
    det_idx.resize(max_dets);
  }

  cell.gts.reserve(gt_idx.size());
  for (int g : gt_idx) {
    GtRecord rec;
    rec.gt_idx = g;
    rec.ignored = view.gt_is_ignored(ds, g);
    rec.match_pred.assign(sweep.size(), -1);
    cell.gts.push_back(std::move(rec));
  }
  std::stable_sort(cell.gts.begin(), cell.gts.end(),
                   [](const GtRecord& a, const GtRecord& b) {
                     return a.ignored < b.ignored;
                   });

  cell.dets.reserve(det_idx.size());
  for (int d : det_idx) {
    DetRecord rec;
    rec.pred_idx = d;
    rec.score = ds.predictions[d].score;
    rec.match_gt.assign(sweep.size(), -1);
    rec.ignored.assign(sweep.size(), 0);
    cell.dets.push_back(std::move(rec));
  }

  for (std::size_t ti = 0; ti < sweep.size(); ++ti) {
    double floor = std::min(sweep[ti], 1.0 - 1e-10);
    for (auto& det : cell.dets) {
      int best = -1;
      double best_iou = floor;
      for (std::size_t gp = 0; gp < cell.gts.size(); ++gp) {
        const GtRecord& gt = cell.gts[gp];
        bool crowd = ds.gt_tracks[gt.gt_idx].iscrowd;
        if (gt.match_pred[ti] != -1 && !crowd) continue;
        // Ignored entries come last; once something countable is held,
        // switching to an ignored one could only hide a real match.
        if (best > -1 && !cell.gts[best].ignored && gt.ignored) break;
        double iou = view.pair_iou(ctx, det.pred_idx, gt.gt_idx);
        if (iou < best_iou) continue;
        best_iou = iou;
        best = static_cast<int>(gp);
      }
      if (best == -1) {
        if (view.pred_ignore_if_unmatched.count(det.pred_idx)) {
          det.ignored[ti] = 1;
        }
        continue;
      }
      det.match_gt[ti] = cell.gts[best].gt_idx;
      det.ignored[ti] = cell.gts[best].ignored ? 1 : 0;
      if (cell.gts[best].match_pred[ti] == -1) {
        cell.gts[best].match_pred[ti] = det.pred_idx;
      }
    }
  }
  return cell;
}

// 101-point interpolated average precision, as a fraction.
double interpolated_ap(const std::vector<double>& recall,
                       const std::vector<double>& precision) {
  std::vector<double> pr = precision;
  for (std::size_t i = pr.size(); i-- > 1;) {
    pr[i - 1] = std::max(pr[i - 1], pr[i]);
  }
  double total = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double thr = i == 100 ? 1.0 : 0.01 * i;
    auto it = std::lower_bound(recall.begin(), recall.end(), thr);
    if (it != recall.end()) {
      total += pr[static_cast<std::size_t>(it - recall.begin())];
    }
  }
  return total / 101.0;
}

struct FlatDet {
  double score;
  bool matched;
  bool ignored;
};

// Score-descending merge of the per-cell detections of one category, taking
// at most `cap` per cell. Cell order (video input order) breaks score ties.
std::vector<FlatDet> flatten_category(const std::vector<CellResult>& cells,
                                      int category_id, std::size_t ti,
                                      int cap) {
  std::vector<FlatDet> flat;
  for (const auto& cell : cells) {
    if (cell.category_id != category_id) continue;
    int taken = 0;
    for (const auto& det : cell.dets) {
      if (taken++ >= cap) break;
      flat.push_back({det.score, det.match_gt[ti] != -1,
                      det.ignored[ti] != 0});
    }
  }
  std::stable_sort(flat.begin(), flat.end(),
                   [](const FlatDet& a, const FlatDet& b) {
                     return a.score > b.score;
                   });
  return flat;
}

double mean_ignoring_nan(const std::vector<double>& v) {
  double total = 0.0;
  int n = 0;
  for (double x : v) {
    if (!std::isnan(x)) {
      total += x;
      ++n;
    }
  }
  return n == 0 ? kNaN : total / n;
}

EvalResult evaluate_with_sweep(const EvalContext& ctx, const DatasetView& view,
                               const std::vector<double>& sweep) {
  const Dataset& ds = ctx.dataset();
  const EvalConfig& cfg = ctx.config();
  EvalResult result;
  result.iou_sweep = sweep;

  // Bucket live predictions and ground truth into (video, category) cells.
  std::vector<std::map<int, std::vector<int>>> video_dets(ds.videos.size());
  std::vector<std::map<int, std::vector<int>>> video_gts(ds.videos.size());
  std::map<int, int> video_slot;
  for (std::size_t s = 0; s < ds.videos.size(); ++s) {
    video_slot[ds.videos[s].id] = static_cast<int>(s);
  }
  for (std::size_t p = 0; p < ds.predictions.size(); ++p) {
    if (view.pred_removed.count(static_cast<int>(p))) continue;
    int cat = view.effective_category(ds, static_cast<int>(p));
    video_dets[video_slot.at(ds.predictions[p].video_id)][cat].push_back(
        static_cast<int>(p));
  }
  for (std::size_t g = 0; g < ds.gt_tracks.size(); ++g) {
    if (view.gt_removed.count(static_cast<int>(g))) continue;
    video_gts[video_slot.at(ds.gt_tracks[g].video_id)][ds.gt_tracks[g]
                                                           .category_id]
        .push_back(static_cast<int>(g));
  }

  for (std::size_t s = 0; s < ds.videos.size(); ++s) {
    std::vector<int> cats;
    for (const auto& [cat, _] : video_dets[s]) cats.push_back(cat);
    for (const auto& [cat, _] : video_gts[s]) {
      if (!video_dets[s].count(cat)) cats.push_back(cat);
    }
    std::sort(cats.begin(), cats.end());
    for (int cat : cats) {
      static const std::vector<int> kNone;
      const auto dit = video_dets[s].find(cat);
      const auto git = video_gts[s].find(cat);
      result.cells.push_back(match_cell(
          ctx, view, ds.videos[s].id, cat,
          dit != video_dets[s].end() ? dit->second : kNone,
          git != video_gts[s].end() ? git->second : kNone, sweep,
          cfg.max_dets));
    }
  }

  // Per-category accumulation.
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> ar1_per_cat, ar10_per_cat, armax_per_cat;
  for (const auto& [cat_id, _] : ds.categories) {
    CategoryEval ce;
    ce.category_id = cat_id;
    for (const auto& cell : result.cells) {
      if (cell.category_id != cat_id) continue;
      for (const auto& gt : cell.gts) ce.n_gt += gt.ignored ? 0 : 1;
    }
    ce.ap.assign(sweep.size(), kNaN);
    ce.max_recall.assign(sweep.size(), kNaN);
    if (ce.n_gt > 0) {
      for (std::size_t ti = 0; ti < sweep.size(); ++ti) {
        auto flat = flatten_category(result.cells, cat_id, ti, cfg.max_dets);
        std::vector<double> rc, pr;
        double tp = 0, fp = 0;
        for (const auto& det : flat) {
          if (det.ignored) continue;
          (det.matched ? tp : fp) += 1;
          rc.push_back(tp / ce.n_gt);
          pr.push_back(tp / (tp + fp + eps));
        }
        ce.ap[ti] = 100.0 * interpolated_ap(rc, pr);
        ce.max_recall[ti] = rc.empty() ? 0.0 : rc.back();
      }
      auto capped_recall = [&](int cap) {
        double sum = 0.0;
        for (std::size_t ti = 0; ti < sweep.size(); ++ti) {
          double tp = 0;
          for (const auto& cell : result.cells) {
            if (cell.category_id != cat_id) continue;
            int taken = 0;
            for (const auto& det : cell.dets) {
              if (taken++ >= cap) break;
              if (det.match_gt[ti] != -1 && !det.ignored[ti]) tp += 1;
            }
          }
          sum += tp / ce.n_gt;
        }
        return 100.0 * sum / sweep.size();
      };
      ar1_per_cat.push_back(capped_recall(1));
      ar10_per_cat.push_back(capped_recall(10));
      armax_per_cat.push_back(capped_recall(cfg.max_dets));
    }
    result.n_gt += ce.n_gt;
    result.per_category.push_back(std::move(ce));
  }

  result.map_per_iou.assign(sweep.size(), kNaN);
  for (std::size_t ti = 0; ti < sweep.size(); ++ti) {
    std::vector<double> aps;
    for (const auto& ce : result.per_category) aps.push_back(ce.ap[ti]);
    result.map_per_iou[ti] = mean_ignoring_nan(aps);
  }
  result.map = mean_ignoring_nan(result.map_per_iou);
  result.ap50 = result.ap_at(0.5);
  result.ap75 = result.ap_at(0.75);
  result.ar1 = mean_ignoring_nan(ar1_per_cat);
  result.ar10 = mean_ignoring_nan(ar10_per_cat);
  result.ar_max = mean_ignoring_nan(armax_per_cat);
  return result;
}

}  // namespace

double EvalResult::ap_at(double threshold) const {
  for (std::size_t ti = 0; ti < iou_sweep.size(); ++ti) {
    if (std::abs(iou_sweep[ti] - threshold) < 1e-9) {
      return map_per_iou[ti];
    }
  }
  return kNaN;
}

EvalResult evaluate(const EvalContext& ctx, const DatasetView& view) {
  return evaluate_with_sweep(ctx, view, ctx.config().iou_sweep);
}

EvalResult evaluate_single(const EvalContext& ctx, const DatasetView& view,
                           double threshold) {
  return evaluate_with_sweep(ctx, view, {threshold});
}

double ap_at_threshold(const EvalContext& ctx, const DatasetView& view,
                       double threshold) {
  return evaluate_single(ctx, view, threshold).map_per_iou[0];
}

}  // namespace visdiag
