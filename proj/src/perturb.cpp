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

#include "visdiag/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "visdiag/iou.hpp"
#include "visdiag/parallel.hpp"

namespace visdiag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxMorphSteps = 4096;
constexpr int kMaxBlobFrames = 3;

// Realization order; kinds with the tightest targeting constraints go first
// so they get first pick of the shuffled tracks.
constexpr std::array<ErrorKind, 5> kInjectOrder = {
    ErrorKind::kTemp, ErrorKind::kCls, ErrorKind::kSpat, ErrorKind::kDup,
    ErrorKind::kMiss};

// --- seeded randomness -----------------------------------------------------
//
// Every random decision draws from a generator seeded per entity (track or
// blob ordinal), never from a shared stream, so videos can be generated in
// parallel and the output is independent of scheduling and thread count.

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

enum : std::uint64_t { kSaltAssign = 1, kSaltTrack = 2, kSaltBlob = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt,
                         std::uint64_t idx) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(salt ^ splitmix64(idx))));
}

// In [0, 1); 53 explicit bits.  std::uniform_real_distribution is not
// guaranteed to draw the same sequence across library versions.
double unit(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

double draw_score(std::mt19937_64& g, const ScoreBand& b) {
  return b.lo + unit(g) * (b.hi - b.lo);
}

std::size_t bounded(std::mt19937_64& g, std::size_t n) { return g() % n; }

// --- morphology ------------------------------------------------------------

// 1D sliding window of width 2*rad+1 down each column.  Erosion keeps a
// pixel only when the whole window is foreground and inside the frame;
// dilation keeps it when any in-bounds pixel is foreground.
Bitmask pass_cols(const Bitmask& in, int rad, bool eroding) {
  Bitmask out{in.height, in.width,
              std::vector<std::uint8_t>(in.data.size(), 0)};
  const int h = in.height;
  for (int c = 0; c < in.width; ++c) {
    const std::uint8_t* src = in.data.data() + static_cast<std::size_t>(c) * h;
    std::uint8_t* dst = out.data.data() + static_cast<std::size_t>(c) * h;
    int run = 0;
    for (int i = 0; i < h + rad; ++i) {
      if (i < h && src[i]) ++run;
      int gone = i - 2 * rad - 1;
      if (gone >= 0 && src[gone]) --run;
      int center = i - rad;
      if (center < 0 || center >= h) continue;
      dst[center] = eroding ? (center - rad >= 0 && center + rad < h &&
                               run == 2 * rad + 1)
                            : run > 0;
    }
  }
  return out;
}

Bitmask pass_rows(const Bitmask& in, int rad, bool eroding) {
  Bitmask out{in.height, in.width,
              std::vector<std::uint8_t>(in.data.size(), 0)};
  const int w = in.width;
  for (int r = 0; r < in.height; ++r) {
    int run = 0;
    for (int i = 0; i < w + rad; ++i) {
      if (i < w && in.at(r, i)) ++run;
      int gone = i - 2 * rad - 1;
      if (gone >= 0 && in.at(r, gone)) --run;
      int center = i - rad;
      if (center < 0 || center >= w) continue;
      out.set(r, center, eroding ? (center - rad >= 0 && center + rad < w &&
                                    run == 2 * rad + 1)
                                 : run > 0);
    }
  }
  return out;
}

RleMask morph(const RleMask& mask, int radius, bool eroding) {
  if (radius < 0) throw std::invalid_argument("negative structuring radius");
  if (radius == 0 || is_empty(mask)) return mask;
  // A square element separates into a vertical and a horizontal segment.
  return encode(pass_rows(pass_cols(decode(mask), radius, eroding), radius,
                          eroding));
}

}  // namespace

RleMask erode(const RleMask& mask, int radius) {
  return morph(mask, radius, true);
}

RleMask dilate(const RleMask& mask, int radius) {
  return morph(mask, radius, false);
}

namespace {

// --- generation ------------------------------------------------------------

void set_extent(TrackPrediction& p) {
  p.first_frame = -1;
  p.last_frame = -1;
  p.visible_frames = 0;
  for (int t = 0; t < static_cast<int>(p.masks.size()); ++t) {
    if (is_empty(p.masks[t])) continue;
    if (p.first_frame < 0) p.first_frame = t;
    p.last_frame = t;
    ++p.visible_frames;
  }
}

std::uint64_t total_area(const std::vector<RleMask>& masks) {
  std::uint64_t a = 0;
  for (const auto& m : masks) a += area(m);
  return a;
}

struct SpatMasks {
  std::vector<RleMask> masks;
  double iou = 0.0;
  double overlap = 0.0;
};

struct TempMasks {
  std::vector<RleMask> masks;
  double iou = 0.0;
  double overlap = 0.0;
};

// Per-video scratch; merged in video order afterwards.
struct Draft {
  std::vector<TrackPrediction> preds;
  std::vector<ErrorRecord> census;
};

class Generator {
 public:
  Generator(const Dataset& gt, const PerturbSpec& spec, const EvalConfig& cfg)
      : ds_(gt), spec_(spec), cfg_(cfg) {
    for (const auto& [id, name] : ds_.categories) cat_ids_.push_back(id);
    gts_of_.resize(ds_.videos.size());
    for (std::size_t v = 0; v < ds_.videos.size(); ++v)
      video_pos_[ds_.videos[v].id] = static_cast<int>(v);
    for (std::size_t g = 0; g < ds_.gt_tracks.size(); ++g) {
      const auto& gt = ds_.gt_tracks[g];
      auto it = video_pos_.find(gt.video_id);
      if (it == video_pos_.end())
        throw PerturbError("ground-truth track " + std::to_string(gt.id) +
                           " references unknown video " +
                           std::to_string(gt.video_id));
      gts_of_[it->second].push_back(static_cast<int>(g));
      if (!gt.iscrowd && gt.visible_frames == 0)
        throw PerturbError("ground-truth track " + std::to_string(gt.id) +
                           " has no visible frames; validate the dataset "
                           "first");
      if (!gt.iscrowd && gt.visible_frames > 0)
        eligible_.push_back(static_cast<int>(g));
    }
    plans_.resize(ds_.gt_tracks.size());
  }

  PerturbResult run(int threads) {
    validate_spec();
    assign_targets();
    assign_blobs();

    std::vector<Draft> drafts(ds_.videos.size());
    parallel_for(ds_.videos.size(), threads,
                 [&](std::size_t v) { drafts[v] = realize_video(v); });

    PerturbResult out;
    for (auto& d : drafts) {
      int base = static_cast<int>(out.predictions.size());
      for (auto& p : d.preds) {
        p.source_index = static_cast<int>(out.predictions.size());
        out.predictions.push_back(std::move(p));
      }
      for (auto& r : d.census) {
        if (r.pred_idx >= 0) r.pred_idx += base;
        out.census.push_back(r);
      }
    }
    out.counts = error_summary(out.census);
    return out;
  }

 private:
  void validate_spec() {
    for (ErrorKind k : kAllErrorKinds) {
      if (count_of(spec_.inject, k) < 0)
        throw std::invalid_argument("injection counts must be non-negative");
    }
    if (count_of(spec_.inject, ErrorKind::kBoth) > 0)
      throw std::invalid_argument(
          "Both cannot be injected directly; it emerges from stacked "
          "corruptions");
    for (const ScoreBand& b : {spec_.tp_score, spec_.fp_score}) {
      if (!(b.lo >= 0.0 && b.lo <= b.hi && b.hi <= 1.0))
        throw std::invalid_argument(
            "score range must satisfy 0 <= lo <= hi <= 1");
    }
    if (spec_.erode_radius < 0 || spec_.dilate_radius < 0)
      throw std::invalid_argument("structuring radii must be non-negative");
    if (count_of(spec_.inject, ErrorKind::kSpat) > 0 &&
        spec_.erode_radius == 0 && spec_.dilate_radius == 0)
      throw std::invalid_argument(
          "Spat injection needs a positive erode or dilate radius");
    if (count_of(spec_.inject, ErrorKind::kCls) > 0 && cat_ids_.size() < 2)
      throw std::invalid_argument(
          "Cls injection needs at least two categories");
    if (count_of(spec_.inject, ErrorKind::kBkg) > 0 && ds_.videos.empty())
      throw std::invalid_argument("Bkg injection needs at least one video");
  }

  bool can_host(ErrorKind kind, int g) const {
    if (kind != ErrorKind::kTemp) return true;
    const auto& gt = ds_.gt_tracks[g];
    int v = video_pos_.at(gt.video_id);
    if (ds_.videos[v].length < 2) return false;
    for (int o : gts_of_[v]) {
      const auto& d = ds_.gt_tracks[o];
      if (o != g && !d.iscrowd && d.visible_frames > 0) return true;
    }
    return false;
  }

  void assign_targets() {
    std::mt19937_64 rng = make_rng(spec_.seed, kSaltAssign, 0);
    std::vector<int> order = eligible_;
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[bounded(rng, i)]);

    if (spec_.non_interacting) {
      std::vector<char> taken(ds_.gt_tracks.size(), 0);
      for (ErrorKind k : kInjectOrder) {
        for (int c = 0; c < count_of(spec_.inject, k); ++c) {
          int got = -1;
          for (int g : order) {
            if (!taken[g] && can_host(k, g)) {
              got = g;
              break;
            }
          }
          if (got < 0)
            throw std::invalid_argument("not enough eligible tracks for " +
                                        to_string(k) + " injections");
          taken[got] = 1;
          plans_[got].push_back(k);
        }
      }
      return;
    }
    for (ErrorKind k : kInjectOrder) {
      if (count_of(spec_.inject, k) == 0) continue;
      std::vector<int> cands;
      for (int g : eligible_)
        if (can_host(k, g)) cands.push_back(g);
      if (cands.empty())
        throw std::invalid_argument("not enough eligible tracks for " +
                                    to_string(k) + " injections");
      for (int c = 0; c < count_of(spec_.inject, k); ++c)
        plans_[cands[bounded(rng, cands.size())]].push_back(k);
    }
  }

  void assign_blobs() {
    blobs_of_.resize(ds_.videos.size());
    for (int i = 0; i < count_of(spec_.inject, ErrorKind::kBkg); ++i)
      blobs_of_[i % ds_.videos.size()].push_back(i);
  }

  // Sequence IoU of `masks` against every ground-truth track in the video
  // except `a` and `b`.  Returns a diagnostic when some other track comes
  // close enough to contaminate the intended classification: a countable
  // track at or above thr_b could steal the record (or the match), a crowd
  // region at or above thr_f would swallow the detection entirely.
  std::optional<std::string> blocked_by(const std::vector<RleMask>& masks,
                                        int video, int a, int b) const {
    for (int o : gts_of_[video]) {
      if (o == a || o == b) continue;
      const auto& other = ds_.gt_tracks[o];
      if (other.iscrowd) {
        if (sequence_iou(masks, other.masks, true) >= cfg_.thr_f)
          return "crowd region " + std::to_string(other.id) +
                 " overlaps the injected prediction above thr_f";
      } else if (other.visible_frames > 0 &&
                 sequence_iou(masks, other.masks) >= cfg_.thr_b) {
        return "track " + std::to_string(other.id) +
               " overlaps the injected prediction above thr_b";
      }
    }
    return std::nullopt;
  }

  void require_clear(const std::vector<RleMask>& masks, int video, int target,
                     const std::string& what) const {
    if (!spec_.non_interacting) return;
    if (auto why = blocked_by(masks, video, target, -1))
      throw PerturbError(what + " for ground-truth track " +
                         std::to_string(ds_.gt_tracks[target].id) + ": " +
                         *why);
  }

  // Erodes (or, failing that, dilates) every frame step by step until the
  // sequence IoU against the original drops inside (thr_b, thr_f).  Both
  // walks are monotone in IoU, so the first step below thr_f either lands
  // in the band or proves the step size skips it.
  std::optional<SpatMasks> morph_into_band(const InstanceTrack& gt,
                                           bool eroding, int rad) const {
    if (rad <= 0) return std::nullopt;
    std::vector<RleMask> cur = gt.masks;
    std::uint64_t prev_area = total_area(cur);
    for (int step = 0; step < kMaxMorphSteps; ++step) {
      for (auto& m : cur) m = morph(m, rad, eroding);
      double iou = sequence_iou(cur, gt.masks);
      if (iou < cfg_.thr_f) {
        if (iou <= cfg_.thr_b) return std::nullopt;  // skipped the band
        double ot =
            temporal_overlap(cur, gt.masks, cfg_.thr_spat, cfg_.union_mode);
        if (ot < cfg_.thr_temp) return std::nullopt;  // tracking collapsed
        return SpatMasks{std::move(cur), iou, ot};
      }
      std::uint64_t a = total_area(cur);
      if (!eroding && a == prev_area) return std::nullopt;  // saturated
      prev_area = a;
    }
    return std::nullopt;
  }

  SpatMasks spat_masks(const InstanceTrack& gt) const {
    if (auto r = morph_into_band(gt, true, spec_.erode_radius)) return *r;
    if (auto r = morph_into_band(gt, false, spec_.dilate_radius)) return *r;
    throw PerturbError("Spat injection for ground-truth track " +
                       std::to_string(gt.id) +
                       ": morphology cannot reach the (thr_b, thr_f) IoU "
                       "band");
  }

  // Joins the target's masks before the switch frame with a donor's after
  // it.  A valid splice keeps the sequence IoU against the target inside
  // the band (and strictly above the donor's, so the classifier picks the
  // target) while the per-frame agreement past the switch drags the
  // tracking ratio below thr_temp.
  TempMasks temp_masks(int target, int video) const {
    const auto& gt = ds_.gt_tracks[target];
    const int frames = ds_.videos[video].length;

    std::vector<int> switches;
    if (spec_.switch_frame >= 0) {
      if (spec_.switch_frame < 1 || spec_.switch_frame >= frames)
        throw PerturbError("Temp injection for ground-truth track " +
                           std::to_string(gt.id) + ": switch frame " +
                           std::to_string(spec_.switch_frame) +
                           " is outside [1, " + std::to_string(frames - 1) +
                           "]");
      switches.push_back(spec_.switch_frame);
    } else {
      // Center-out around 55% of the clip: keeping a little more than half
      // of the target holds its IoU above the donor's.
      int h0 = std::clamp(static_cast<int>(std::lround(0.55 * frames)), 1,
                          frames - 1);
      for (int h = 1; h < frames; ++h) switches.push_back(h);
      std::stable_sort(switches.begin(), switches.end(),
                       [h0](int x, int y) {
                         return std::abs(x - h0) < std::abs(y - h0);
                       });
    }

    for (int h : switches) {
      for (int o : gts_of_[video]) {
        const auto& donor = ds_.gt_tracks[o];
        if (o == target || donor.iscrowd || donor.visible_frames == 0)
          continue;
        std::vector<RleMask> spliced(gt.masks.begin(), gt.masks.begin() + h);
        spliced.insert(spliced.end(), donor.masks.begin() + h,
                       donor.masks.end());
        double iou = sequence_iou(spliced, gt.masks);
        if (!(iou > cfg_.thr_b && iou < cfg_.thr_f)) continue;
        if (sequence_iou(spliced, donor.masks) >= iou) continue;
        double ot = temporal_overlap(spliced, gt.masks, cfg_.thr_spat,
                                     cfg_.union_mode);
        if (ot >= cfg_.thr_temp) continue;
        if (spec_.non_interacting &&
            blocked_by(spliced, video, target, o))
          continue;
        return TempMasks{std::move(spliced), iou, ot};
      }
    }
    throw PerturbError("Temp injection for ground-truth track " +
                       std::to_string(gt.id) +
                       ": no switch frame lands in the (thr_b, thr_f) IoU "
                       "band");
  }

  Draft realize_video(std::size_t v) const {
    const VideoClip& clip = ds_.videos[v];
    Draft draft;
    for (int g : gts_of_[v]) {
      const InstanceTrack& gt = ds_.gt_tracks[g];
      std::mt19937_64 rng = make_rng(spec_.seed, kSaltTrack, g);
      double tp_score = draw_score(rng, spec_.tp_score);

      // Start from the clean true positive and let each assigned role
      // corrupt it.  `slot` ties a census record to its prediction.
      std::vector<TrackPrediction> mine;
      std::vector<std::pair<ErrorRecord, int>> recs;
      auto base_pred = [&](int cat, double score) {
        TrackPrediction p;
        p.video_id = clip.id;
        p.category_id = cat;
        p.score = score;
        p.masks = gt.masks;
        return p;
      };
      mine.push_back(base_pred(gt.category_id, tp_score));

      auto ensure_base = [&] {
        if (mine.empty())
          mine.push_back(base_pred(gt.category_id,
                                   draw_score(rng, spec_.fp_score)));
      };
      auto record = [&](ErrorKind kind, int slot, int cat, double score,
                        double iou, double ot, bool with_gt) {
        ErrorRecord r;
        r.kind = kind;
        r.video_id = clip.id;
        r.category_id = cat;
        r.score = score;
        r.iou_max = iou;
        r.overlap_temp = ot;
        if (with_gt) {
          r.gt_idx = g;
          r.gt_id = gt.id;
        }
        recs.emplace_back(r, slot);
      };

      for (ErrorKind role : plans_[g]) {
        switch (role) {
          case ErrorKind::kCls: {
            ensure_base();
            require_clear(gt.masks, static_cast<int>(v), g, "Cls injection");
            std::size_t skip =
                bounded(rng, cat_ids_.size() - 1);  // anything but its own
            int flip = -1;
            for (int id : cat_ids_) {
              if (id == gt.category_id) continue;
              if (skip-- == 0) {
                flip = id;
                break;
              }
            }
            mine[0].category_id = flip;
            mine[0].score = draw_score(rng, spec_.fp_score);
            record(ErrorKind::kCls, 0, flip, mine[0].score,
                   sequence_iou(mine[0].masks, gt.masks), kNaN, true);
            break;
          }
          case ErrorKind::kSpat: {
            ensure_base();
            SpatMasks sm = spat_masks(gt);
            require_clear(sm.masks, static_cast<int>(v), g, "Spat injection");
            mine[0].masks = std::move(sm.masks);
            mine[0].score = draw_score(rng, spec_.fp_score);
            record(ErrorKind::kSpat, 0, mine[0].category_id, mine[0].score,
                   sm.iou, sm.overlap, true);
            break;
          }
          case ErrorKind::kTemp: {
            ensure_base();
            TempMasks tm = temp_masks(g, static_cast<int>(v));
            mine[0].masks = std::move(tm.masks);
            mine[0].score = draw_score(rng, spec_.fp_score);
            record(ErrorKind::kTemp, 0, mine[0].category_id, mine[0].score,
                   tm.iou, tm.overlap, true);
            break;
          }
          case ErrorKind::kDup: {
            ensure_base();
            require_clear(mine[0].masks, static_cast<int>(v), g,
                          "Dup injection");
            TrackPrediction dup = mine[0];
            dup.score =
                std::min(draw_score(rng, spec_.fp_score), mine[0].score - 1e-3);
            if (dup.score <= 0.0) dup.score = mine[0].score * 0.5;
            mine.push_back(std::move(dup));
            int slot = static_cast<int>(mine.size()) - 1;
            record(ErrorKind::kDup, slot, mine[slot].category_id,
                   mine[slot].score, sequence_iou(mine[slot].masks, gt.masks),
                   kNaN, true);
            break;
          }
          case ErrorKind::kMiss: {
            mine.clear();
            record(ErrorKind::kMiss, -1, gt.category_id, kNaN, kNaN, kNaN,
                   true);
            break;
          }
          default:
            throw std::logic_error("unrealizable injection kind");
        }
      }

      int base = static_cast<int>(draft.preds.size());
      for (auto& p : mine) {
        set_extent(p);
        draft.preds.push_back(std::move(p));
      }
      for (auto& [rec, slot] : recs) {
        // A later Miss in interacting mode may have dropped the prediction.
        if (slot >= 0 && slot < static_cast<int>(mine.size()))
          rec.pred_idx = base + slot;
        draft.census.push_back(rec);
      }
    }
    realize_blobs(v, &draft);
    return draft;
  }

  void realize_blobs(std::size_t v, Draft* draft) const {
    if (blobs_of_[v].empty()) return;
    const VideoClip& clip = ds_.videos[v];
    const int frames = std::min(clip.length, kMaxBlobFrames);
    const int side = std::max(2, std::min(clip.height, clip.width) / 8);
    const int rows = clip.height / side;
    const int cols = clip.width / side;
    if (frames < 1 || rows < 1 || cols < 1)
      throw PerturbError("Bkg injection: video " + std::to_string(clip.id) +
                         " is too small to host a blob");

    // Occupancy over the blob frames: ground truth plus blobs placed so far.
    std::vector<Bitmask> occ(
        frames, Bitmask{clip.height, clip.width,
                        std::vector<std::uint8_t>(
                            static_cast<std::size_t>(clip.height) *
                                clip.width,
                            0)});
    for (int g : gts_of_[v]) {
      const auto& gt = ds_.gt_tracks[g];
      for (int t = 0; t < frames; ++t) {
        if (is_empty(gt.masks[t])) continue;
        Bitmask bm = decode(gt.masks[t]);
        for (std::size_t i = 0; i < bm.data.size(); ++i)
          occ[t].data[i] |= bm.data[i];
      }
    }

    const int n_pos = rows * cols;
    for (int ordinal : blobs_of_[v]) {
      std::mt19937_64 rng = make_rng(spec_.seed, kSaltBlob, ordinal);
      int cat = cat_ids_[bounded(rng, cat_ids_.size())];
      double score = draw_score(rng, spec_.fp_score);
      int start = static_cast<int>(bounded(rng, n_pos));
      int r0 = -1, c0 = -1;
      for (int j = 0; j < n_pos; ++j) {
        int pos = (start + j) % n_pos;
        int rr = (pos / cols) * side;
        int cc = (pos % cols) * side;
        bool free = true;
        for (int t = 0; t < frames && free; ++t)
          for (int r = rr; r < rr + side && free; ++r)
            for (int c = cc; c < cc + side; ++c)
              if (occ[t].at(r, c)) {
                free = false;
                break;
              }
        if (free) {
          r0 = rr;
          c0 = cc;
          break;
        }
      }
      if (r0 < 0)
        throw PerturbError("Bkg injection: no free space in video " +
                           std::to_string(clip.id));

      Bitmask blob{clip.height, clip.width,
                   std::vector<std::uint8_t>(
                       static_cast<std::size_t>(clip.height) * clip.width,
                       0)};
      for (int r = r0; r < r0 + side; ++r)
        for (int c = c0; c < c0 + side; ++c) blob.set(r, c, true);
      for (int t = 0; t < frames; ++t)
        for (std::size_t i = 0; i < blob.data.size(); ++i)
          occ[t].data[i] |= blob.data[i];

      TrackPrediction p;
      p.video_id = clip.id;
      p.category_id = cat;
      p.score = score;
      RleMask frame = encode(blob);
      p.masks.assign(clip.length, make_empty_mask(clip.height, clip.width));
      for (int t = 0; t < frames; ++t) p.masks[t] = frame;
      set_extent(p);

      ErrorRecord rec;
      rec.kind = ErrorKind::kBkg;
      rec.video_id = clip.id;
      rec.category_id = cat;
      rec.pred_idx = static_cast<int>(draft->preds.size());
      rec.score = score;
      rec.iou_max = 0.0;  // verified pixel-disjoint from every track
      rec.overlap_temp = kNaN;
      draft->preds.push_back(std::move(p));
      draft->census.push_back(rec);
    }
  }

  const Dataset& ds_;
  const PerturbSpec& spec_;
  const EvalConfig& cfg_;
  std::vector<int> cat_ids_;
  std::map<int, int> video_pos_;
  std::vector<std::vector<int>> gts_of_;
  std::vector<int> eligible_;
  std::vector<std::vector<ErrorKind>> plans_;
  std::vector<std::vector<int>> blobs_of_;
};

}  // namespace

PerturbResult perturb(const Dataset& gt, const PerturbSpec& spec,
                      const EvalConfig& cfg, int threads) {
  return Generator(gt, spec, cfg).run(threads);
}

nlohmann::json census_to_json(const PerturbResult& result) {
  nlohmann::json counts = nlohmann::json::object();
  for (ErrorKind k : kAllErrorKinds)
    counts[to_string(k)] = count_of(result.counts, k);
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.census)
    records.push_back(error_record_to_json(r));
  return nlohmann::json{{"counts", std::move(counts)},
                        {"records", std::move(records)}};
}

void save_census(const PerturbResult& result,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << census_to_json(result).dump() << "\n";
}

}  // namespace visdiag
