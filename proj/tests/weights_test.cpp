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

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "testutil.hpp"
#include "visdiag/config.hpp"
#include "visdiag/dataset.hpp"
#include "visdiag/errors.hpp"

namespace visdiag {
namespace {

using test::FrameRect;
using test::make_clip;
using test::make_pred;
using test::make_track;
using test::rect_track;

// One video of 10x10 frames with two categories (same shape as the
// classifier tests use).
struct Scene {
  Dataset ds;
  int frames;

  explicit Scene(int frames = 1) : frames(frames) {
    ds.videos.push_back(make_clip(1, frames, 10, 10));
    ds.categories[1] = "alpha";
    ds.categories[2] = "beta";
  }
  int gt(int cat, const std::vector<FrameRect>& rects, bool crowd = false) {
    int idx = static_cast<int>(ds.gt_tracks.size());
    ds.gt_tracks.push_back(make_track(100 + idx, 1, cat,
                                      rect_track(frames, 10, 10, rects),
                                      crowd));
    return idx;
  }
  int pred(int cat, double score, const std::vector<FrameRect>& rects) {
    int idx = static_cast<int>(ds.predictions.size());
    ds.predictions.push_back(make_pred(
        1, cat, score, rect_track(frames, 10, 10, rects), idx));
    return idx;
  }
};

std::vector<FrameRect> per_frame(int n, int r0, int c0, int r1, int c1) {
  std::vector<FrameRect> rects;
  for (int t = 0; t < n; ++t) rects.push_back({t, r0, c0, r1, c1});
  return rects;
}

struct WeightRun {
  EvalContext ctx;
  ErrorAnalysis analysis;
  WeightReport report;

  explicit WeightRun(const Scene& scene, EvalConfig cfg = {})
      : ctx(scene.ds, cfg),
        analysis(classify_errors(ctx)),
        report(compute_weight_report(ctx, {}, analysis)) {}
};

TEST(WeightsTest, PerfectSceneScoresZeroEverywhere) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  scene.pred(1, 0.9, {{0, 0, 0, 10, 5}});
  WeightRun run(scene);
  EXPECT_NEAR(run.report.base_ap, 100.0, 1e-6);
  EXPECT_NEAR(run.report.fix_all_ap, 100.0, 1e-6);
  EXPECT_DOUBLE_EQ(run.report.threshold, 0.5);
  for (ErrorKind kind : kAllErrorKinds) {
    EXPECT_NEAR(run.report.weight(kind), 0.0, 1e-9) << to_string(kind);
  }
}

TEST(WeightsTest, ConfusionFixReassignsWhenTargetIsFree) {
  // The class-1 prediction sits exactly on the only class-2 track.
  Scene scene;
  scene.gt(2, {{0, 0, 0, 10, 5}});
  scene.pred(1, 0.9, {{0, 0, 0, 10, 5}});
  WeightRun run(scene);
  DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, ErrorKind::kCls);
  ASSERT_EQ(fixed.pred_category.count(0), 1u);
  EXPECT_EQ(fixed.pred_category.at(0), 2);
  EXPECT_TRUE(fixed.pred_removed.empty());
  EXPECT_NEAR(run.report.base_ap, 0.0, 1e-6);
  EXPECT_NEAR(run.report.weight(ErrorKind::kCls), 100.0, 1e-6);
}

TEST(WeightsTest, ConfusionFixDeletesWhenTargetIsTaken) {
  // The class-2 track already has its own true positive, so the confused
  // class-1 prediction cannot be salvaged by relabeling.
  Scene scene;
  scene.gt(1, {{0, 0, 0, 5, 5}});
  scene.gt(2, {{0, 5, 0, 10, 5}});
  scene.pred(1, 0.90, {{0, 0, 0, 5, 5}});    // class-1 hit
  scene.pred(2, 0.95, {{0, 5, 0, 10, 5}});   // class-2 hit
  int confused = scene.pred(1, 0.99, {{0, 5, 0, 10, 5}});  // on the class-2 track
  WeightRun run(scene);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kCls), 1);
  DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, ErrorKind::kCls);
  EXPECT_TRUE(fixed.pred_category.empty());
  EXPECT_EQ(fixed.pred_removed.count(confused), 1u);
  // The top-scored false positive halves class 1's curve: 75 -> 100.
  EXPECT_NEAR(run.report.base_ap, 75.0, 1e-6);
  EXPECT_NEAR(run.report.weight(ErrorKind::kCls), 25.0, 1e-6);
}

TEST(WeightsTest, LocalizationFixForcesPerfectOverlap) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  scene.pred(1, 0.9, {{0, 0, 0, 3, 5}});  // IoU 0.3: Spat on a free track
  WeightRun run(scene);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kSpat), 1);
  DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, ErrorKind::kSpat);
  auto key = DatasetView::pair_key(0, 0);
  ASSERT_EQ(fixed.iou_override.count(key), 1u);
  EXPECT_DOUBLE_EQ(fixed.iou_override.at(key), 1.0);
  EXPECT_NEAR(run.report.weight(ErrorKind::kSpat), 100.0, 1e-6);
}

TEST(WeightsTest, LocalizationFixDeletesWhenTrackIsTaken) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  scene.pred(1, 0.90, {{0, 0, 0, 10, 5}});       // claims the track
  int sloppy = scene.pred(1, 0.95, {{0, 0, 0, 3, 5}});  // outranks it at IoU 0.3
  WeightRun run(scene);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kSpat), 1);
  DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, ErrorKind::kSpat);
  EXPECT_TRUE(fixed.iou_override.empty());
  EXPECT_EQ(fixed.pred_removed.count(sloppy), 1u);
  EXPECT_NEAR(run.report.base_ap, 50.0, 1e-6);
  EXPECT_NEAR(run.report.weight(ErrorKind::kSpat), 50.0, 1e-6);
}

TEST(WeightsTest, TrackingFixForcesPerfectOverlap) {
  Scene scene(5);
  scene.gt(1, per_frame(5, 0, 0, 10, 4));
  scene.pred(1, 0.9, {{0, 0, 0, 10, 4}, {1, 0, 0, 10, 4}});  // 2/5 frames
  WeightRun run(scene);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kTemp), 1);
  DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, ErrorKind::kTemp);
  EXPECT_EQ(fixed.iou_override.count(DatasetView::pair_key(0, 0)), 1u);
  EXPECT_NEAR(run.report.weight(ErrorKind::kTemp), 100.0, 1e-6);
}

TEST(WeightsTest, DuplicateFixDeletesTheExtraDetection) {
  // Two tracks; the duplicate ranks between the two hits and drags the
  // second one's precision down.
  Scene scene;
  scene.gt(1, {{0, 0, 0, 5, 5}});
  scene.gt(1, {{0, 5, 0, 10, 5}});
  scene.pred(1, 0.90, {{0, 0, 0, 5, 5}});
  int dup = scene.pred(1, 0.85, {{0, 0, 0, 4, 5}});  // IoU 0.8 with track 0
  scene.pred(1, 0.80, {{0, 5, 0, 10, 5}});
  WeightRun run(scene);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kDup), 1);
  DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, ErrorKind::kDup);
  EXPECT_EQ(fixed.pred_removed.count(dup), 1u);
  EXPECT_NEAR(run.report.base_ap, (51.0 + 50.0 * 2.0 / 3.0) / 101.0 * 100.0,
              1e-6);
  EXPECT_NEAR(run.report.weight(ErrorKind::kDup), 5000.0 / 303.0, 1e-6);
}

TEST(WeightsTest, HallucinationFixDeletes) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  int stray = scene.pred(1, 0.95, {{0, 0, 7, 5, 9}});  // overlaps nothing
  scene.pred(1, 0.90, {{0, 0, 0, 10, 5}});
  WeightRun run(scene);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kBkg), 1);
  DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, ErrorKind::kBkg);
  EXPECT_EQ(fixed.pred_removed.count(stray), 1u);
  EXPECT_NEAR(run.report.base_ap, 50.0, 1e-6);
  EXPECT_NEAR(run.report.weight(ErrorKind::kBkg), 50.0, 1e-6);
}

TEST(WeightsTest, MissFixRemovesTheTrack) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 5, 5}});
  int lost = scene.gt(1, {{0, 5, 0, 10, 5}});
  scene.pred(1, 0.9, {{0, 0, 0, 5, 5}});
  WeightRun run(scene);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kMiss), 1);
  DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, ErrorKind::kMiss);
  EXPECT_EQ(fixed.gt_removed.count(lost), 1u);
  EXPECT_NEAR(run.report.base_ap, 5100.0 / 101.0, 1e-6);
  EXPECT_NEAR(run.report.weight(ErrorKind::kMiss), 5000.0 / 101.0, 1e-6);
}

TEST(WeightsTest, UntouchedKindsLeaveTheViewAlone) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  scene.pred(1, 0.9, {{0, 0, 0, 3, 5}});  // a lone Spat error
  WeightRun run(scene);
  for (ErrorKind kind : {ErrorKind::kCls, ErrorKind::kTemp, ErrorKind::kBoth,
                         ErrorKind::kDup, ErrorKind::kBkg, ErrorKind::kMiss}) {
    DatasetView fixed = apply_fix(run.ctx, {}, run.analysis, kind);
    EXPECT_TRUE(fixed.pred_removed.empty()) << to_string(kind);
    EXPECT_TRUE(fixed.pred_category.empty()) << to_string(kind);
    EXPECT_TRUE(fixed.gt_removed.empty()) << to_string(kind);
    EXPECT_TRUE(fixed.iou_override.empty()) << to_string(kind);
    EXPECT_NEAR(run.report.weight(kind), 0.0, 1e-9) << to_string(kind);
  }
}

TEST(WeightsTest, FixesStackOnTopOfTheBaseView) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  scene.pred(1, 0.9, {{0, 0, 0, 3, 5}});
  EvalContext ctx(scene.ds, EvalConfig{});
  DatasetView base;
  base.pred_ignore_if_unmatched.insert(12345);  // sentinel payload
  ErrorAnalysis analysis = classify_errors(ctx, base);
  DatasetView fixed = apply_fix(ctx, base, analysis, ErrorKind::kSpat);
  EXPECT_EQ(fixed.pred_ignore_if_unmatched.count(12345), 1u);  // kept
  EXPECT_EQ(fixed.iou_override.size(), 1u);                    // added
  EXPECT_TRUE(base.iou_override.empty());                      // base intact
}

TEST(WeightsTest, RemovingAClaimedTrackLowersApAndThrows) {
  // A forged Miss record pointing at a matched track: deleting it turns its
  // true positive into a false positive, which the guard must reject.
  Scene scene;
  scene.gt(1, {{0, 0, 0, 5, 5}});
  scene.gt(1, {{0, 5, 0, 10, 5}});
  scene.pred(1, 0.9, {{0, 0, 0, 5, 5}});
  scene.pred(1, 0.8, {{0, 5, 0, 10, 5}});
  EvalContext ctx(scene.ds, EvalConfig{});
  ErrorAnalysis analysis = classify_errors(ctx);
  ASSERT_TRUE(analysis.records.empty());
  ErrorRecord forged;
  forged.kind = ErrorKind::kMiss;
  forged.gt_idx = 0;
  analysis.records.push_back(forged);
  double base_ap = ap_at_threshold(ctx, {}, 0.5);
  EXPECT_THROW(
      error_weight(ctx, {}, analysis, ErrorKind::kMiss, base_ap),
      std::logic_error);
}

TEST(WeightsTest, NoGroundTruthPropagatesNan) {
  Scene scene;
  scene.pred(1, 0.9, {{0, 0, 0, 5, 5}});
  WeightRun run(scene);
  EXPECT_TRUE(std::isnan(run.report.base_ap));
  EXPECT_TRUE(std::isnan(run.report.weight(ErrorKind::kBkg)));
  EXPECT_TRUE(std::isnan(run.report.fix_all_ap));
}

TEST(WeightsTest, ReportAgreesWithIndividualWeights) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 5, 5}});
  scene.gt(2, {{0, 5, 0, 10, 5}});
  scene.pred(1, 0.95, {{0, 5, 0, 10, 5}});  // confused
  scene.pred(1, 0.90, {{0, 0, 0, 2, 5}});   // IoU 0.4: Spat
  scene.pred(1, 0.85, {{0, 0, 7, 5, 9}});   // hallucination
  WeightRun run(scene);
  // Walk the kinds in reverse to show order cannot matter.
  for (int i = kErrorKindCount - 1; i >= 0; --i) {
    ErrorKind kind = kAllErrorKinds[i];
    EXPECT_DOUBLE_EQ(
        run.report.weights[i],
        error_weight(run.ctx, {}, run.analysis, kind, run.report.base_ap))
        << to_string(kind);
  }
  EXPECT_DOUBLE_EQ(run.report.base_ap, ap_at_threshold(run.ctx, {}, 0.5));
}

TEST(WeightsTest, ThreadCountDoesNotChangeTheReport) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 5, 5}});
  scene.gt(2, {{0, 5, 0, 10, 5}});
  scene.pred(1, 0.95, {{0, 5, 0, 10, 5}});
  scene.pred(1, 0.90, {{0, 0, 0, 2, 5}});
  EvalContext ctx(scene.ds, EvalConfig{});
  ErrorAnalysis analysis = classify_errors(ctx);
  WeightReport serial = compute_weight_report(ctx, {}, analysis, 1);
  WeightReport wide = compute_weight_report(ctx, {}, analysis, 4);
  EXPECT_EQ(serial.base_ap, wide.base_ap);
  EXPECT_EQ(serial.fix_all_ap, wide.fix_all_ap);
  for (int i = 0; i < kErrorKindCount; ++i) {
    EXPECT_EQ(serial.weights[i], wide.weights[i]) << i;
  }
}

TEST(WeightsTest, FixingEverythingReachesPerfectScore) {
  // One specimen of every kind except Both; afterwards every surviving
  // prediction is a hit and every surviving track is found.
  Scene scene(5);
  scene.gt(1, per_frame(5, 0, 0, 2, 5));   // A: matched
  scene.gt(2, per_frame(5, 2, 0, 4, 5));   // B: target of the confusion
  scene.gt(1, per_frame(5, 4, 0, 6, 5));   // C: sloppily localized
  scene.gt(1, per_frame(5, 6, 0, 8, 5));   // D: followed 2/5 frames
  scene.gt(2, per_frame(5, 8, 0, 10, 5));  // E: missed
  scene.pred(1, 0.90, per_frame(5, 0, 0, 2, 5));   // hit on A
  scene.pred(1, 0.85, per_frame(5, 2, 0, 4, 5));   // Cls onto B
  scene.pred(1, 0.80, per_frame(5, 4, 0, 6, 2));   // Spat on C (IoU 0.4)
  scene.pred(1, 0.75, {{0, 6, 0, 8, 5}, {1, 6, 0, 8, 5}});  // Temp on D
  scene.pred(1, 0.70, per_frame(5, 0, 0, 2, 4));   // Dup of A (IoU 0.8)
  scene.pred(1, 0.65, per_frame(5, 9, 6, 10, 8));  // Bkg
  WeightRun run(scene);
  EXPECT_EQ(count_of(run.analysis.counts, ErrorKind::kCls), 1);
  EXPECT_EQ(count_of(run.analysis.counts, ErrorKind::kSpat), 1);
  EXPECT_EQ(count_of(run.analysis.counts, ErrorKind::kTemp), 1);
  EXPECT_EQ(count_of(run.analysis.counts, ErrorKind::kDup), 1);
  EXPECT_EQ(count_of(run.analysis.counts, ErrorKind::kBkg), 1);
  EXPECT_EQ(count_of(run.analysis.counts, ErrorKind::kMiss), 1);
  EXPECT_EQ(count_of(run.analysis.counts, ErrorKind::kBoth), 0);
  EXPECT_LT(run.report.base_ap, 100.0);
  for (ErrorKind kind : kAllErrorKinds) {
    EXPECT_GE(run.report.weight(kind), 0.0) << to_string(kind);
  }
  EXPECT_NEAR(run.report.fix_all_ap, 100.0, 1e-6);
}

TEST(WeightsTest, CrossClassCoverCannotBeFixedToPerfect) {
  // A Both error deletes its prediction yet covers the other-class track,
  // so nothing restores that track: the ceiling stays below 100.
  Scene scene;
  scene.gt(1, {{0, 0, 0, 5, 5}});
  scene.gt(2, {{0, 5, 0, 10, 5}});
  scene.pred(1, 0.95, {{0, 5, 0, 7, 5}});  // 10 of B's 25 px: IoU 0.4
  scene.pred(1, 0.90, {{0, 0, 0, 5, 5}});  // hit on A
  WeightRun run(scene);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kBoth), 1);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kMiss), 0);
  DatasetView fixed = apply_all_fixes(run.ctx, {}, run.analysis);
  EXPECT_EQ(fixed.pred_removed.size(), 1u);
  EXPECT_TRUE(fixed.gt_removed.empty());  // the covered track stays
  // Class 1 recovers fully; class 2's track remains unfound.
  EXPECT_NEAR(run.report.fix_all_ap, 50.0, 1e-6);
  EXPECT_LT(run.report.fix_all_ap, 100.0 - 1e-6);
}

TEST(WeightsTest, SweepStaysEmptyUnlessRequested) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  scene.pred(1, 0.9, {{0, 0, 0, 10, 5}});
  WeightRun run(scene);
  EXPECT_TRUE(run.report.sweep.empty());
}

TEST(WeightsTest, FullSweepScoresTheSameFixesAtEveryThreshold) {
  // One hit at IoU 35/57 (~0.614) that survives the 0.50-0.60 rows only,
  // plus a class confusion whose fix pays off at every threshold.
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  scene.gt(2, {{0, 0, 6, 10, 10}});
  scene.pred(1, 0.9, {{0, 3, 0, 10, 6}});
  scene.pred(1, 0.8, {{0, 0, 6, 10, 10}});
  EvalConfig cfg;
  cfg.weight_full_sweep = true;
  WeightRun run(scene, cfg);
  ASSERT_EQ(count_of(run.analysis.counts, ErrorKind::kCls), 1);
  ASSERT_EQ(run.report.sweep.size(), cfg.iou_sweep.size());

  // The thr_f row reproduces the headline numbers bit for bit.
  const WeightSweepRow& head = run.report.sweep[0];
  EXPECT_DOUBLE_EQ(head.threshold, run.report.threshold);
  EXPECT_DOUBLE_EQ(head.base_ap, run.report.base_ap);
  EXPECT_DOUBLE_EQ(head.fix_all_ap, run.report.fix_all_ap);
  for (int i = 0; i < kErrorKindCount; ++i) {
    EXPECT_DOUBLE_EQ(head.weights[i], run.report.weights[i]) << i;
  }

  for (std::size_t t = 0; t < run.report.sweep.size(); ++t) {
    const WeightSweepRow& row = run.report.sweep[t];
    EXPECT_DOUBLE_EQ(row.threshold, cfg.iou_sweep[t]) << t;
    bool hit_survives = t <= 2;  // the 0.50, 0.55 and 0.60 rows sit below 35/57
    EXPECT_NEAR(row.base_ap, hit_survives ? 50.0 : 0.0, 1e-6) << t;
    EXPECT_NEAR(row.weight(ErrorKind::kCls), 50.0, 1e-6) << t;
    EXPECT_NEAR(row.fix_all_ap, hit_survives ? 100.0 : 50.0, 1e-6) << t;
    for (ErrorKind kind : kAllErrorKinds) {
      if (kind == ErrorKind::kCls) continue;
      EXPECT_NEAR(row.weight(kind), 0.0, 1e-9) << to_string(kind);
    }
  }
}

TEST(WeightsTest, ThreadCountDoesNotChangeTheSweep) {
  Scene scene;
  scene.gt(1, {{0, 0, 0, 10, 5}});
  scene.gt(2, {{0, 0, 6, 10, 10}});
  scene.pred(1, 0.9, {{0, 3, 0, 10, 6}});
  scene.pred(1, 0.8, {{0, 0, 6, 10, 10}});
  EvalConfig cfg;
  cfg.weight_full_sweep = true;
  EvalContext ctx(scene.ds, cfg);
  ErrorAnalysis analysis = classify_errors(ctx);
  WeightReport serial = compute_weight_report(ctx, {}, analysis, 1);
  WeightReport wide = compute_weight_report(ctx, {}, analysis, 4);
  ASSERT_EQ(serial.sweep.size(), wide.sweep.size());
  for (std::size_t t = 0; t < serial.sweep.size(); ++t) {
    EXPECT_EQ(serial.sweep[t].base_ap, wide.sweep[t].base_ap) << t;
    EXPECT_EQ(serial.sweep[t].fix_all_ap, wide.sweep[t].fix_all_ap) << t;
    for (int i = 0; i < kErrorKindCount; ++i) {
      EXPECT_EQ(serial.sweep[t].weights[i], wide.sweep[t].weights[i]) << i;
    }
  }
}

}  // namespace
}  // namespace visdiag
