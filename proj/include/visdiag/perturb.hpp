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
#include <cstdint>
#include <filesystem>

#include <nlohmann/json_fwd.hpp>

#include "visdiag/errors.hpp"

namespace visdiag {

/// A spec entry that cannot be realized on the given ground truth (mask too
/// small to erode into the IoU band, no free space for a background blob,
/// not enough tracks to target, ...).
class PerturbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoreBand {
  double lo = 0.0;
  double hi = 0.0;
};

/// Recipe for turning a ground-truth file into a prediction file with a
/// known population of each error kind.  Every untouched track becomes a
/// verbatim copy of its ground truth (a clean true positive); each injection
/// then corrupts one track's copy in a way the classifier must recognize:
///
///   Cls  — verbatim mask copy carrying a different category id
///   Spat — mask eroded (or, for thin masks, dilated) step by step until the
///          sequence IoU falls between thr_b and thr_f on every frame alike
///   Temp — the track's masks spliced with a donor track's from the switch
///          frame on, so the sequence IoU lands in the band but the per-frame
///          agreement collapses past the switch
///   Dup  — a second verbatim copy scored strictly below the surviving copy
///   Bkg  — a blob dropped into unoccupied pixels, overlapping nothing
///   Miss — the track's copy is withheld entirely
///
/// Both is emergent (a wrong-class and badly-localized prediction at once)
/// and has no direct injection; requesting it is an error.
struct PerturbSpec {
  std::uint64_t seed = 0;
  /// Injection counts indexed by ErrorKind (see count_of()).
  std::array<int, kErrorKindCount> inject{};
  /// Structuring-element radii for the Spat realization.
  int erode_radius = 1;
  int dilate_radius = 1;
  /// Frame at which Temp splices switch identity; -1 picks per track.
  int switch_frame = -1;
  /// Score ranges for surviving copies and for injected false positives.
  ScoreBand tp_score{0.70, 0.95};
  ScoreBand fp_score{0.30, 0.65};
  /// With one injection per track (the default) the classifier must
  /// reproduce the census exactly.  When false, targets are drawn with
  /// replacement and injections may stack on one track; stacked errors can
  /// legitimately reclassify (a Dup of a Cls copy is itself wrong-class),
  /// so only the partition of false positives is guaranteed.
  bool non_interacting = true;
};

struct PerturbResult {
  std::vector<TrackPrediction> predictions;
  /// The intended classification of every injection, in prediction order
  /// (Miss records carry pred_idx -1 and sort with their video).
  std::vector<ErrorRecord> census;
  std::array<int, kErrorKindCount> counts{};
};

/// Morphological erosion / dilation with a square structuring element of the
/// given radius; pixels outside the frame count as background.
RleMask erode(const RleMask& mask, int radius);
RleMask dilate(const RleMask& mask, int radius);

/// Generates predictions plus their expected error census from the ground
/// truth in `gt` (its predictions member is ignored).  The thresholds in
/// `cfg` define the IoU band each realization must land in, so the census
/// is exact for the same config the classifier later runs with.  The same
/// seed always yields byte-identical output regardless of thread count.
///
/// Throws PerturbError when an entry cannot be realized and
/// std::invalid_argument for malformed specs (negative counts, a Both
/// count, empty score ranges, more targets than eligible tracks).
/// Requires validated ground truth: a non-crowd track with no visible
/// frames is rejected.
PerturbResult perturb(const Dataset& gt, const PerturbSpec& spec,
                      const EvalConfig& cfg = {}, int threads = 0);

/// Census sidecar: {"counts": {kind: n, ...}, "records": [...]}.
nlohmann::json census_to_json(const PerturbResult& result);
void save_census(const PerturbResult& result,
                 const std::filesystem::path& path);

}  // namespace visdiag
