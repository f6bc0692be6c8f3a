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

#include <vector>

#include "visdiag/config.hpp"
#include "visdiag/rle.hpp"

namespace visdiag {

// Spatio-temporal IoU over a whole track pair: sum of per-frame
// intersections divided by sum of per-frame unions.  With `crowd` set the
// denominator is the first track's area alone (region-style ground truth may
// legally be multi-matched, so overlap is measured relative to the
// candidate).  Returns 0 when both tracks are empty everywhere.
double sequence_iou(const std::vector<RleMask>& cand,
                    const std::vector<RleMask>& ref, bool crowd = false);

// Per-frame IoU values.  Frames where both masks are empty carry NaN so
// callers can tell "nothing to compare" apart from "compared and disjoint".
std::vector<double> frame_ious(const std::vector<RleMask>& cand,
                               const std::vector<RleMask>& ref);

// Fraction of the pair's temporal footprint on which the two tracks agree
// spatially: |{t : IoU_t > thr_spat}| / |footprint|.  The footprint is the
// set of frames where either track is non-empty (kNonEmptySet) or the
// contiguous span from the earliest to the latest such frame (kExtentRange).
// Returns 0 when the footprint is empty.
double temporal_overlap(const std::vector<RleMask>& cand,
                        const std::vector<RleMask>& ref, double thr_spat,
                        TemporalUnionMode mode = TemporalUnionMode::kNonEmptySet);

}  // namespace visdiag
