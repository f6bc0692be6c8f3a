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

#include "visdiag/iou.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace visdiag {

namespace {
void check_lengths(const std::vector<RleMask>& a,
                   const std::vector<RleMask>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("track length mismatch: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
}
}  // namespace

double sequence_iou(const std::vector<RleMask>& cand,
                    const std::vector<RleMask>& ref, bool crowd) {
  check_lengths(cand, ref);
  std::uint64_t inter = 0, denom = 0;
  for (std::size_t t = 0; t < cand.size(); ++t) {
    inter += intersect_area(cand[t], ref[t]);
    denom += crowd ? area(cand[t]) : union_area(cand[t], ref[t]);
  }
  if (denom == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(denom);
}

std::vector<double> frame_ious(const std::vector<RleMask>& cand,
                               const std::vector<RleMask>& ref) {
  check_lengths(cand, ref);
  std::vector<double> out(cand.size());
  for (std::size_t t = 0; t < cand.size(); ++t) {
    std::uint64_t u = union_area(cand[t], ref[t]);
    if (u == 0) {
      out[t] = std::numeric_limits<double>::quiet_NaN();
    } else {
      out[t] = static_cast<double>(intersect_area(cand[t], ref[t])) /
               static_cast<double>(u);
    }
  }
  return out;
}

double temporal_overlap(const std::vector<RleMask>& cand,
                        const std::vector<RleMask>& ref, double thr_spat,
                        TemporalUnionMode mode) {
  check_lengths(cand, ref);
  int matched = 0;
  int footprint = 0;
  int first = -1, last = -1;
  for (std::size_t t = 0; t < cand.size(); ++t) {
    std::uint64_t u = union_area(cand[t], ref[t]);
    if (u == 0) continue;
    ++footprint;
    if (first < 0) first = static_cast<int>(t);
    last = static_cast<int>(t);
    double iou = static_cast<double>(intersect_area(cand[t], ref[t])) /
                 static_cast<double>(u);
    if (iou > thr_spat) ++matched;
  }
  int denom = mode == TemporalUnionMode::kExtentRange && first >= 0
                  ? last - first + 1
                  : footprint;
  if (denom == 0) return 0.0;
  return static_cast<double>(matched) / static_cast<double>(denom);
}

}  // namespace visdiag
