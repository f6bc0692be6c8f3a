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

#include "visdiag/config.hpp"

#include <cmath>
#include <sstream>

namespace visdiag {

std::string RangeBins::label(int bin) const {
  if (bin_count() == 1) return "all";
  if (bin_count() == 3) {
    static const char* named[] = {"short", "medium", "long"};
    return named[bin];
  }
  std::ostringstream os;
  os << "len_" << lower(bin) << "_";
  if (upper(bin) == std::numeric_limits<int>::max()) {
    os << "inf";
  } else {
    os << upper(bin);
  }
  return os.str();
}

int RangeBins::bin_of(int temporal_length) const {
  if (temporal_length < 1) {
    throw std::invalid_argument("temporal length must be >= 1");
  }
  int bin = 0;
  while (bin < static_cast<int>(edges.size()) &&
         temporal_length >= edges[bin]) {
    ++bin;
  }
  return bin;
}

void RangeBins::validate() const {
  int prev = 1;
  for (int e : edges) {
    if (e <= prev) {
      throw std::invalid_argument("range bin edges must be strictly increasing and > 1");
    }
    prev = e;
  }
}

std::vector<double> EvalConfig::make_iou_sweep(double lo, double step,
                                               double hi) {
  if (!(lo > 0.0 && lo <= hi && hi < 1.0)) {
    throw std::invalid_argument("IoU sweep bounds must satisfy 0 < lo <= hi < 1");
  }
  std::vector<double> sweep;
  if (step <= 0.0) {
    sweep.push_back(lo);
    return sweep;
  }
  int n = static_cast<int>(std::round((hi - lo) / step));
  for (int i = 0; i <= n; ++i) sweep.push_back(lo + i * step);
  return sweep;
}

std::vector<double> EvalConfig::parse_iou_sweep(const std::string& text) {
  double lo, step, hi;
  char c1, c2;
  std::istringstream is(text);
  if (!(is >> lo >> c1 >> step >> c2 >> hi) || c1 != ':' || c2 != ':') {
    throw std::invalid_argument("IoU sweep must be given as lo:step:hi");
  }
  return make_iou_sweep(lo, step, hi);
}

void EvalConfig::validate() const {
  // thr_b == thr_f is allowed; it collapses the localization error band.
  if (!(0.0 <= thr_b && thr_b <= thr_f && thr_f <= 1.0)) {
    throw std::invalid_argument("thresholds must satisfy 0 <= thr_b <= thr_f <= 1");
  }
  if (!(0.0 <= thr_spat && thr_spat < 1.0)) {
    throw std::invalid_argument("thr_spat must lie in [0, 1)");
  }
  if (!(0.0 < thr_temp && thr_temp <= 1.0)) {
    throw std::invalid_argument("thr_temp must lie in (0, 1]");
  }
  if (iou_sweep.empty()) {
    throw std::invalid_argument("IoU sweep must not be empty");
  }
  for (double t : iou_sweep) {
    if (!(t > 0.0 && t < 1.0)) {
      throw std::invalid_argument("IoU sweep thresholds must lie in (0, 1)");
    }
  }
  if (max_dets < 1) {
    throw std::invalid_argument("max_dets must be at least 1");
  }
  range_bins.validate();
}

std::string to_string(TemporalLengthMode mode) {
  return mode == TemporalLengthMode::kVisible ? "visible" : "extent";
}

std::string to_string(TemporalUnionMode mode) {
  return mode == TemporalUnionMode::kNonEmptySet ? "nonempty" : "extent";
}

}  // namespace visdiag
