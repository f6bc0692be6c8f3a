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

#include "visdiag/rle.hpp"

#include <algorithm>
#include <numeric>

namespace visdiag {

namespace {

std::uint64_t pixel_count(int height, int width) {
  if (height <= 0 || width <= 0) {
    throw RleError("mask dimensions must be positive, got " +
                   std::to_string(height) + "x" + std::to_string(width));
  }
  return static_cast<std::uint64_t>(height) * static_cast<std::uint64_t>(width);
}

void check_total(const RleMask& mask) {
  std::uint64_t total = std::accumulate(mask.counts.begin(), mask.counts.end(),
                                        std::uint64_t{0});
  if (total != pixel_count(mask.height, mask.width)) {
    throw RleError("run counts sum to " + std::to_string(total) +
                   ", expected " + std::to_string(mask.height) + "*" +
                   std::to_string(mask.width));
  }
}

}  // namespace

RleMask make_empty_mask(int height, int width) {
  std::uint64_t total = pixel_count(height, width);
  return RleMask{height, width, {static_cast<std::uint32_t>(total)}};
}

RleMask rle_from_counts(int height, int width,
                        std::vector<std::uint32_t> counts) {
  // Fold away zero-length runs, merging the equal-valued neighbours they
  // separate, then re-emit in background-first form.
  std::vector<std::pair<bool, std::uint64_t>> runs;
  bool value = false;
  for (std::uint32_t c : counts) {
    if (c > 0) {
      if (!runs.empty() && runs.back().first == value) {
        runs.back().second += c;
      } else {
        runs.emplace_back(value, c);
      }
    }
    value = !value;
  }
  std::vector<std::uint32_t> canon;
  canon.reserve(runs.size() + 1);
  if (!runs.empty() && runs.front().first) canon.push_back(0);
  for (const auto& [v, len] : runs) {
    if (len > UINT32_MAX) throw RleError("run length overflow");
    canon.push_back(static_cast<std::uint32_t>(len));
  }
  if (canon.empty()) canon.push_back(0);
  RleMask mask{height, width, std::move(canon)};
  check_total(mask);
  return mask;
}

std::uint64_t area(const RleMask& mask) {
  std::uint64_t a = 0;
  for (std::size_t i = 1; i < mask.counts.size(); i += 2) a += mask.counts[i];
  return a;
}

Bitmask decode(const RleMask& mask) {
  check_total(mask);
  std::uint64_t total = pixel_count(mask.height, mask.width);
  Bitmask grid{mask.height, mask.width,
               std::vector<std::uint8_t>(total, 0)};
  std::uint64_t pos = 0;
  bool value = false;
  for (std::uint32_t c : mask.counts) {
    if (value) std::fill_n(grid.data.begin() + pos, c, std::uint8_t{1});
    pos += c;
    value = !value;
  }
  return grid;
}

RleMask encode(const Bitmask& grid) {
  std::uint64_t total = pixel_count(grid.height, grid.width);
  std::vector<std::uint32_t> counts;
  std::uint8_t prev = 0;
  std::uint32_t run = 0;
  for (std::uint64_t i = 0; i < total; ++i) {
    std::uint8_t v = grid.data[i] ? 1 : 0;
    if (v != prev) {
      counts.push_back(run);
      run = 0;
      prev = v;
    }
    ++run;
  }
  counts.push_back(run);
  return RleMask{grid.height, grid.width, std::move(counts)};
}

namespace {

// Shared merge over two aligned run lists. Op receives the two current values
// and the overlap length of the current segment.
template <typename Op>
std::uint64_t merge_runs(const RleMask& a, const RleMask& b, Op op) {
  if (a.height != b.height || a.width != b.width) {
    throw RleError("mask dimension mismatch: " + std::to_string(a.height) +
                   "x" + std::to_string(a.width) + " vs " +
                   std::to_string(b.height) + "x" + std::to_string(b.width));
  }
  std::uint64_t acc = 0;
  std::size_t ia = 0, ib = 0;
  std::uint64_t ca = 0, cb = 0;
  bool va = true, vb = true;  // flipped to false when the first run loads
  std::uint64_t remaining = pixel_count(a.height, a.width);
  while (remaining > 0) {
    while (ca == 0 && ia < a.counts.size()) {
      ca = a.counts[ia++];
      va = !va;
    }
    while (cb == 0 && ib < b.counts.size()) {
      cb = b.counts[ib++];
      vb = !vb;
    }
    std::uint64_t step = std::min(ca, cb);
    if (step == 0 || step > remaining) {
      throw RleError("run counts do not cover the mask");
    }
    acc += op(va, vb) ? step : 0;
    ca -= step;
    cb -= step;
    remaining -= step;
  }
  return acc;
}

}  // namespace

std::uint64_t intersect_area(const RleMask& a, const RleMask& b) {
  return merge_runs(a, b, [](bool x, bool y) { return x && y; });
}

std::uint64_t union_area(const RleMask& a, const RleMask& b) {
  return merge_runs(a, b, [](bool x, bool y) { return x || y; });
}

// The compressed form stores each count in little-endian 5-bit groups, sixth
// bit flags continuation, all offset into printable range by 48. From the
// fourth count on, the stored value is the difference against the count two
// positions back, which keeps alternating-run deltas small.
std::string rle_to_string(const RleMask& mask) {
  std::string s;
  s.reserve(mask.counts.size() * 2);
  for (std::size_t i = 0; i < mask.counts.size(); ++i) {
    std::int64_t x = mask.counts[i];
    if (i > 2) x -= static_cast<std::int64_t>(mask.counts[i - 2]);
    bool more = true;
    while (more) {
      char c = static_cast<char>(x & 0x1f);
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      c += 48;
      s.push_back(c);
    }
  }
  return s;
}

RleMask rle_from_string(int height, int width, const std::string& s) {
  std::vector<std::uint32_t> counts;
  std::size_t p = 0;
  while (p < s.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= s.size()) throw RleError("truncated compressed RLE string");
      char c = static_cast<char>(s[p] - 48);
      if (c < 0 || c > 0x3f) {
        throw RleError("invalid character in compressed RLE string");
      }
      x |= static_cast<std::int64_t>(c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) x |= ~std::int64_t{0} << (5 * k);
    }
    if (counts.size() > 2) {
      x += static_cast<std::int64_t>(counts[counts.size() - 2]);
    }
    if (x < 0 || x > UINT32_MAX) {
      throw RleError("run count out of range in compressed RLE string");
    }
    counts.push_back(static_cast<std::uint32_t>(x));
  }
  return rle_from_counts(height, width, std::move(counts));
}

}  // namespace visdiag
