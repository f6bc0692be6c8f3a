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
#include <stdexcept>
#include <string>
#include <vector>

namespace visdiag {

/// Run-length-encoded binary mask for a single frame.
///
/// Pixels are scanned in column-major order (down each column, then across).
/// `counts` holds alternating run lengths starting with background; a leading
/// zero encodes a mask whose first pixel is foreground. Canonical form has no
/// zero-length runs except that optional leading one, and sum(counts) equals
/// height * width.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  bool operator==(const RleMask&) const = default;
};

/// Dense boolean grid, column-major. `data[col * height + row]` is nonzero
/// for foreground pixels.
struct Bitmask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  bool at(int row, int col) const {
    return data[static_cast<std::size_t>(col) * height + row] != 0;
  }
  void set(int row, int col, bool v) {
    data[static_cast<std::size_t>(col) * height + row] = v ? 1 : 0;
  }
};

/// Thrown when run counts cannot form a valid mask (negative dims, sum
/// mismatch against height*width, or a malformed compressed string).
class RleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All-background mask of the given size.
RleMask make_empty_mask(int height, int width);

/// Builds a mask from raw counts, canonicalizing zero-length runs.
/// Throws RleError if the counts do not sum to height*width.
RleMask rle_from_counts(int height, int width, std::vector<std::uint32_t> counts);

/// Number of foreground pixels; sums odd-indexed runs without decoding.
std::uint64_t area(const RleMask& mask);

inline bool is_empty(const RleMask& mask) { return area(mask) == 0; }

/// Expands a mask into a dense column-major grid.
Bitmask decode(const RleMask& mask);

/// Encodes a dense grid into canonical run-length form. Inverse of decode().
RleMask encode(const Bitmask& grid);

/// |a ∩ b| by a two-pointer merge over the two run lists; never decodes.
/// Throws RleError on dimension mismatch.
std::uint64_t intersect_area(const RleMask& a, const RleMask& b);

/// |a ∪ b| by the same merge with OR semantics.
std::uint64_t union_area(const RleMask& a, const RleMask& b);

/// COCO-compatible compressed counts string (6-bit chars offset by 48,
/// sign-folded deltas against the run two positions back).
std::string rle_to_string(const RleMask& mask);

/// Decodes the compressed string form. Throws RleError on malformed input
/// or when the decoded runs do not cover height*width pixels.
RleMask rle_from_string(int height, int width, const std::string& s);

}  // namespace visdiag
