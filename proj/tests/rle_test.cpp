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

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "testutil.hpp"

namespace visdiag {
namespace {

using test::encode_naive;
using test::pixel_area;
using test::pixel_intersect;
using test::pixel_union;
using test::random_bitmask;
using test::random_rect_bitmask;

using Counts = std::vector<std::uint32_t>;

TEST(RleMaskTest, EmptyMask) {
  RleMask m = make_empty_mask(4, 5);
  EXPECT_EQ(m.counts, Counts({20}));
  EXPECT_EQ(area(m), 0u);
  EXPECT_TRUE(is_empty(m));
}

TEST(RleMaskTest, FromCountsCanonicalizesZeroRuns) {
  // Interior zero runs merge their neighbours; a leading zero is kept only
  // when the mask starts with foreground.
  EXPECT_EQ(rle_from_counts(1, 6, {0, 0, 6}).counts, Counts({6}));
  EXPECT_EQ(rle_from_counts(1, 5, {2, 0, 3}).counts, Counts({5}));
  EXPECT_EQ(rle_from_counts(1, 5, {0, 2, 0, 3}).counts, Counts({0, 5}));
  EXPECT_EQ(rle_from_counts(1, 6, {1, 2, 3}).counts, Counts({1, 2, 3}));
  EXPECT_EQ(rle_from_counts(1, 6, {1, 2, 3, 0}).counts, Counts({1, 2, 3}));
  EXPECT_EQ(rle_from_counts(1, 6, {0, 6, 0}).counts, Counts({0, 6}));
  // An empty counts list covers nothing; it is not shorthand for all-background.
  EXPECT_THROW(rle_from_counts(2, 3, {}), RleError);
}

TEST(RleMaskTest, FromCountsRejectsBadTotals) {
  EXPECT_THROW(rle_from_counts(2, 3, {5}), RleError);
  EXPECT_THROW(rle_from_counts(2, 3, {0, 7}), RleError);
  EXPECT_THROW(rle_from_counts(0, 3, {0}), RleError);
  EXPECT_THROW(rle_from_counts(2, -1, {0}), RleError);
}

TEST(RleMaskTest, AreaSumsForegroundRuns) {
  EXPECT_EQ(area(rle_from_counts(1, 6, {1, 2, 3})), 2u);
  EXPECT_EQ(area(rle_from_counts(1, 6, {0, 6})), 6u);
  EXPECT_EQ(area(rle_from_counts(3, 4, {2, 2, 2, 2, 2, 2})), 6u);
}

struct CodecCase {
  int height;
  int width;
  Counts counts;
  const char* encoded;
};

// Golden strings frozen from an independent transcription of the published
// COCO maskApi codec; covers single-char runs, multi-char large runs, zero
// deltas ('0') and negative deltas ('O').
const CodecCase kCodecCases[] = {
    {2, 3, {6}, "6"},
    {2, 3, {0, 6}, "06"},
    {2, 3, {1, 2, 3}, "123"},
    {2, 3, {0, 1, 5}, "015"},
    {2, 3, {3, 2, 1}, "321"},
    {3, 4, {2, 2, 2, 2, 2, 2}, "222000"},
    {2, 50127, {0, 100001, 250, 3}, "0QeQ3j7R[nL"},
    {172627, 1, {173, 1, 120, 2, 120, 3, 120, 2, 120, 1, 171965},
     "]51h31010O0OUjW5"},
    {3, 4, {5, 1, 2, 1, 1, 2}, "5120O1"},
};

TEST(RleStringTest, EncodeMatchesGolden) {
  for (const auto& c : kCodecCases) {
    RleMask m{c.height, c.width, c.counts};
    EXPECT_EQ(rle_to_string(m), c.encoded);
  }
}

TEST(RleStringTest, DecodeMatchesGolden) {
  for (const auto& c : kCodecCases) {
    RleMask m = rle_from_string(c.height, c.width, c.encoded);
    EXPECT_EQ(m.counts, c.counts);
    EXPECT_EQ(m.height, c.height);
    EXPECT_EQ(m.width, c.width);
  }
}

TEST(RleStringTest, DecodeRejectsMalformedInput) {
  // Trailing continuation bit.
  EXPECT_THROW(rle_from_string(2, 3, "V"), RleError);
  // Characters outside the 6-bit alphabet.
  EXPECT_THROW(rle_from_string(2, 3, " !"), RleError);
  EXPECT_THROW(rle_from_string(2, 3, "\x7f"), RleError);
  // Well-formed chars whose counts do not cover the mask.
  EXPECT_THROW(rle_from_string(2, 3, "11"), RleError);
  EXPECT_THROW(rle_from_string(2, 3, ""), RleError);
}

TEST(RleStringTest, EmptyAndFullRoundTrip) {
  for (auto [h, w] : {std::pair{1, 1}, {7, 3}, {480, 360}}) {
    RleMask empty = make_empty_mask(h, w);
    EXPECT_EQ(rle_from_string(h, w, rle_to_string(empty)), empty);
    RleMask full = rle_from_counts(
        h, w, {0, static_cast<std::uint32_t>(h) * static_cast<std::uint32_t>(w)});
    EXPECT_EQ(rle_from_string(h, w, rle_to_string(full)), full);
  }
}

TEST(RleOracleTest, EncodeDecodeAgreeWithPixelGrid) {
  std::mt19937_64 rng(0x5eed0001);
  for (int iter = 0; iter < 150; ++iter) {
    int h = 1 + static_cast<int>(rng() % 40);
    int w = 1 + static_cast<int>(rng() % 40);
    double density = static_cast<double>(rng() % 101) / 100.0;
    Bitmask bm = random_bitmask(rng, h, w, density);

    RleMask naive = encode_naive(bm);
    EXPECT_EQ(encode(bm), naive);
    EXPECT_EQ(area(naive), pixel_area(bm));

    Bitmask back = decode(naive);
    EXPECT_EQ(back.data, bm.data);

    RleMask round = rle_from_string(h, w, rle_to_string(naive));
    EXPECT_EQ(round, naive);
  }
}

TEST(RleOracleTest, MergeOpsAgreeWithPixelGrid) {
  std::mt19937_64 rng(0x5eed0002);
  for (int iter = 0; iter < 200; ++iter) {
    int h = 1 + static_cast<int>(rng() % 32);
    int w = 1 + static_cast<int>(rng() % 32);
    Bitmask ba = (iter % 2 == 0) ? random_bitmask(rng, h, w, 0.4)
                                 : random_rect_bitmask(rng, h, w, 3);
    Bitmask bb = (iter % 3 == 0) ? random_bitmask(rng, h, w, 0.6)
                                 : random_rect_bitmask(rng, h, w, 3);
    RleMask a = encode_naive(ba);
    RleMask b = encode_naive(bb);

    std::uint64_t inter = intersect_area(a, b);
    std::uint64_t uni = union_area(a, b);
    EXPECT_EQ(inter, pixel_intersect(ba, bb));
    EXPECT_EQ(uni, pixel_union(ba, bb));
    // Inclusion-exclusion must hold exactly in integers.
    EXPECT_EQ(area(a) + area(b), inter + uni);
    EXPECT_EQ(intersect_area(b, a), inter);
    EXPECT_EQ(union_area(b, a), uni);
  }
}

TEST(RleMergeTest, EdgeCases) {
  RleMask empty = make_empty_mask(6, 6);
  RleMask box = test::rect_mask(6, 6, 1, 1, 4, 5);
  EXPECT_EQ(intersect_area(empty, box), 0u);
  EXPECT_EQ(union_area(empty, box), area(box));
  EXPECT_EQ(intersect_area(box, box), area(box));
  EXPECT_EQ(union_area(box, box), area(box));
  RleMask other_shape = make_empty_mask(6, 7);
  EXPECT_THROW(intersect_area(box, other_shape), RleError);
  // Same pixel count, different shape: runs alone cannot tell these apart,
  // so the dimension check must.
  RleMask transposed = make_empty_mask(9, 4);
  RleMask square = make_empty_mask(6, 6);
  EXPECT_THROW(union_area(square, transposed), RleError);
}

TEST(RleMergeTest, LargeRunsStayExact) {
  // 1080x1920 full-frame masks exercise 64-bit accumulation.
  RleMask full = rle_from_counts(1080, 1920, {0, 1080u * 1920u});
  RleMask half = test::rect_mask(1080, 1920, 0, 0, 1080, 960);
  EXPECT_EQ(intersect_area(full, half), 1080u * 960u);
  EXPECT_EQ(union_area(full, half), 1080u * 1920u);
}

}  // namespace
}  // namespace visdiag
