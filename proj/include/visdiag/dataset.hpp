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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "visdiag/config.hpp"
#include "visdiag/rle.hpp"

namespace visdiag {

/// Structural problems that prevent building the track model at all:
/// unreadable files, missing keys, RLE decode failures, dangling references.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VideoClip {
  int id = 0;
  int length = 0;  // frame count T
  int height = 0;
  int width = 0;
  std::vector<std::string> frame_names;

  bool operator==(const VideoClip&) const = default;
};

/// A ground-truth mask sequence. `masks` always has exactly T entries;
/// frames where the instance is absent hold an all-background mask.
struct InstanceTrack {
  int id = 0;
  int video_id = 0;
  int category_id = 0;
  bool iscrowd = false;
  std::vector<RleMask> masks;
  int first_frame = -1;  // first/last frame with a non-empty mask
  int last_frame = -1;
  int visible_frames = 0;

  bool operator==(const InstanceTrack&) const = default;
};

/// A predicted mask sequence with a confidence score. Same padding rule as
/// ground truth. `source_index` is the position in the input file and breaks
/// score ties deterministically.
struct TrackPrediction {
  int video_id = 0;
  int category_id = 0;
  double score = 0.0;
  std::vector<RleMask> masks;
  int first_frame = -1;
  int last_frame = -1;
  int visible_frames = 0;
  int source_index = 0;

  bool operator==(const TrackPrediction&) const = default;
};

template <typename Track>
int temporal_length(const Track& t, TemporalLengthMode mode) {
  if (t.visible_frames == 0) return 0;
  return mode == TemporalLengthMode::kVisible ? t.visible_frames
                                              : t.last_frame - t.first_frame + 1;
}

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

struct Dataset {
  std::vector<VideoClip> videos;            // input order
  std::map<int, std::string> categories;    // id -> name
  std::vector<InstanceTrack> gt_tracks;
  std::vector<TrackPrediction> predictions;
  std::vector<std::string> load_warnings;   // zero-area masks and the like

  const VideoClip& video(int video_id) const;
  bool has_video(int video_id) const;
};

/// Parses a ground-truth annotation file (videos/annotations/categories).
/// Null per-frame segmentations become empty masks and every track is padded
/// to its video's length. Throws SchemaError naming the offending entry.
Dataset load_ground_truth(const std::filesystem::path& path);

/// Parses a prediction file against already-loaded videos/categories.
/// Throws SchemaError listing entries with unknown video or category ids.
std::vector<TrackPrediction> load_predictions(const std::filesystem::path& path,
                                              const Dataset& base,
                                              std::vector<std::string>* warnings = nullptr);

/// Semantic checks on a loaded dataset: duplicate ids, score ranges,
/// dimension mismatches, all-empty ground-truth tracks. Warnings do not
/// block evaluation; errors do.
ValidationReport validate(const Dataset& dataset);

nlohmann::json ground_truth_to_json(const Dataset& dataset);
nlohmann::json predictions_to_json(const std::vector<TrackPrediction>& preds);

void save_ground_truth(const Dataset& dataset, const std::filesystem::path& path);
void save_predictions(const std::vector<TrackPrediction>& preds,
                      const std::filesystem::path& path);

}  // namespace visdiag
