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

#include "visdiag/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace visdiag {

using nlohmann::json;

const VideoClip& Dataset::video(int video_id) const {
  for (const auto& v : videos) {
    if (v.id == video_id) return v;
  }
  throw SchemaError("unknown video id " + std::to_string(video_id));
}

bool Dataset::has_video(int video_id) const {
  return std::any_of(videos.begin(), videos.end(),
                     [&](const VideoClip& v) { return v.id == video_id; });
}

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw SchemaError("cannot open " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return j;
}

// One frame's segmentation: {"size": [h, w], "counts": "<string>" | [ints]}.
RleMask parse_rle(const json& seg, const std::string& context) {
  try {
    if (!seg.contains("size") || !seg.contains("counts")) {
      throw SchemaError(context + ": segmentation needs size and counts");
    }
    const auto& size = seg.at("size");
    if (!size.is_array() || size.size() != 2) {
      throw SchemaError(context + ": segmentation size must be [h, w]");
    }
    int h = size[0].get<int>();
    int w = size[1].get<int>();
    const auto& counts = seg.at("counts");
    if (counts.is_string()) {
      return rle_from_string(h, w, counts.get<std::string>());
    }
    if (counts.is_array()) {
      return rle_from_counts(h, w, counts.get<std::vector<std::uint32_t>>());
    }
    throw SchemaError(context + ": counts must be a string or an array");
  } catch (const RleError& e) {
    throw SchemaError(context + ": " + e.what());
  } catch (const json::exception& e) {
    throw SchemaError(context + ": " + e.what());
  }
}

// Builds the padded length-T mask list and fills the temporal extent.
template <typename Track>
void fill_masks(Track& track, const json& segs, const VideoClip& video,
                const std::string& context,
                std::vector<std::string>& warnings) {
  if (!segs.is_array()) {
    throw SchemaError(context + ": segmentations must be an array");
  }
  if (static_cast<int>(segs.size()) > video.length) {
    throw SchemaError(context + ": more segmentations than video frames (" +
                      std::to_string(segs.size()) + " > " +
                      std::to_string(video.length) + ")");
  }
  track.masks.reserve(video.length);
  for (std::size_t t = 0; t < segs.size(); ++t) {
    if (segs[t].is_null()) {
      track.masks.push_back(make_empty_mask(video.height, video.width));
      continue;
    }
    RleMask m = parse_rle(segs[t], context + " frame " + std::to_string(t));
    if (area(m) == 0) {
      warnings.push_back(context + " frame " + std::to_string(t) +
                         ": zero-area mask");
    }
    track.masks.push_back(std::move(m));
  }
  while (static_cast<int>(track.masks.size()) < video.length) {
    track.masks.push_back(make_empty_mask(video.height, video.width));
  }
  for (int t = 0; t < video.length; ++t) {
    if (area(track.masks[t]) > 0) {
      if (track.first_frame < 0) track.first_frame = t;
      track.last_frame = t;
      ++track.visible_frames;
    }
  }
}

json rle_to_json(const RleMask& m) {
  return json{{"size", {m.height, m.width}}, {"counts", rle_to_string(m)}};
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

Dataset load_ground_truth(const std::filesystem::path& path) {
  json j = read_json_file(path);
  for (const char* key : {"videos", "annotations", "categories"}) {
    if (!j.contains(key) || !j.at(key).is_array()) {
      throw SchemaError(path.string() + ": missing array '" + key + "'");
    }
  }

  Dataset ds;
  for (const auto& v : j.at("videos")) {
    VideoClip clip;
    try {
      clip.id = v.at("id").get<int>();
      clip.height = v.at("height").get<int>();
      clip.width = v.at("width").get<int>();
      if (v.contains("file_names")) {
        clip.frame_names = v.at("file_names").get<std::vector<std::string>>();
      }
      if (v.contains("length")) {
        clip.length = v.at("length").get<int>();
      } else if (!clip.frame_names.empty()) {
        clip.length = static_cast<int>(clip.frame_names.size());
      } else {
        throw SchemaError("video " + std::to_string(clip.id) +
                          ": neither length nor file_names given");
      }
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ": video entry: " + e.what());
    }
    ds.videos.push_back(std::move(clip));
  }

  for (const auto& c : j.at("categories")) {
    try {
      int id = c.at("id").get<int>();
      if (ds.categories.count(id)) {
        throw SchemaError(path.string() + ": duplicate category id " +
                          std::to_string(id));
      }
      ds.categories[id] = c.at("name").get<std::string>();
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ": category entry: " + e.what());
    }
  }

  for (const auto& a : j.at("annotations")) {
    InstanceTrack track;
    std::string context;
    try {
      track.id = a.at("id").get<int>();
      context = "annotation " + std::to_string(track.id);
      track.video_id = a.at("video_id").get<int>();
      track.category_id = a.at("category_id").get<int>();
      track.iscrowd = a.value("iscrowd", 0) != 0;
      if (!a.contains("segmentations")) {
        throw SchemaError(context + ": missing segmentations");
      }
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ": annotation entry: " + e.what());
    }
    if (!ds.has_video(track.video_id)) {
      throw SchemaError(context + ": dangling video_id " +
                        std::to_string(track.video_id));
    }
    if (!ds.categories.count(track.category_id)) {
      throw SchemaError(context + ": unknown category_id " +
                        std::to_string(track.category_id));
    }
    fill_masks(track, a.at("segmentations"), ds.video(track.video_id), context,
               ds.load_warnings);
    ds.gt_tracks.push_back(std::move(track));
  }
  return ds;
}

std::vector<TrackPrediction> load_predictions(const std::filesystem::path& path,
                                              const Dataset& base,
                                              std::vector<std::string>* warnings) {
  json j = read_json_file(path);
  if (!j.is_array()) {
    throw SchemaError(path.string() + ": prediction file must be a JSON array");
  }
  std::vector<TrackPrediction> preds;
  std::vector<std::string> bad_video, bad_category;
  // First pass rejects dangling references so the error can list all of them.
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& p = j[i];
    try {
      int vid = p.at("video_id").get<int>();
      int cat = p.at("category_id").get<int>();
      if (!base.has_video(vid)) {
        bad_video.push_back("entry " + std::to_string(i) + " (video_id " +
                            std::to_string(vid) + ")");
      }
      if (!base.categories.count(cat)) {
        bad_category.push_back("entry " + std::to_string(i) + " (category_id " +
                               std::to_string(cat) + ")");
      }
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ": entry " + std::to_string(i) + ": " +
                        e.what());
    }
  }
  if (!bad_video.empty() || !bad_category.empty()) {
    std::ostringstream os;
    os << path.string() << ":";
    if (!bad_video.empty()) {
      os << " unknown video_id in:";
      for (const auto& s : bad_video) os << " " << s << ";";
    }
    if (!bad_category.empty()) {
      os << " unknown category_id in:";
      for (const auto& s : bad_category) os << " " << s << ";";
    }
    throw SchemaError(os.str());
  }

  std::vector<std::string> local_warnings;
  std::vector<std::string>& sink = warnings ? *warnings : local_warnings;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& p = j[i];
    TrackPrediction pred;
    pred.source_index = static_cast<int>(i);
    std::string context = "prediction " + std::to_string(i);
    try {
      pred.video_id = p.at("video_id").get<int>();
      pred.category_id = p.at("category_id").get<int>();
      pred.score = p.at("score").get<double>();
      if (!p.contains("segmentations")) {
        throw SchemaError(context + ": missing segmentations");
      }
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ": " + context + ": " + e.what());
    }
    fill_masks(pred, p.at("segmentations"), base.video(pred.video_id), context,
               sink);
    preds.push_back(std::move(pred));
  }
  return preds;
}

ValidationReport validate(const Dataset& ds) {
  ValidationReport report;
  report.warnings = ds.load_warnings;

  std::set<int> video_ids;
  std::unordered_map<int, const VideoClip*> by_id;
  for (const auto& v : ds.videos) {
    if (!video_ids.insert(v.id).second) {
      report.errors.push_back("duplicate video id " + std::to_string(v.id));
    }
    by_id[v.id] = &v;
    if (v.height <= 0 || v.width <= 0) {
      report.errors.push_back("video " + std::to_string(v.id) +
                              ": non-positive dimensions");
    }
    if (v.length < 1) {
      report.errors.push_back("video " + std::to_string(v.id) +
                              ": length must be >= 1");
    }
    if (!v.frame_names.empty() &&
        static_cast<int>(v.frame_names.size()) != v.length) {
      report.warnings.push_back("video " + std::to_string(v.id) +
                                ": file_names count differs from length");
    }
  }

  std::set<int> track_ids;
  for (const auto& g : ds.gt_tracks) {
    std::string who = "annotation " + std::to_string(g.id);
    if (!track_ids.insert(g.id).second) {
      report.errors.push_back("duplicate " + who);
    }
    const VideoClip* v = by_id.count(g.video_id) ? by_id[g.video_id] : nullptr;
    if (!v) {
      report.errors.push_back(who + ": dangling video_id");
      continue;
    }
    if (static_cast<int>(g.masks.size()) != v->length) {
      report.errors.push_back(who + ": mask list length differs from video length");
    }
    for (std::size_t t = 0; t < g.masks.size(); ++t) {
      if (g.masks[t].height != v->height || g.masks[t].width != v->width) {
        report.errors.push_back(who + " frame " + std::to_string(t) +
                                ": mask size differs from video size");
        break;
      }
    }
    if (g.visible_frames == 0 && !g.iscrowd) {
      report.errors.push_back(who + ": ground-truth track has no non-empty frames");
    }
  }

  std::unordered_map<std::uint64_t, int> pred_seen;
  for (const auto& p : ds.predictions) {
    std::string who = "prediction " + std::to_string(p.source_index);
    if (p.score < 0.0 || p.score > 1.0) {
      report.errors.push_back(who + ": score " + std::to_string(p.score) +
                              " outside [0, 1]");
    }
    const VideoClip* v = by_id.count(p.video_id) ? by_id[p.video_id] : nullptr;
    if (!v) {
      report.errors.push_back(who + ": dangling video_id");
      continue;
    }
    if (static_cast<int>(p.masks.size()) != v->length) {
      report.errors.push_back(who + ": mask list length differs from video length");
    }
    for (std::size_t t = 0; t < p.masks.size(); ++t) {
      if (p.masks[t].height != v->height || p.masks[t].width != v->width) {
        report.errors.push_back(who + " frame " + std::to_string(t) +
                                ": mask size differs from video size");
        break;
      }
    }
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, &p.video_id, sizeof p.video_id);
    h = fnv1a(h, &p.category_id, sizeof p.category_id);
    h = fnv1a(h, &p.score, sizeof p.score);
    for (const auto& m : p.masks) {
      h = fnv1a(h, m.counts.data(), m.counts.size() * sizeof(std::uint32_t));
    }
    auto [it, inserted] = pred_seen.emplace(h, p.source_index);
    if (!inserted) {
      report.warnings.push_back(who + ": duplicate of prediction " +
                                std::to_string(it->second));
    }
  }
  return report;
}

json ground_truth_to_json(const Dataset& ds) {
  json videos = json::array();
  for (const auto& v : ds.videos) {
    json jv{{"id", v.id},
            {"width", v.width},
            {"height", v.height},
            {"length", v.length}};
    if (!v.frame_names.empty()) jv["file_names"] = v.frame_names;
    videos.push_back(std::move(jv));
  }
  json cats = json::array();
  for (const auto& [id, name] : ds.categories) {
    cats.push_back(json{{"id", id}, {"name", name}});
  }
  json anns = json::array();
  for (const auto& g : ds.gt_tracks) {
    json segs = json::array();
    for (const auto& m : g.masks) {
      segs.push_back(area(m) == 0 ? json(nullptr) : rle_to_json(m));
    }
    anns.push_back(json{{"id", g.id},
                        {"video_id", g.video_id},
                        {"category_id", g.category_id},
                        {"iscrowd", g.iscrowd ? 1 : 0},
                        {"segmentations", std::move(segs)}});
  }
  return json{{"videos", std::move(videos)},
              {"annotations", std::move(anns)},
              {"categories", std::move(cats)}};
}

json predictions_to_json(const std::vector<TrackPrediction>& preds) {
  json out = json::array();
  for (const auto& p : preds) {
    json segs = json::array();
    for (const auto& m : p.masks) {
      segs.push_back(area(m) == 0 ? json(nullptr) : rle_to_json(m));
    }
    out.push_back(json{{"video_id", p.video_id},
                       {"category_id", p.category_id},
                       {"score", p.score},
                       {"segmentations", std::move(segs)}});
  }
  return out;
}

namespace {
void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << j.dump() << "\n";
}
}  // namespace

void save_ground_truth(const Dataset& ds, const std::filesystem::path& path) {
  write_json_file(ground_truth_to_json(ds), path);
}

void save_predictions(const std::vector<TrackPrediction>& preds,
                      const std::filesystem::path& path) {
  write_json_file(predictions_to_json(preds), path);
}

}  // namespace visdiag
