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

#include "visdiag/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace visdiag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kIntMax = std::numeric_limits<int>::max();

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Column cell: fixed 2-decimal metrics, em-dash-free "n/a" for gaps.
std::string cell(double v) { return std::isfinite(v) ? fmt2(v) : "n/a"; }

double ap_in_sweep(const std::vector<double>& ap,
                   const std::vector<double>& sweep, double thr) {
  for (std::size_t i = 0; i < sweep.size(); ++i)
    if (std::abs(sweep[i] - thr) < 1e-9) return ap[i];
  return kNaN;
}

double category_mean_ap(const CategoryEval& cat) {
  if (cat.n_gt == 0 || cat.ap.empty()) return kNaN;
  double sum = 0.0;
  for (double v : cat.ap) sum += v;
  return sum / static_cast<double>(cat.ap.size());
}

// Mean over categories with ground truth of their AP at one threshold;
// the same skip rule the evaluator uses for map_per_iou.
double mean_ap_at(const std::vector<CategoryEval>& cats,
                  const std::vector<double>& sweep, double thr) {
  double sum = 0.0;
  int n = 0;
  for (const auto& cat : cats) {
    if (cat.n_gt == 0) continue;
    double v = ap_in_sweep(cat.ap, sweep, thr);
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n > 0 ? sum / n : kNaN;
}

nlohmann::json counts_json(const std::array<int, kErrorKindCount>& counts) {
  nlohmann::json o = nlohmann::json::object();
  for (ErrorKind k : kAllErrorKinds) o[to_string(k)] = count_of(counts, k);
  return o;
}

nlohmann::json weights_json(const WeightReport& w) {
  nlohmann::json o = nlohmann::json::object();
  for (ErrorKind k : kAllErrorKinds) o[to_string(k)] = w.weight(k);
  return o;
}

std::string category_name(const Dataset& ds, int id) {
  auto it = ds.categories.find(id);
  return it != ds.categories.end() ? it->second : std::to_string(id);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// --- manifest ---------------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(),
                  nullptr))
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

RunManifest make_manifest(const EvalConfig& cfg,
                          const std::filesystem::path& gt_path,
                          const std::filesystem::path& pred_path) {
  RunManifest m;
  m.config = cfg;
  m.gt_path = gt_path.string();
  m.gt_sha256 = sha256_file(gt_path);
  m.pred_path = pred_path.string();
  m.pred_sha256 = sha256_file(pred_path);
  return m;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  const EvalConfig& c = m.config;
  return nlohmann::json{
      {"tool", m.tool},
      {"version", m.version},
      {"config",
       {{"thr_f", c.thr_f},
        {"thr_b", c.thr_b},
        {"thr_spat", c.thr_spat},
        {"thr_temp", c.thr_temp},
        {"iou_sweep", c.iou_sweep},
        {"max_dets", c.max_dets},
        {"range_bins", c.range_bins.edges},
        {"temporal_length_mode", to_string(c.length_mode)},
        {"temporal_union_mode", to_string(c.union_mode)},
        {"weight_full_sweep", c.weight_full_sweep}}},
      {"inputs",
       {{"ground_truth", {{"path", m.gt_path}, {"sha256", m.gt_sha256}}},
        {"predictions",
         {{"path", m.pred_path}, {"sha256", m.pred_sha256}}}}}};
}

// --- JSON documents ---------------------------------------------------------

nlohmann::json summary_to_json(const ReportBundle& b) {
  const EvalResult& g = b.report.global;
  const WeightReport& w = b.report.global_weights;

  nlohmann::json per_iou = nlohmann::json::object();
  for (std::size_t i = 0; i < g.iou_sweep.size(); ++i)
    per_iou[fmt2(g.iou_sweep[i])] = g.map_per_iou[i];

  nlohmann::json cats = nlohmann::json::array();
  for (const auto& cat : g.per_category) {
    cats.push_back({{"id", cat.category_id},
                    {"name", category_name(b.dataset, cat.category_id)},
                    {"n_gt", cat.n_gt},
                    {"map", category_mean_ap(cat)},
                    {"ap50", ap_in_sweep(cat.ap, g.iou_sweep, 0.50)},
                    {"ap75", ap_in_sweep(cat.ap, g.iou_sweep, 0.75)}});
  }

  nlohmann::json bins = nlohmann::json::array();
  for (const auto& bin : b.report.bins) {
    bins.push_back(
        {{"label", bin.label},
         {"lo", bin.lo},
         {"hi", bin.hi == kIntMax ? nlohmann::json() : nlohmann::json(bin.hi)},
         {"n_gt", bin.n_gt},
         {"n_pred", bin.n_pred},
         {"applicable", bin.applicable},
         {"map", bin.map},
         {"ap50", bin.ap50}});
  }

  return nlohmann::json{
      {"manifest", manifest_to_json(b.manifest)},
      {"inputs",
       {{"n_videos", b.dataset.videos.size()},
        {"n_categories", b.dataset.categories.size()},
        {"n_gt_tracks", b.dataset.gt_tracks.size()},
        {"n_predictions", b.dataset.predictions.size()}}},
      {"metrics",
       {{"map", g.map},
        {"ap50", g.ap50},
        {"ap75", g.ap75},
        {"ar1", g.ar1},
        {"ar10", g.ar10},
        {"ar_max", g.ar_max},
        {"n_gt", g.n_gt},
        {"map_per_iou", std::move(per_iou)}}},
      {"per_category", std::move(cats)},
      {"errors",
       {{"threshold", w.threshold},
        {"base_ap50", w.base_ap},
        {"fix_all_ap50", w.fix_all_ap},
        {"counts", counts_json(b.report.global_errors.counts)},
        {"weights", weights_json(w)}}},
      {"ranges", std::move(bins)}};
}

nlohmann::json weights_to_json(const ReportBundle& b) {
  const WeightReport& w = b.report.global_weights;
  nlohmann::json j{{"manifest", manifest_to_json(b.manifest)},
                   {"threshold", w.threshold},
                   {"base_ap50", w.base_ap},
                   {"fix_all_ap50", w.fix_all_ap},
                   {"weights", weights_json(w)},
                   {"counts", counts_json(b.report.global_errors.counts)}};
  if (!w.sweep.empty()) {
    nlohmann::json per_iou = nlohmann::json::object();
    for (const WeightSweepRow& row : w.sweep) {
      nlohmann::json kinds = nlohmann::json::object();
      for (ErrorKind k : kAllErrorKinds) kinds[to_string(k)] = row.weight(k);
      per_iou[fmt2(row.threshold)] = {{"base_ap", row.base_ap},
                                      {"fix_all_ap", row.fix_all_ap},
                                      {"weights", kinds}};
    }
    j["weights_per_iou"] = per_iou;
  }
  return j;
}

nlohmann::json ranges_to_json(const ReportBundle& b) {
  const EvalResult& g = b.report.global;
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& bin : b.report.bins) {
    bins.push_back(
        {{"label", bin.label},
         {"lo", bin.lo},
         {"hi", bin.hi == kIntMax ? nlohmann::json() : nlohmann::json(bin.hi)},
         {"n_gt", bin.n_gt},
         {"n_pred", bin.n_pred},
         {"applicable", bin.applicable},
         {"map", bin.map},
         {"ap50", bin.ap50},
         {"fix_all_ap50", bin.weights.fix_all_ap},
         {"counts", counts_json(bin.error_counts)},
         {"weights", weights_json(bin.weights)}});
  }
  return nlohmann::json{
      {"manifest", manifest_to_json(b.manifest)},
      {"bins", std::move(bins)},
      {"global",
       {{"map", g.map},
        {"ap50", g.ap50},
        {"n_gt", g.n_gt},
        {"base_ap50", b.report.global_weights.base_ap},
        {"fix_all_ap50", b.report.global_weights.fix_all_ap},
        {"counts", counts_json(b.report.global_errors.counts)},
        {"weights", weights_json(b.report.global_weights)}}}};
}

std::string errors_to_jsonl(const ReportBundle& b) {
  std::string out;
  for (const auto& rec : b.report.global_errors.records) {
    out += error_record_to_json(rec).dump();
    out += '\n';
  }
  return out;
}

// --- CSV --------------------------------------------------------------------

std::string report_to_csv(const ReportBundle& b) {
  std::ostringstream out;
  out << "bin,lo,hi,category_id,category,n_gt,map,ap50,ap75";
  for (ErrorKind k : kAllErrorKinds) out << ",w_" << to_string(k);
  for (ErrorKind k : kAllErrorKinds) out << ",n_" << to_string(k);
  out << "\n";

  auto metric = [](double v) { return std::isfinite(v) ? fmt2(v) : ""; };
  auto all_row = [&](const std::string& bin, const std::string& lo,
                     const std::string& hi, int n_gt, double map, double ap50,
                     double ap75, const WeightReport& w,
                     const std::array<int, kErrorKindCount>& counts,
                     bool applicable) {
    out << bin << "," << lo << "," << hi << ",,ALL," << n_gt << ","
        << metric(map) << "," << metric(ap50) << "," << metric(ap75);
    for (ErrorKind k : kAllErrorKinds)
      out << "," << metric(applicable ? w.weight(k) : kNaN);
    for (ErrorKind k : kAllErrorKinds)
      out << "," << (applicable ? std::to_string(count_of(counts, k)) : "");
    out << "\n";
  };
  auto cat_rows = [&](const std::string& bin, const std::string& lo,
                      const std::string& hi,
                      const std::vector<CategoryEval>& cats,
                      const std::vector<double>& sweep) {
    for (const auto& cat : cats) {
      out << bin << "," << lo << "," << hi << "," << cat.category_id << ","
          << csv_escape(category_name(b.dataset, cat.category_id)) << ","
          << cat.n_gt << "," << metric(category_mean_ap(cat)) << ","
          << metric(ap_in_sweep(cat.ap, sweep, 0.50)) << ","
          << metric(ap_in_sweep(cat.ap, sweep, 0.75));
      for (int i = 0; i < 2 * kErrorKindCount; ++i) out << ",";
      out << "\n";
    }
  };

  const EvalResult& g = b.report.global;
  all_row("global", "", "", g.n_gt, g.map, g.ap50, g.ap75,
          b.report.global_weights, b.report.global_errors.counts, true);
  cat_rows("global", "", "", g.per_category, g.iou_sweep);

  for (const auto& bin : b.report.bins) {
    std::string lo = std::to_string(bin.lo);
    std::string hi = bin.hi == kIntMax ? "inf" : std::to_string(bin.hi);
    all_row(csv_escape(bin.label), lo, hi, bin.n_gt, bin.map, bin.ap50,
            mean_ap_at(bin.per_category, g.iou_sweep, 0.75), bin.weights,
            bin.error_counts, bin.applicable);
    cat_rows(csv_escape(bin.label), lo, hi, bin.per_category, g.iou_sweep);
  }
  return out.str();
}

// --- terminal table ---------------------------------------------------------

std::string terminal_table(const ReportBundle& b) {
  const EvalResult& g = b.report.global;
  const WeightReport& w = b.report.global_weights;
  std::ostringstream out;
  char line[160];

  out << kToolName << " " << b.manifest.version << "\n";
  out << "ground truth : " << b.manifest.gt_path << "  ("
      << b.dataset.videos.size() << " videos, " << b.dataset.categories.size()
      << " categories, " << b.dataset.gt_tracks.size() << " tracks)\n";
  out << "predictions  : " << b.manifest.pred_path << "  ("
      << b.dataset.predictions.size() << " tracks)\n\n";

  std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %8s %8s %8s\n", "",
                "mAP", "AP@50", "AP@75", "AR@1", "AR@10", "AR@max");
  out << line;
  std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %8s %8s %8s\n",
                "overall", cell(g.map).c_str(), cell(g.ap50).c_str(),
                cell(g.ap75).c_str(), cell(g.ar1).c_str(),
                cell(g.ar10).c_str(), cell(g.ar_max).c_str());
  out << line;

  out << "\nerror decomposition at IoU " << fmt2(w.threshold) << "   base AP "
      << cell(w.base_ap) << "   fix-all " << cell(w.fix_all_ap) << "\n";
  std::snprintf(line, sizeof line, "  %-6s %7s %8s\n", "kind", "count",
                "weight");
  out << line;
  for (ErrorKind k : kAllErrorKinds) {
    std::snprintf(line, sizeof line, "  %-6s %7d %8s\n",
                  to_string(k).c_str(),
                  count_of(b.report.global_errors.counts, k),
                  cell(w.weight(k)).c_str());
    out << line;
  }

  out << "\ntemporal-length bins\n";
  std::snprintf(line, sizeof line, "  %-10s %-10s %7s %7s %8s %8s\n", "bin",
                "range", "n_gt", "n_pred", "mAP", "AP@50");
  out << line;
  for (const auto& bin : b.report.bins) {
    std::string range = "[" + std::to_string(bin.lo) + "," +
                        (bin.hi == kIntMax ? "inf" : std::to_string(bin.hi)) +
                        ")";
    std::snprintf(line, sizeof line, "  %-10s %-10s %7d %7d %8s %8s\n",
                  bin.label.c_str(), range.c_str(), bin.n_gt, bin.n_pred,
                  cell(bin.map).c_str(), cell(bin.ap50).c_str());
    out << line;
  }
  return out.str();
}

// --- figures ----------------------------------------------------------------

namespace {

constexpr const char* kKindColors[kErrorKindCount] = {
    "#4878a8", "#e07b39", "#72a86a", "#c85c5c",
    "#8d6cab", "#a08060", "#5aa0b8"};

void svg_open(std::ostringstream& out, int width, int height,
              const ChartOptions& opts) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!opts.timestamp.empty())
    out << "<!-- generated " << opts.timestamp << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
}

void svg_title(std::ostringstream& out, int width, const std::string& title) {
  if (title.empty()) return;
  out << "<text x=\"" << width / 2
      << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
}

// Y axis with four gridlines from 0 to `top`, labels at 2 decimals.
void svg_axis(std::ostringstream& out, int left, int right, int bottom,
              int plot_h, double top) {
  for (int i = 0; i <= 4; ++i) {
    double y = bottom - plot_h * i / 4.0;
    out << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << right
        << "\" y2=\"" << y << "\" stroke=\""
        << (i == 0 ? "#333" : "#ddd") << "\"/>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt2(top * i / 4)
        << "</text>\n";
  }
}

}  // namespace

std::string render_error_chart(const WeightReport& w,
                               const ChartOptions& opts) {
  for (ErrorKind k : kAllErrorKinds) {
    if (!std::isfinite(w.weight(k)))
      throw std::invalid_argument("chart weights must be finite");
  }
  const int width = 640, height = 360;
  const int left = 56, right = width - 20, top_px = 40,
            bottom = height - 44;
  const int plot_h = bottom - top_px;
  double top = 0.0;
  for (ErrorKind k : kAllErrorKinds) top = std::max(top, w.weight(k));
  top = top > 0 ? top * 1.15 : 1.0;

  std::ostringstream out;
  svg_open(out, width, height, opts);
  svg_title(out, width, opts.title);
  svg_axis(out, left, right, bottom, plot_h, top);

  double slot = static_cast<double>(right - left) / kErrorKindCount;
  for (int i = 0; i < kErrorKindCount; ++i) {
    ErrorKind k = kAllErrorKinds[i];
    double v = w.weight(k);
    double bar_w = slot * 0.62;
    double x = left + slot * i + (slot - bar_w) / 2;
    double h = v / top * plot_h;
    out << "<rect x=\"" << fmt2(x) << "\" y=\"" << fmt2(bottom - h)
        << "\" width=\"" << fmt2(bar_w) << "\" height=\"" << fmt2(h)
        << "\" fill=\"" << kKindColors[i] << "\"/>\n";
    out << "<text x=\"" << fmt2(x + bar_w / 2) << "\" y=\""
        << fmt2(bottom - h - 5)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt2(v)
        << "</text>\n";
    out << "<text x=\"" << fmt2(x + bar_w / 2) << "\" y=\"" << bottom + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << to_string(k)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_range_chart(const RangeReport& report,
                               const ChartOptions& opts) {
  const int n_bins = static_cast<int>(report.bins.size());
  const int width = std::clamp(170 * n_bins + 140, 480, 1600);
  const int height = 380;
  const int left = 56, right = width - 20, top_px = 58,
            bottom = height - 44;
  const int plot_h = bottom - top_px;

  double top = 0.0;
  for (const auto& bin : report.bins) {
    if (!bin.applicable) continue;
    for (ErrorKind k : kAllErrorKinds)
      top = std::max(top, bin.weights.weight(k));
  }
  top = top > 0 ? top * 1.15 : 1.0;

  std::ostringstream out;
  svg_open(out, width, height, opts);
  svg_title(out, width, opts.title);
  // Legend: one swatch per kind under the title.
  double lx = left;
  for (int i = 0; i < kErrorKindCount; ++i) {
    out << "<rect x=\"" << fmt2(lx) << "\" y=\"32\" width=\"10\" height=\"10\""
        << " fill=\"" << kKindColors[i] << "\"/>\n";
    out << "<text x=\"" << fmt2(lx + 14)
        << "\" y=\"41\" font-size=\"10\">" << to_string(kAllErrorKinds[i])
        << "</text>\n";
    lx += 24 + 11 * to_string(kAllErrorKinds[i]).size();
  }
  svg_axis(out, left, right, bottom, plot_h, top);

  double slot = n_bins > 0
                    ? static_cast<double>(right - left) / n_bins
                    : static_cast<double>(right - left);
  for (int bi = 0; bi < n_bins; ++bi) {
    const BinMetrics& bin = report.bins[bi];
    double x0 = left + slot * bi;
    out << "<text x=\"" << fmt2(x0 + slot / 2) << "\" y=\"" << bottom + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << bin.label
        << "</text>\n";
    if (!bin.applicable) {
      out << "<text x=\"" << fmt2(x0 + slot / 2) << "\" y=\""
          << fmt2(bottom - plot_h / 2.0)
          << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#888\">"
          << "n/a</text>\n";
      continue;
    }
    double group_w = slot * 0.86;
    double bar_w = group_w / kErrorKindCount;
    for (int i = 0; i < kErrorKindCount; ++i) {
      double v = bin.weights.weight(kAllErrorKinds[i]);
      double x = x0 + (slot - group_w) / 2 + bar_w * i;
      double h = v / top * plot_h;
      out << "<rect x=\"" << fmt2(x) << "\" y=\"" << fmt2(bottom - h)
          << "\" width=\"" << fmt2(bar_w * 0.88) << "\" height=\"" << fmt2(h)
          << "\" fill=\"" << kKindColors[i] << "\"/>\n";
      out << "<text x=\"" << fmt2(x + bar_w * 0.44) << "\" y=\""
          << fmt2(bottom - h - 3)
          << "\" text-anchor=\"middle\" font-size=\"7\">" << fmt2(v)
          << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

// --- bundle writer ----------------------------------------------------------

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << text;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<std::string> write_reports(const ReportBundle& bundle,
                                       const std::filesystem::path& out_dir,
                                       const WriteOptions& opts) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(out_dir / name, text);
    written.push_back(name);
  };

  if (opts.json) {
    emit("summary.json", summary_to_json(bundle).dump(2) + "\n");
    emit("errors.jsonl", errors_to_jsonl(bundle));
    emit("weights.json", weights_to_json(bundle).dump(2) + "\n");
    emit("ranges.json", ranges_to_json(bundle).dump(2) + "\n");
  }
  if (opts.csv) emit("report.csv", report_to_csv(bundle));
  if (opts.svg) {
    ChartOptions chart;
    if (!opts.deterministic) chart.timestamp = utc_timestamp();
    chart.title = "Error weights (&#916;AP@50)";
    emit("error_weights.svg",
         render_error_chart(bundle.report.global_weights, chart));
    chart.title = "Error weights by temporal length";
    emit("range_weights.svg", render_range_chart(bundle.report, chart));
  }
  return written;
}

}  // namespace visdiag
