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

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "visdiag/config.hpp"
#include "visdiag/dataset.hpp"
#include "visdiag/errors.hpp"
#include "visdiag/eval.hpp"
#include "visdiag/parallel.hpp"
#include "visdiag/perturb.hpp"
#include "visdiag/ranges.hpp"
#include "visdiag/report.hpp"

namespace {

using namespace visdiag;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// Flags shared by the subcommands; mirrors EvalConfig plus output control.
struct Flags {
  std::string gt_path;
  std::string pred_path;  // evaluate
  std::string spec_path;  // synth
  EvalConfig cfg;
  std::string iou_sweep;
  std::vector<int> range_bins{16, 32};
  std::string length_mode = "visible";
  std::string out = "visdiag-report";
  std::vector<std::string> formats{"json", "csv", "svg"};
  int threads = 0;
  long long seed = -1;
  bool deterministic = false;
};

void add_config_flags(CLI::App* cmd, Flags* f) {
  cmd->add_option("--thr-f", f->cfg.thr_f,
                  "foreground sequence-IoU threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--thr-b", f->cfg.thr_b,
                  "background sequence-IoU threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--thr-spat", f->cfg.thr_spat,
                  "per-frame IoU bar for a matched frame")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--thr-temp", f->cfg.thr_temp,
                  "temporal-overlap bar splitting Spat from Temp")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--iou-sweep", f->iou_sweep,
                  "AP sweep as lo:step:hi (default 0.5:0.05:0.95)");
  cmd->add_option("--max-dets", f->cfg.max_dets,
                  "top-scored predictions kept per video and category")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--range-bins", f->range_bins,
                  "temporal-length bin edges, e.g. 16,32")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--temporal-length-mode", f->length_mode,
                  "count visible frames or the first-to-last extent")
      ->check(CLI::IsMember({"visible", "extent"}))
      ->capture_default_str();
  cmd->add_option("--threads", f->threads,
                  "worker count (0 = VISDIAG_THREADS or hardware)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

// Applies the string-typed flags onto the config; throws on bad values.
void finish_config(Flags* f) {
  if (!f->iou_sweep.empty())
    f->cfg.iou_sweep = EvalConfig::parse_iou_sweep(f->iou_sweep);
  f->cfg.range_bins.edges = f->range_bins;
  f->cfg.range_bins.validate();
  f->cfg.length_mode = f->length_mode == "extent"
                           ? TemporalLengthMode::kExtent
                           : TemporalLengthMode::kVisible;
}

WriteOptions write_options(const Flags& f) {
  WriteOptions opts;
  opts.json = opts.csv = opts.svg = false;
  for (const std::string& fmt : f.formats) {
    if (fmt == "json")
      opts.json = true;
    else if (fmt == "csv")
      opts.csv = true;
    else if (fmt == "svg")
      opts.svg = true;
    else
      throw std::invalid_argument("unknown --format '" + fmt +
                                  "' (expected json, csv or svg)");
  }
  opts.deterministic = f.deterministic;
  return opts;
}

// Loads and fully validates both inputs before anything is written.
Dataset load_inputs(const Flags& f) {
  Dataset ds = load_ground_truth(f.gt_path);
  ds.predictions = load_predictions(f.pred_path, ds, &ds.load_warnings);
  for (const std::string& w : ds.load_warnings)
    std::cerr << "warning: " << w << "\n";
  ValidationReport report = validate(ds);
  for (const std::string& w : report.warnings)
    std::cerr << "warning: " << w << "\n";
  if (!report.ok()) {
    std::cerr << "validation failed:\n";
    for (const std::string& e : report.errors) std::cerr << "  - " << e << "\n";
    throw SchemaError("invalid input");
  }
  return ds;
}

int run_evaluate(Flags* f) {
  finish_config(f);
  WriteOptions opts = write_options(*f);

  auto t0 = std::chrono::steady_clock::now();
  Dataset ds = load_inputs(*f);
  RunManifest manifest = make_manifest(f->cfg, f->gt_path, f->pred_path);
  manifest.timings_ms["load"] = ms_since(t0);

  auto t1 = std::chrono::steady_clock::now();
  EvalContext ctx(ds, f->cfg, f->threads);
  RangeReport report = range_report(ctx, {}, f->threads);
  manifest.timings_ms["evaluate"] = ms_since(t1);

  auto t2 = std::chrono::steady_clock::now();
  ReportBundle bundle{manifest, ds, report};
  std::vector<std::string> written = write_reports(bundle, f->out, opts);
  manifest.timings_ms["write"] = ms_since(t2);

  std::cout << terminal_table(bundle);
  std::cerr << "wrote " << written.size() << " report files to " << f->out
            << " (load " << manifest.timings_ms["load"] << " ms, evaluate "
            << manifest.timings_ms["evaluate"] << " ms, write "
            << manifest.timings_ms["write"] << " ms, "
            << resolve_threads(f->threads) << " workers)\n";
  return kExitOk;
}

ScoreBand band_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number())
    throw std::invalid_argument("perturb spec: '" + key +
                                "' must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

PerturbSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("perturb spec must be a JSON object");
  PerturbSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      spec.seed = value.get<std::uint64_t>();
    } else if (key == "inject") {
      for (const auto& [kind, count] : value.items())
        count_of(spec.inject, error_kind_from_string(kind)) =
            count.get<int>();
    } else if (key == "erode_radius") {
      spec.erode_radius = value.get<int>();
    } else if (key == "dilate_radius") {
      spec.dilate_radius = value.get<int>();
    } else if (key == "switch_frame") {
      spec.switch_frame = value.get<int>();
    } else if (key == "tp_score") {
      spec.tp_score = band_from_json(value, key);
    } else if (key == "fp_score") {
      spec.fp_score = band_from_json(value, key);
    } else if (key == "non_interacting") {
      spec.non_interacting = value.get<bool>();
    } else {
      throw std::invalid_argument("perturb spec: unknown key '" + key + "'");
    }
  }
  return spec;
}

PerturbSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("malformed perturb spec " + path.string() + ": " +
                      e.what());
  }
  return spec_from_json(j);
}

int run_synth(Flags* f) {
  finish_config(f);
  auto t0 = std::chrono::steady_clock::now();

  Dataset ds = load_ground_truth(f->gt_path);
  PerturbSpec spec = load_spec(f->spec_path);
  if (f->seed >= 0) spec.seed = static_cast<std::uint64_t>(f->seed);

  PerturbResult result = perturb(ds, spec, f->cfg, f->threads);
  std::filesystem::create_directories(f->out);
  std::filesystem::path pred_path =
      std::filesystem::path(f->out) / "predictions.json";
  std::filesystem::path census_path =
      std::filesystem::path(f->out) / "census.json";
  save_predictions(result.predictions, pred_path);
  save_census(result, census_path);

  std::cout << "predictions " << pred_path.string() << "  sha256 "
            << sha256_file(pred_path) << "\n";
  std::cout << "census      " << census_path.string() << "  sha256 "
            << sha256_file(census_path) << "\n";
  std::cout << "tracks " << result.predictions.size() << "  injected";
  for (ErrorKind k : kAllErrorKinds)
    std::cout << " " << to_string(k) << ":" << count_of(result.counts, k);
  std::cout << "\n";
  std::cerr << "synthesized in " << ms_since(t0) << " ms ("
            << resolve_threads(f->threads) << " workers)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"video instance segmentation error analysis"};
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);
  Flags flags;

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score predictions and decompose the misses");
  evaluate->add_option("gt", flags.gt_path, "ground-truth annotation file")
      ->required();
  evaluate->add_option("pred", flags.pred_path, "prediction file")->required();
  add_config_flags(evaluate, &flags);
  evaluate->add_option("--out", flags.out, "report output directory")
      ->capture_default_str();
  evaluate
      ->add_option("--format", flags.formats,
                   "outputs to emit: json, csv and/or svg")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_flag("--weight-full-sweep", flags.cfg.weight_full_sweep,
                     "also compute error weights at every sweep IoU");
  evaluate->add_flag("--deterministic", flags.deterministic,
                     "suppress timestamps so figures are byte-stable");

  CLI::App* synth = app.add_subcommand(
      "synth", "inject a known census of errors into a ground-truth file");
  synth->add_option("gt", flags.gt_path, "ground-truth annotation file")
      ->required();
  synth->add_option("spec", flags.spec_path, "perturbation spec JSON file")
      ->required();
  add_config_flags(synth, &flags);
  synth->add_option("--out", flags.out, "output directory")
      ->capture_default_str();
  synth->add_option("--seed", flags.seed,
                    "override the spec file's random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }

  try {
    return evaluate->parsed() ? run_evaluate(&flags) : run_synth(&flags);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const PerturbError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
