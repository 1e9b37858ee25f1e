// Copyright 2026 The HFI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Benchmark drivers: detection tasks, corruption sweeps and attribution,
// plus manifest parsing and report emission.
//
// Detection metrics treat real images as the positive class and scores as
// "realness". Attribution treats belonging images as positive and scores
// them by -HFI. Both conventions are written into every report.

#ifndef HFI_EVALUATE_HPP_
#define HFI_EVALUATE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hfi/imaging.hpp"
#include "hfi/metrics.hpp"
#include "hfi/reconstruct.hpp"
#include "hfi/scoring.hpp"

namespace hfi {

enum class Label { kReal, kGenerated };

std::string to_string(Label label);
Label parse_label(std::string_view text);

struct ManifestEntry {
  std::string path;  // as written in the manifest
  Label label = Label::kReal;
  std::string source_model;
  std::string split;
};

struct DatasetManifest {
  std::filesystem::path base;  // relative paths resolve against this
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& e) const;
};

// CSV with header "path,label,source_model[,split]" or a JSON array of
// objects with the same fields, chosen by extension (.json or anything
// else). Throws ParameterError on malformed rows.
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest_csv(const DatasetManifest& manifest, const std::filesystem::path& path);

struct EvalOptions {
  int workers = 1;
  std::uint64_t seed = 0;
  double max_skip_fraction = 0.05;
  int histogram_bins = 20;
  std::string task_id = "task";
  // Receives one line per skipped image.
  std::function<void(const std::string&)> warn;
};

struct MetricRow {
  std::string config;
  std::string reconstructor;
  std::string task;  // "real-vs-<source>" or "real-vs-all"
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double auroc = 0.0;
  double aupr = 0.0;
};

struct RankRow {
  std::string metric;  // "auroc" or "aupr"
  std::string config;
  std::string reconstructor;
  double average_rank = 0.0;
};

struct CurvePoint {
  std::string corruption;  // "jpeg" or "crop"
  double parameter = 0.0;
  std::string config;
  std::string reconstructor;
  double auroc = 0.0;
  double aupr = 0.0;
};

struct HistogramRow {
  std::string config;
  std::string reconstructor;
  std::string population;  // "real" or a source tag
  Histogram histogram;
};

struct SkippedRow {
  std::string path;
  std::string reason;
};

struct EvalReport {
  std::string task_id;
  std::string kind;  // "detection", "corruption-sweep" or "attribution"
  std::uint64_t seed = 0;
  std::vector<ReconstructorHandle> reconstructors;
  std::vector<std::string> configs;
  std::size_t samples = 0;
  std::vector<MetricRow> metrics;
  std::vector<RankRow> ranks;
  std::vector<CurvePoint> curves;
  std::vector<HistogramRow> histograms;
  std::vector<SkippedRow> skipped;
  std::vector<ScoreRecord> records;
  // Excluded from the deterministic report body.
  double wall_seconds = 0.0;
  double seconds_per_sample = 0.0;
};

// Scores every image with every (config, reconstructor) and reports one
// metric row per config × {each reconstructor, ensemble} × task, where the
// tasks are real vs each generated source tag (plus real vs all when there
// are several tags). Unreadable images become skipped rows; more than
// max_skip_fraction skipped raises TaskError.
EvalReport run_task(const DatasetManifest& manifest,
                    const std::vector<ReconstructorHandle>& handles,
                    const std::vector<ScorerConfig>& configs, const EvalOptions& options,
                    const std::optional<CorruptionSpec>& corruption = std::nullopt);

// The default grids: jpeg {95,90,80,70,60,50,40,30}, crop
// {0.95,0.9,0.8,0.7,0.6,0.5}.
std::vector<CorruptionSpec> default_corruption_grid(CorruptionSpec::Kind kind);

// Re-runs the task at every grid point with real and generated images
// corrupted identically, and records one curve point per config ×
// reconstructor (generated sources pooled). A bhfi config is added for the
// first hfi config when none is present.
EvalReport run_corruption_sweep(const DatasetManifest& manifest,
                                const std::vector<ReconstructorHandle>& handles,
                                std::vector<ScorerConfig> configs,
                                const std::vector<CorruptionSpec>& grid,
                                const EvalOptions& options);

// Scores both sets with cfg on the single handle; belonging images are
// the positive class, scored by the negated value. Labels in the manifests
// are ignored.
EvalReport run_attribution(const DatasetManifest& belonging, const DatasetManifest& other,
                           const ReconstructorHandle& handle, const ScorerConfig& cfg,
                           const EvalOptions& options);

// Deterministic JSON body (no timing).
std::string report_json(const EvalReport& report);
// report.json, timing.json, metrics.csv, ranks.csv, curves.csv and
// scores.csv under `dir` (created if needed).
void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace hfi

#endif  // HFI_EVALUATE_HPP_
