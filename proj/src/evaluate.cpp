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

#include "hfi/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hfi/error.hpp"
#include "hfi/parallel.hpp"

namespace hfi {
namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kSchema = "hfi.eval-report/1";
constexpr const char* kDetectionConvention =
    "positive class = real images; score = realness (higher means more likely real); "
    "classify: real iff score > threshold";
constexpr const char* kAttributionConvention =
    "positive class = belonging images; score = -HFI (belonging images have low HFI)";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string fixed6(double v) { return format_value(v); }

// One scoring pass over a manifest.
struct Pass {
  // results[i][c] for entry i and config c; empty when the entry was skipped.
  std::vector<std::vector<EnsembleResult>> results;
  std::vector<SkippedRow> skipped;
  std::size_t scored = 0;
  double seconds = 0.0;
};

Pass score_entries(const DatasetManifest& manifest, const std::vector<ReconstructorHandle>& handles,
                   const std::vector<ScorerConfig>& configs, const EvalOptions& options,
                   const std::optional<CorruptionSpec>& corruption) {
  if (handles.empty()) throw ParameterError("no reconstructors configured");
  if (configs.empty()) throw ParameterError("no scorer configured");
  for (const auto& h : handles) warm_up(h);
  const std::size_t n = manifest.entries.size();
  Pass pass;
  pass.results.resize(n);
  std::vector<std::string> skip_reason(n);
  const auto start = Clock::now();
  parallel_for(n, options.workers, [&](std::size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    ImageTensor img;
    try {
      img = read_image(manifest.resolve(e));
    } catch (const DecodeError& err) {
      skip_reason[i] = err.what();
      return;
    }
    if (corruption) img = corrupt(img, *corruption);
    std::string id = e.path;
    if (corruption) id += "@" + corruption->to_string();
    std::vector<EnsembleResult> per_config;
    per_config.reserve(configs.size());
    for (const auto& cfg : configs) per_config.push_back(ensemble_score(id, img, handles, cfg));
    pass.results[i] = std::move(per_config);
  });
  pass.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  for (std::size_t i = 0; i < n; ++i) {
    if (!skip_reason[i].empty()) {
      pass.skipped.push_back({manifest.entries[i].path, skip_reason[i]});
      if (options.warn) options.warn("skipped " + manifest.entries[i].path + ": " + skip_reason[i]);
    } else {
      ++pass.scored;
    }
  }
  if (n > 0 && static_cast<double>(pass.skipped.size()) >
                   options.max_skip_fraction * static_cast<double>(n)) {
    throw TaskError(std::to_string(pass.skipped.size()) + " of " + std::to_string(n) +
                    " images could not be read (budget " +
                    std::to_string(static_cast<int>(options.max_skip_fraction * 100 + 0.5)) + "%)");
  }
  return pass;
}

// Score of entry i for config c and reconstructor slot r (r == members ->
// ensemble).
double slot_value(const EnsembleResult& er, std::size_t r) {
  return r < er.members.size() ? er.members[r].value : er.ensemble.value;
}

std::vector<std::string> slot_names(const std::vector<ReconstructorHandle>& handles) {
  std::vector<std::string> names;
  for (const auto& h : handles) names.push_back(h.id);
  names.push_back("ensemble");
  return names;
}

std::string generated_tag(const ManifestEntry& e) {
  return e.source_model.empty() ? std::string("generated") : e.source_model;
}

void append_records(const Pass& pass, EvalReport& report) {
  for (const auto& per_config : pass.results) {
    for (const auto& er : per_config) {
      for (const auto& m : er.members) report.records.push_back(m);
      report.records.push_back(er.ensemble);
    }
  }
}

struct Populations {
  std::vector<double> real;
  std::map<std::string, std::vector<double>> generated;
  std::vector<double> all_generated;
};

Populations collect(const DatasetManifest& manifest, const Pass& pass, std::size_t c,
                    std::size_t r) {
  Populations p;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    if (pass.results[i].empty()) continue;
    const double v = slot_value(pass.results[i][c], r);
    const ManifestEntry& e = manifest.entries[i];
    if (e.label == Label::kReal) {
      p.real.push_back(v);
    } else {
      p.generated[generated_tag(e)].push_back(v);
      p.all_generated.push_back(v);
    }
  }
  if (p.real.empty() || p.all_generated.empty()) {
    throw TaskError("detection metrics need at least one real and one generated image");
  }
  return p;
}

void fill_report_header(EvalReport& report, const std::string& kind,
                        const std::vector<ReconstructorHandle>& handles,
                        const std::vector<ScorerConfig>& configs, const EvalOptions& options) {
  report.task_id = options.task_id;
  report.kind = kind;
  report.seed = options.seed;
  report.reconstructors = handles;
  for (const auto& c : configs) report.configs.push_back(c.label());
}

ojson histogram_json(const Histogram& h) {
  ojson j;
  j["edges"] = h.edges;
  j["counts"] = h.counts;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string to_string(Label label) { return label == Label::kReal ? "real" : "generated"; }

Label parse_label(std::string_view text) {
  if (text == "real") return Label::kReal;
  if (text == "generated") return Label::kGenerated;
  throw ParameterError("label must be 'real' or 'generated', got '" + std::string(text) + "'");
}

std::filesystem::path DatasetManifest::resolve(const ManifestEntry& e) const {
  std::filesystem::path p(e.path);
  return p.is_absolute() ? p : base / p;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open manifest " + path.string());
  DatasetManifest m;
  m.base = path.parent_path();
  const std::string where = "manifest " + path.string();

  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParameterError(where + " is not valid JSON: " + e.what());
    }
    if (!doc.is_array()) throw ParameterError(where + " must be a JSON array");
    for (std::size_t k = 0; k < doc.size(); ++k) {
      const auto& o = doc[k];
      if (!o.is_object() || !o.contains("path") || !o.contains("label")) {
        throw ParameterError(where + ": entry " + std::to_string(k) + " needs path and label");
      }
      ManifestEntry e;
      e.path = o["path"].get<std::string>();
      e.label = parse_label(o["label"].get<std::string>());
      e.source_model = o.value("source_model", std::string());
      e.split = o.value("split", std::string());
      m.entries.push_back(std::move(e));
    }
    return m;
  }

  std::string line;
  if (!std::getline(in, line)) throw ParameterError(where + " is empty");
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int c_path = column("path");
  const int c_label = column("label");
  const int c_source = column("source_model");
  const int c_split = column("split");
  if (c_path < 0 || c_label < 0) {
    throw ParameterError(where + " header must contain path,label,source_model");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    auto get = [&](int c) { return c >= 0 && c < static_cast<int>(f.size()) ? f[c] : std::string(); };
    if (static_cast<int>(f.size()) <= std::max(c_path, c_label)) {
      throw ParameterError(where + ": row " + std::to_string(row) + " has too few fields");
    }
    ManifestEntry e;
    e.path = get(c_path);
    try {
      e.label = parse_label(get(c_label));
    } catch (const ParameterError& err) {
      throw ParameterError(where + ": row " + std::to_string(row) + ": " + err.what());
    }
    e.source_model = get(c_source);
    e.split = get(c_split);
    m.entries.push_back(std::move(e));
  }
  return m;
}

void write_manifest_csv(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "path,label,source_model\n";
  for (const auto& e : manifest.entries) {
    out << csv_field(e.path) << ',' << to_string(e.label) << ',' << csv_field(e.source_model)
        << '\n';
  }
  write_text(path, out.str());
}

EvalReport run_task(const DatasetManifest& manifest,
                    const std::vector<ReconstructorHandle>& handles,
                    const std::vector<ScorerConfig>& configs, const EvalOptions& options,
                    const std::optional<CorruptionSpec>& corruption) {
  EvalReport report;
  fill_report_header(report, "detection", handles, configs, options);
  const Pass pass = score_entries(manifest, handles, configs, options, corruption);
  report.skipped = pass.skipped;
  report.samples = pass.scored;
  report.wall_seconds = pass.seconds;
  report.seconds_per_sample = pass.scored ? pass.seconds / pass.scored : 0.0;
  append_records(pass, report);

  const auto names = slot_names(handles);
  std::vector<std::string> tags;
  // Rank matrix rows in (config, slot) order; columns are per-source tasks.
  std::vector<std::vector<double>> rank_auroc;
  std::vector<std::vector<double>> rank_aupr;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t r = 0; r < names.size(); ++r) {
      const Populations p = collect(manifest, pass, c, r);
      std::vector<double> row_auroc;
      std::vector<double> row_aupr;
      for (const auto& [tag, gen] : p.generated) {
        MetricRow m{report.configs[c], names[r], "real-vs-" + tag, p.real.size(), gen.size(),
                    auroc(p.real, gen), aupr(p.real, gen)};
        row_auroc.push_back(m.auroc);
        row_aupr.push_back(m.aupr);
        report.metrics.push_back(std::move(m));
      }
      if (p.generated.size() > 1) {
        report.metrics.push_back({report.configs[c], names[r], "real-vs-all", p.real.size(),
                                  p.all_generated.size(), auroc(p.real, p.all_generated),
                                  aupr(p.real, p.all_generated)});
      }
      rank_auroc.push_back(std::move(row_auroc));
      rank_aupr.push_back(std::move(row_aupr));

      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      auto extend = [&](const std::vector<double>& v) {
        for (double x : v) {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
      };
      extend(p.real);
      extend(p.all_generated);
      report.histograms.push_back(
          {report.configs[c], names[r], "real", make_histogram(p.real, lo, hi, options.histogram_bins)});
      for (const auto& [tag, gen] : p.generated) {
        report.histograms.push_back(
            {report.configs[c], names[r], tag, make_histogram(gen, lo, hi, options.histogram_bins)});
      }
    }
  }
  const auto ra = average_rank(rank_auroc);
  const auto rp = average_rank(rank_aupr);
  for (std::size_t k = 0; k < ra.size(); ++k) {
    const std::size_t c = k / names.size();
    const std::size_t r = k % names.size();
    report.ranks.push_back({"auroc", report.configs[c], names[r], ra[k]});
  }
  for (std::size_t k = 0; k < rp.size(); ++k) {
    const std::size_t c = k / names.size();
    const std::size_t r = k % names.size();
    report.ranks.push_back({"aupr", report.configs[c], names[r], rp[k]});
  }
  return report;
}

std::vector<CorruptionSpec> default_corruption_grid(CorruptionSpec::Kind kind) {
  std::vector<CorruptionSpec> grid;
  if (kind == CorruptionSpec::Kind::kJpeg) {
    for (int q : {95, 90, 80, 70, 60, 50, 40, 30}) grid.push_back(CorruptionSpec::jpeg(q));
  } else {
    for (double f : {0.95, 0.9, 0.8, 0.7, 0.6, 0.5}) grid.push_back(CorruptionSpec::crop(f));
  }
  return grid;
}

EvalReport run_corruption_sweep(const DatasetManifest& manifest,
                                const std::vector<ReconstructorHandle>& handles,
                                std::vector<ScorerConfig> configs,
                                const std::vector<CorruptionSpec>& grid,
                                const EvalOptions& options) {
  if (grid.empty()) throw ParameterError("corruption grid is empty");
  const bool has_bhfi = std::any_of(configs.begin(), configs.end(),
                                    [](const ScorerConfig& c) { return c.scorer == ScorerKind::kBhfi; });
  if (!has_bhfi) {
    auto it = std::find_if(configs.begin(), configs.end(),
                           [](const ScorerConfig& c) { return c.scorer == ScorerKind::kHfi; });
    if (it != configs.end()) {
      ScorerConfig b = *it;
      b.scorer = ScorerKind::kBhfi;
      configs.push_back(b);
    }
  }
  EvalReport report;
  fill_report_header(report, "corruption-sweep", handles, configs, options);
  const auto names = slot_names(handles);
  double seconds = 0.0;
  for (const auto& spec : grid) {
    spec.validate();
    const Pass pass = score_entries(manifest, handles, configs, options, spec);
    seconds += pass.seconds;
    report.samples += pass.scored;
    for (const auto& s : pass.skipped) {
      report.skipped.push_back({s.path + "@" + spec.to_string(), s.reason});
    }
    append_records(pass, report);
    const bool jpeg = spec.kind == CorruptionSpec::Kind::kJpeg;
    for (std::size_t c = 0; c < configs.size(); ++c) {
      for (std::size_t r = 0; r < names.size(); ++r) {
        const Populations p = collect(manifest, pass, c, r);
        report.curves.push_back({jpeg ? "jpeg" : "crop",
                                 jpeg ? static_cast<double>(spec.jpeg_quality) : spec.crop_fraction,
                                 report.configs[c], names[r], auroc(p.real, p.all_generated),
                                 aupr(p.real, p.all_generated)});
      }
    }
  }
  report.wall_seconds = seconds;
  report.seconds_per_sample = report.samples ? seconds / report.samples : 0.0;
  return report;
}

EvalReport run_attribution(const DatasetManifest& belonging, const DatasetManifest& other,
                           const ReconstructorHandle& handle, const ScorerConfig& cfg,
                           const EvalOptions& options) {
  EvalReport report;
  fill_report_header(report, "attribution", {handle}, {cfg}, options);
  // Concatenate into one manifest so both sets share the worker pool and
  // the timing window.
  DatasetManifest all;
  for (const auto* m : {&belonging, &other}) {
    for (const auto& e : m->entries) {
      ManifestEntry copy = e;
      copy.path = m->resolve(e).string();
      all.entries.push_back(std::move(copy));
    }
  }
  const Pass pass = score_entries(all, {handle}, {cfg}, options, std::nullopt);
  report.skipped = pass.skipped;
  report.samples = pass.scored;
  report.wall_seconds = pass.seconds;
  report.seconds_per_sample = pass.scored ? pass.seconds / pass.scored : 0.0;
  append_records(pass, report);

  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t i = 0; i < all.entries.size(); ++i) {
    if (pass.results[i].empty()) continue;
    const double v = -pass.results[i][0].members[0].value;
    (i < belonging.entries.size() ? pos : neg).push_back(v);
  }
  if (pos.empty() || neg.empty()) {
    throw TaskError("attribution needs at least one belonging and one other image");
  }
  report.metrics.push_back({report.configs[0], handle.id, "belonging-vs-other", pos.size(),
                            neg.size(), auroc(pos, neg), aupr(pos, neg)});
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* v : {&pos, &neg}) {
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  report.histograms.push_back({report.configs[0], handle.id, "belonging",
                               make_histogram(pos, lo, hi, options.histogram_bins)});
  report.histograms.push_back({report.configs[0], handle.id, "other",
                               make_histogram(neg, lo, hi, options.histogram_bins)});
  return report;
}

std::string report_json(const EvalReport& report) {
  ojson j;
  j["schema"] = kSchema;
  j["task_id"] = report.task_id;
  j["kind"] = report.kind;
  j["conventions"] = {{"detection", kDetectionConvention},
                      {"attribution", kAttributionConvention}};
  j["seed"] = report.seed;
  j["codecs"] = codec_versions();
  ojson recs = ojson::array();
  for (const auto& h : report.reconstructors) {
    recs.push_back({{"id", h.id},
                    {"kind", to_string(h.kind)},
                    {"native_side", h.native_side},
                    {"factor", h.factor},
                    {"training_corpus", h.training_corpus},
                    {"detail", h.describe()}});
  }
  j["reconstructors"] = recs;
  j["scorers"] = report.configs;
  j["samples"] = report.samples;
  ojson metrics = ojson::array();
  for (const auto& m : report.metrics) {
    metrics.push_back({{"config", m.config},
                       {"reconstructor", m.reconstructor},
                       {"task", m.task},
                       {"n_pos", m.n_pos},
                       {"n_neg", m.n_neg},
                       {"auroc", m.auroc},
                       {"aupr", m.aupr}});
  }
  j["metrics"] = metrics;
  ojson ranks = ojson::array();
  for (const auto& r : report.ranks) {
    ranks.push_back({{"metric", r.metric},
                     {"config", r.config},
                     {"reconstructor", r.reconstructor},
                     {"average_rank", r.average_rank}});
  }
  j["average_rank"] = ranks;
  ojson curves = ojson::array();
  for (const auto& c : report.curves) {
    curves.push_back({{"corruption", c.corruption},
                      {"parameter", c.parameter},
                      {"config", c.config},
                      {"reconstructor", c.reconstructor},
                      {"auroc", c.auroc},
                      {"aupr", c.aupr}});
  }
  j["curves"] = curves;
  ojson hist = ojson::array();
  for (const auto& h : report.histograms) {
    ojson e = {{"config", h.config}, {"reconstructor", h.reconstructor},
               {"population", h.population}};
    e["bins"] = histogram_json(h.histogram);
    hist.push_back(std::move(e));
  }
  j["histograms"] = hist;
  ojson skipped = ojson::array();
  for (const auto& s : report.skipped) skipped.push_back({{"path", s.path}, {"reason", s.reason}});
  j["skipped"] = skipped;
  return j.dump(2) + "\n";
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", report_json(report));

  ojson timing = {{"task_id", report.task_id},
                  {"samples", report.samples},
                  {"wall_seconds", report.wall_seconds},
                  {"seconds_per_sample", report.seconds_per_sample}};
  write_text(dir / "timing.json", timing.dump(2) + "\n");

  std::ostringstream m;
  m << "config,reconstructor,task,n_pos,n_neg,auroc,aupr\n";
  for (const auto& r : report.metrics) {
    m << csv_field(r.config) << ',' << csv_field(r.reconstructor) << ',' << csv_field(r.task) << ','
      << r.n_pos << ',' << r.n_neg << ',' << fixed6(r.auroc) << ',' << fixed6(r.aupr) << '\n';
  }
  write_text(dir / "metrics.csv", m.str());

  std::ostringstream rk;
  rk << "metric,config,reconstructor,average_rank\n";
  for (const auto& r : report.ranks) {
    rk << r.metric << ',' << csv_field(r.config) << ',' << csv_field(r.reconstructor) << ','
       << fixed6(r.average_rank) << '\n';
  }
  write_text(dir / "ranks.csv", rk.str());

  std::ostringstream cv;
  cv << "corruption,parameter,config,reconstructor,auroc,aupr\n";
  for (const auto& c : report.curves) {
    char param[32];
    std::snprintf(param, sizeof param, "%g", c.parameter);
    cv << c.corruption << ',' << param << ',' << csv_field(c.config) << ','
       << csv_field(c.reconstructor) << ',' << fixed6(c.auroc) << ',' << fixed6(c.aupr) << '\n';
  }
  write_text(dir / "curves.csv", cv.str());

  std::ostringstream sc;
  write_score_csv_header(sc);
  for (const auto& r : report.records) write_score_csv_row(sc, r);
  write_text(dir / "scores.csv", sc.str());
}

}  // namespace hfi
