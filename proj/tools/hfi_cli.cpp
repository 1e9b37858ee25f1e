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

// hfi: score images, run detection benchmarks, sweeps and attribution, and
// manage the model registry.
//
// Exit codes: 0 success, 1 task or verification failure, 2 configuration
// error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfi/distance.hpp"
#include "hfi/error.hpp"
#include "hfi/evaluate.hpp"
#include "hfi/filters.hpp"
#include "hfi/imaging.hpp"
#include "hfi/parallel.hpp"
#include "hfi/reconstruct.hpp"
#include "hfi/registry.hpp"
#include "hfi/scoring.hpp"
#include "hfi/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTask = 1;
constexpr int kExitConfig = 2;

constexpr const char* kRegistryEnv = "HFI_REGISTRY";
constexpr const char* kDefaultFilter = "gaussian:k=3,sigma=0.8";

// Thrown for bad flags, unreadable inputs and the like.
struct ConfigError : hfi::Error {
  using hfi::Error::Error;
};

struct RunConfig {
  std::string registry;
  std::string scorers = "hfi";
  std::string distances = "auto";
  std::vector<std::string> filters;
  std::string blur = kDefaultFilter;
  std::string handles = "all";
  std::string lpips_id;
  std::string out;
  int workers = 1;
  std::uint64_t seed = 0;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void warn(const std::string& msg) { std::cerr << "hfi: warning: " << msg << "\n"; }

// --registry, then $HFI_REGISTRY, then the built-in classical suite.
hfi::Registry open_registry(const RunConfig& rc, bool verify_assets) {
  std::string path = rc.registry;
  if (path.empty()) {
    if (const char* env = std::getenv(kRegistryEnv); env && *env) path = env;
  }
  if (path.empty()) {
    hfi::Registry reg;
    reg.reconstructors = hfi::default_classical_suite();
    return reg;
  }
  if (!fs::exists(path)) throw ConfigError("registry not found: " + path);
  return hfi::load_registry(path, verify_assets);
}

std::shared_ptr<const hfi::LpipsModel> open_lpips(const hfi::Registry& reg,
                                                  const std::string& id) {
  for (const auto& d : reg.distance_assets) {
    if (d.kind != "lpips") continue;
    if (id.empty() || d.id == id) return hfi::LpipsModel::load(d.asset, d.id);
  }
  if (!id.empty()) throw ConfigError("no lpips distance asset with id '" + id + "'");
  return nullptr;
}

bool has_lpips(const hfi::Registry& reg) {
  for (const auto& d : reg.distance_assets) {
    if (d.kind == "lpips") return true;
  }
  return false;
}

std::vector<hfi::DistanceKind> resolve_distances(const std::string& text,
                                                 const hfi::Registry& reg) {
  if (text == "auto") {
    if (has_lpips(reg)) return {hfi::DistanceKind::lpips_layer(2)};
    std::cerr << "hfi: WARNING: no LPIPS distance asset registered; falling back from lpips2 "
                 "to mse. Scores are pixel-space and not comparable to LPIPS results.\n";
    return {hfi::DistanceKind::mse()};
  }
  std::vector<hfi::DistanceKind> out;
  for (const auto& t : split_list(text)) out.push_back(hfi::DistanceKind::parse(t));
  if (out.empty()) throw ConfigError("no distance given");
  return out;
}

std::vector<hfi::FilterSpec> parse_filters(const std::vector<std::string>& texts) {
  std::vector<hfi::FilterSpec> out;
  for (const auto& t : texts) {
    auto f = hfi::FilterSpec::parse(t);
    f.validate();
    out.push_back(f);
  }
  if (out.empty()) out.push_back(hfi::FilterSpec::parse(kDefaultFilter));
  return out;
}

// Cross product scorer × distance × filter, dropping duplicate labels
// (aeroblade ignores the filter).
std::vector<hfi::ScorerConfig> build_configs(const std::vector<hfi::ScorerKind>& scorers,
                                             const std::vector<hfi::DistanceKind>& distances,
                                             const std::vector<hfi::FilterSpec>& filters,
                                             const hfi::FilterSpec& blur,
                                             const std::shared_ptr<const hfi::LpipsModel>& lpips) {
  std::vector<hfi::ScorerConfig> out;
  std::set<std::string> seen;
  for (auto s : scorers) {
    for (const auto& d : distances) {
      if (d.needs_asset() && !lpips) {
        throw ConfigError("distance " + d.to_string() + " needs an LPIPS asset in the registry");
      }
      for (const auto& f : filters) {
        hfi::ScorerConfig c;
        c.scorer = s;
        c.distance = hfi::Distance(d, d.needs_asset() ? lpips : nullptr);
        c.filter = f;
        c.blur = blur;
        if (seen.insert(c.label()).second) out.push_back(std::move(c));
      }
    }
  }
  return out;
}

struct Setup {
  hfi::Registry registry;
  std::vector<hfi::ReconstructorHandle> handles;
  std::vector<hfi::ScorerConfig> configs;
};

Setup prepare(const RunConfig& rc, const std::vector<hfi::FilterSpec>& filters,
              std::optional<std::vector<hfi::DistanceKind>> distances = std::nullopt) {
  if (rc.workers < 1) throw ConfigError("--workers must be >= 1");
  Setup s;
  s.registry = open_registry(rc, true);
  s.handles = s.registry.select(rc.handles);
  std::vector<hfi::ScorerKind> scorers;
  for (const auto& t : split_list(rc.scorers)) scorers.push_back(hfi::parse_scorer(t));
  if (scorers.empty()) throw ConfigError("no scorer given");
  const auto kinds = distances ? *distances : resolve_distances(rc.distances, s.registry);
  bool need_lpips = false;
  for (const auto& d : kinds) need_lpips = need_lpips || d.needs_asset();
  const auto lpips = need_lpips ? open_lpips(s.registry, rc.lpips_id) : nullptr;
  auto blur = hfi::FilterSpec::parse(rc.blur);
  blur.validate();
  s.configs = build_configs(scorers, kinds, filters, blur, lpips);
  return s;
}

hfi::EvalOptions eval_options(const RunConfig& rc, const std::string& task_id) {
  hfi::EvalOptions o;
  o.workers = rc.workers;
  o.seed = rc.seed;
  o.task_id = task_id;
  o.warn = warn;
  return o;
}

hfi::DatasetManifest open_manifest(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("manifest not found: " + path);
  return hfi::load_manifest(path);
}

void print_summary(const hfi::EvalReport& report, const fs::path& dir) {
  for (const auto& m : report.metrics) {
    std::cout << std::left << std::setw(48) << m.config << ' ' << std::setw(20)
              << m.reconstructor << ' ' << std::setw(22) << m.task << " auroc "
              << hfi::format_value(m.auroc) << "  aupr " << hfi::format_value(m.aupr) << "\n";
  }
  if (!report.curves.empty()) {
    std::cout << report.curves.size() << " curve points written to "
              << (dir / "curves.csv").string() << "\n";
  }
  std::cout << "report: " << (dir / "report.json").string() << "\n";
}

// ---- subcommands ----------------------------------------------------------

int cmd_score(const RunConfig& rc, const std::vector<std::string>& images) {
  const Setup s = prepare(rc, parse_filters(rc.filters));
  for (const auto& h : s.handles) hfi::warm_up(h);

  std::vector<std::vector<hfi::EnsembleResult>> results(images.size());
  std::vector<std::string> failures(images.size());
  hfi::parallel_for(images.size(), rc.workers, [&](std::size_t i) {
    hfi::ImageTensor img;
    try {
      img = hfi::read_image(images[i]);
    } catch (const hfi::DecodeError& e) {
      failures[i] = e.what();
      return;
    }
    for (const auto& cfg : s.configs) {
      results[i].push_back(hfi::ensemble_score(images[i], img, s.handles, cfg));
    }
  });

  std::ofstream file;
  if (!rc.out.empty()) {
    file.open(rc.out);
    if (!file) throw ConfigError("cannot write " + rc.out);
  }
  std::ostream& out = rc.out.empty() ? std::cout : file;
  hfi::write_score_csv_header(out);
  std::size_t scored = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!failures[i].empty()) {
      warn("skipped " + failures[i]);
      continue;
    }
    ++scored;
    for (const auto& er : results[i]) {
      for (const auto& m : er.members) hfi::write_score_csv_row(out, m);
      hfi::write_score_csv_row(out, er.ensemble);
    }
  }
  return scored == 0 && !images.empty() ? kExitTask : kExitOk;
}

enum class Ablation { kNone, kFilters, kDistances, kGaussianGrid };

std::vector<hfi::FilterSpec> ablation_filters(Ablation a, const std::vector<std::string>& given) {
  if (a == Ablation::kFilters) {
    if (!given.empty()) return parse_filters(given);
    return {hfi::FilterSpec::gaussian(3, 0.8), hfi::FilterSpec::box(3),
            hfi::FilterSpec::median(3), hfi::FilterSpec::bilateral(3),
            hfi::FilterSpec::dct(36.0)};
  }
  if (a == Ablation::kGaussianGrid) {
    std::vector<hfi::FilterSpec> grid;
    for (int k : {3, 5, 7}) {
      for (double sigma : {0.5, 0.8, 1.1, 1.4}) grid.push_back(hfi::FilterSpec::gaussian(k, sigma));
    }
    return grid;
  }
  return parse_filters(given);
}

int cmd_eval(const RunConfig& rc, const std::string& manifest_path, const std::string& corrupt,
             const std::string& ablate, std::string task_id) {
  Ablation a = Ablation::kNone;
  if (ablate == "filters") {
    a = Ablation::kFilters;
  } else if (ablate == "distances") {
    a = Ablation::kDistances;
  } else if (ablate == "gaussian-grid") {
    a = Ablation::kGaussianGrid;
  } else if (!ablate.empty()) {
    throw ConfigError("--ablate must be filters, distances or gaussian-grid");
  }
  if (!corrupt.empty() && corrupt != "jpeg" && corrupt != "crop") {
    throw ConfigError("--corrupt must be jpeg or crop");
  }
  const auto manifest = open_manifest(manifest_path);
  std::optional<std::vector<hfi::DistanceKind>> distances;
  if (a == Ablation::kDistances) {
    const auto reg = open_registry(rc, false);
    distances = std::vector<hfi::DistanceKind>{hfi::DistanceKind::mse(), hfi::DistanceKind::l1()};
    if (has_lpips(reg)) {
      distances->push_back(hfi::DistanceKind::lpips());
      for (int j = 1; j <= 5; ++j) distances->push_back(hfi::DistanceKind::lpips_layer(j));
    } else {
      warn("no LPIPS distance asset registered; the distance ablation covers mse and l1 only");
    }
  }
  const Setup s = prepare(rc, ablation_filters(a, rc.filters), distances);
  if (task_id.empty()) task_id = fs::path(manifest_path).stem().string();
  const auto opts = eval_options(rc, task_id);
  hfi::EvalReport report;
  if (corrupt.empty()) {
    report = hfi::run_task(manifest, s.handles, s.configs, opts);
  } else {
    const auto kind = corrupt == "jpeg" ? hfi::CorruptionSpec::Kind::kJpeg
                                        : hfi::CorruptionSpec::Kind::kCrop;
    report = hfi::run_corruption_sweep(manifest, s.handles, s.configs,
                                       hfi::default_corruption_grid(kind), opts);
  }
  const fs::path dir = rc.out.empty() ? fs::path("hfi-report") : fs::path(rc.out);
  hfi::write_report(report, dir);
  print_summary(report, dir);
  return kExitOk;
}

int cmd_attribute(const RunConfig& rc, const std::string& belonging, const std::string& other,
                  const std::string& handle_id, std::string task_id) {
  const auto m1 = open_manifest(belonging);
  const auto m2 = open_manifest(other);
  RunConfig one = rc;
  one.handles = handle_id;
  const Setup s = prepare(one, parse_filters(rc.filters));
  if (s.configs.size() != 1) throw ConfigError("attribute takes exactly one scorer/distance/filter");
  if (task_id.empty()) task_id = "attribution-" + handle_id;
  const auto report =
      hfi::run_attribution(m1, m2, s.handles.front(), s.configs.front(), eval_options(rc, task_id));
  const fs::path dir = rc.out.empty() ? fs::path("hfi-report") : fs::path(rc.out);
  hfi::write_report(report, dir);
  print_summary(report, dir);
  std::cout << "seconds/sample " << report.seconds_per_sample << "\n";
  return kExitOk;
}

int cmd_models(const RunConfig& rc, const std::string& action) {
  const hfi::Registry reg = open_registry(rc, false);
  if (action == "list") {
    std::cout << std::left << std::setw(24) << "id" << std::setw(11) << "kind" << std::setw(7)
              << "side" << std::setw(8) << "factor" << std::setw(20) << "corpus" << "detail\n";
    for (const auto& h : reg.reconstructors) {
      std::cout << std::setw(24) << h.id << std::setw(11) << hfi::to_string(h.kind)
                << std::setw(7) << h.native_side << std::setw(8) << h.factor << std::setw(20)
                << h.training_corpus << h.describe() << "\n";
    }
    for (const auto& d : reg.distance_assets) {
      std::cout << std::setw(24) << d.id << std::setw(11) << d.kind << std::setw(7) << "-"
                << std::setw(8) << "-" << std::setw(20) << "-" << d.asset.filename().string()
                << "\n";
    }
    return kExitOk;
  }
  const auto issues = hfi::verify_registry(reg);
  for (const auto& h : reg.reconstructors) {
    if (h.kind == hfi::ReconstructorKind::kClassical) std::cout << "ok        " << h.id << "\n";
  }
  std::set<std::string> bad;
  for (const auto& i : issues) bad.insert(i.id);
  for (const auto& h : reg.reconstructors) {
    if (h.kind == hfi::ReconstructorKind::kNeural && !bad.count(h.id)) {
      std::cout << "ok        " << h.id << "\n";
    }
  }
  for (const auto& d : reg.distance_assets) {
    if (!bad.count(d.id)) std::cout << "ok        " << d.id << "\n";
  }
  for (const auto& i : issues) {
    std::cout << "FAILED    " << i.id << "  " << i.path.string() << ": " << i.problem << "\n";
  }
  return issues.empty() ? kExitOk : kExitTask;
}

int cmd_synth(const std::string& out, std::size_t count, int side, std::uint64_t seed,
              const std::string& generator) {
  const auto suite = hfi::default_classical_suite(side);
  const hfi::ReconstructorHandle* g = nullptr;
  for (const auto& h : suite) {
    if (h.id == generator) g = &h;
  }
  if (!g) throw ConfigError("unknown generator '" + generator + "'");
  if (count == 0) throw ConfigError("--count must be positive");
  hfi::write_synthetic_benchmark(out, seed, count, side, *g);
  std::cout << "wrote " << count << " real and " << count << " generated images to " << out
            << "\n";
  return kExitOk;
}

void add_run_options(CLI::App* cmd, RunConfig& rc, bool multi_scorer) {
  cmd->add_option("--registry", rc.registry,
                  std::string("Registry JSON. Default: $") + kRegistryEnv +
                      ", else the built-in classical suite");
  cmd->add_option("--scorer", rc.scorers,
                  multi_scorer ? "aeroblade|hfi|bhfi, comma-separated list allowed"
                               : "aeroblade|hfi|bhfi")
      ->capture_default_str();
  cmd->add_option("--distance", rc.distances,
                  "lpips|lpips1..lpips5|mse|l1 (comma list). Default auto: lpips2 when an LPIPS "
                  "asset is registered, otherwise mse with a warning")
      ->capture_default_str();
  cmd->add_option("--filter", rc.filters,
                  std::string("Low-pass filter F, repeatable. Default ") + kDefaultFilter);
  cmd->add_option("--blur", rc.blur, "B-HFI pre-blur F_B")->capture_default_str();
  cmd->add_option("--handles", rc.handles, "Reconstructor ids (comma list) or all")
      ->capture_default_str();
  cmd->add_option("--lpips", rc.lpips_id, "LPIPS distance asset id. Default: first registered");
  cmd->add_option("--workers", rc.workers, "Worker threads")->capture_default_str();
  cmd->add_option("--seed", rc.seed, "Random seed recorded in reports")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-frequency influence detector for AI-generated images"};
  app.require_subcommand(1);
  app.footer(std::string("Registry override: $") + kRegistryEnv +
             ". Exit codes: 0 ok, 1 task/verification failure, 2 configuration error.");

  RunConfig rc;

  auto* score = app.add_subcommand("score", "Score images; CSV rows per (image, handle) + ensemble");
  std::vector<std::string> images;
  add_run_options(score, rc, true);
  score->add_option("--out", rc.out, "Output CSV. Default: stdout");
  score->add_option("images", images, "PNG or JPEG files")->required();

  auto* eval = app.add_subcommand("eval", "Run a detection task, ablation or corruption sweep");
  std::string manifest, corrupt, ablate, task_id;
  add_run_options(eval, rc, true);
  eval->add_option("--manifest", manifest, "CSV or JSON manifest (path,label,source_model)")
      ->required();
  eval->add_option("--out", rc.out, "Report directory")->default_str("hfi-report");
  eval->add_option("--corrupt", corrupt,
                   "jpeg (q 95,90,80,70,60,50,40,30) or crop (f 0.95,0.9,0.8,0.7,0.6,0.5)");
  eval->add_option("--ablate", ablate,
                   "filters (gaussian, box, median, bilateral, dct:f=36), distances, or "
                   "gaussian-grid (k 3,5,7 x sigma 0.5,0.8,1.1,1.4)");
  eval->add_option("--task-id", task_id, "Task id. Default: manifest file stem");

  auto* attribute = app.add_subcommand("attribute", "Belonging-vs-other attribution with one handle");
  std::string belonging, other, handle_id;
  add_run_options(attribute, rc, false);
  attribute->add_option("--belonging", belonging, "Manifest of images from the handle's model")
      ->required();
  attribute->add_option("--other", other, "Manifest of images from another model")->required();
  attribute->add_option("--handle", handle_id, "Reconstructor id of the belonging model")
      ->required();
  attribute->add_option("--out", rc.out, "Report directory")->default_str("hfi-report");
  attribute->add_option("--task-id", task_id, "Task id. Default: attribution-<handle>");

  auto* models = app.add_subcommand("models", "List or verify the model registry");
  std::string action;
  models->add_option("action", action, "list or verify")
      ->required()
      ->check(CLI::IsMember({"list", "verify"}));
  models->add_option("--registry", rc.registry,
                     std::string("Registry JSON. Default: $") + kRegistryEnv +
                         ", else the built-in classical suite");

  auto* synth = app.add_subcommand("synth", "Write a synthetic texture benchmark");
  std::string synth_out;
  std::size_t count = 200;
  int side = 128;
  std::uint64_t synth_seed = 0;
  std::string generator = "classical-aa";
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--count", count, "Real images (and as many generated)")->capture_default_str();
  synth->add_option("--side", side, "Image side")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Corpus seed")->capture_default_str();
  synth->add_option("--generator", generator, "Classical handle producing the generated half")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*score) return cmd_score(rc, images);
    if (*eval) return cmd_eval(rc, manifest, corrupt, ablate, task_id);
    if (*attribute) return cmd_attribute(rc, belonging, other, handle_id, task_id);
    if (*models) return cmd_models(rc, action);
    if (*synth) return cmd_synth(synth_out, count, side, synth_seed, generator);
  } catch (const ConfigError& e) {
    std::cerr << "hfi: error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hfi::ParameterError& e) {
    std::cerr << "hfi: error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hfi::RegistryError& e) {
    std::cerr << "hfi: error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hfi::AssetError& e) {
    std::cerr << "hfi: error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "hfi: failed: " << e.what() << "\n";
    return kExitTask;
  }
  return kExitConfig;
}
