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

#include "hfi/scoring.hpp"

#include <cmath>
#include <cstdio>

#include "hfi/error.hpp"
#include "hfi/imaging.hpp"

namespace hfi {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void require_finite(double v, const ReconstructorHandle& h, const char* what) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string(what) + " under '" + h.id + "' is not finite");
  }
}

}  // namespace

std::string to_string(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::kAeroblade:
      return "aeroblade";
    case ScorerKind::kHfi:
      return "hfi";
    case ScorerKind::kBhfi:
      return "bhfi";
  }
  return "?";
}

ScorerKind parse_scorer(std::string_view name) {
  if (name == "aeroblade") return ScorerKind::kAeroblade;
  if (name == "hfi") return ScorerKind::kHfi;
  if (name == "bhfi") return ScorerKind::kBhfi;
  throw ParameterError("unknown scorer '" + std::string(name) + "' (expected aeroblade, hfi or bhfi)");
}

std::string ScorerConfig::filter_text() const {
  if (scorer == ScorerKind::kAeroblade) return "-";
  if (scorer == ScorerKind::kBhfi) return filter.to_string() + ";blur=" + blur.to_string();
  return filter.to_string();
}

std::string ScorerConfig::label() const {
  std::string s = to_string(scorer) + "/" + distance.name();
  if (scorer != ScorerKind::kAeroblade) s += "/" + filter.to_string();
  if (scorer == ScorerKind::kBhfi) s += "/blur=" + blur.to_string();
  return s;
}

double aeroblade_score(const ImageTensor& x, const ReconstructorHandle& h, const Distance& d) {
  const double v = d(x, reconstruct(h, x));
  require_finite(v, h, "aeroblade score");
  return v;
}

double hfi_score(const ImageTensor& x, const ReconstructorHandle& h, const Distance& d,
                 const FilterSpec& f) {
  const double v = aeroblade_score(x, h, d) - aeroblade_score(apply_lowpass(x, f), h, d);
  require_finite(v, h, "hfi score");
  return v;
}

double bhfi_score(const ImageTensor& x, const ReconstructorHandle& h, const Distance& d,
                  const FilterSpec& f, const FilterSpec& blur) {
  return hfi_score(apply_lowpass(x, blur), h, d, f);
}

double hfi_directional(const ImageTensor& x, const ReconstructorHandle& h, const FilterSpec& f,
                       double eps) {
  if (!h.is_linear()) {
    throw ContractError("hfi_directional needs a linear classical reconstructor; '" + h.id +
                        "' is not");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("epsilon must be positive");
  const ImageTensor r = highpass_residual(x, f);
  const ImageTensor moved = axpy(x, -eps, r);
  const double here = mse(x, reconstruct(h, x));
  const double there = mse(moved, reconstruct(h, moved));
  return (here - there) / eps;
}

double score(const ImageTensor& x, const ReconstructorHandle& h, const ScorerConfig& cfg) {
  switch (cfg.scorer) {
    case ScorerKind::kAeroblade:
      return aeroblade_score(x, h, cfg.distance);
    case ScorerKind::kHfi:
      return hfi_score(x, h, cfg.distance, cfg.filter);
    case ScorerKind::kBhfi:
      return bhfi_score(x, h, cfg.distance, cfg.filter, cfg.blur);
  }
  return 0.0;
}

EnsembleResult ensemble_score(const std::string& image_id, const ImageTensor& x,
                              const std::vector<ReconstructorHandle>& handles,
                              const ScorerConfig& cfg, const FitObserver& observer) {
  if (handles.empty()) throw ParameterError("ensemble needs at least one reconstructor");
  EnsembleResult r;
  r.ensemble = {image_id, "ensemble", cfg.scorer, cfg.distance.name(), cfg.filter_text(), 0.0};
  for (const auto& h : handles) {
    const ImageTensor fitted = fit_to_dim(x, h.native_side);
    if (observer) observer(h, fitted);
    ScoreRecord rec = r.ensemble;
    rec.reconstructor_id = h.id;
    rec.value = score(fitted, h, cfg);
    if (r.members.empty() || rec.value < r.ensemble.value) r.ensemble.value = rec.value;
    r.members.push_back(std::move(rec));
  }
  return r;
}

Verdict classify(const ScoreRecord& rec, const ClassifierConfig& cfg) {
  return rec.value > cfg.threshold ? Verdict::kReal : Verdict::kGenerated;
}

std::string to_string(Verdict v) { return v == Verdict::kReal ? "real" : "generated"; }

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void write_score_csv_header(std::ostream& out) {
  out << "image_id,reconstructor_id,scorer,distance,filter,value\n";
}

void write_score_csv_row(std::ostream& out, const ScoreRecord& rec) {
  out << csv_field(rec.image_id) << ',' << csv_field(rec.reconstructor_id) << ','
      << to_string(rec.scorer) << ',' << rec.distance << ',' << csv_field(rec.filter) << ','
      << format_value(rec.value) << '\n';
}

}  // namespace hfi
