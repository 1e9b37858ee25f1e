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

// Score functions. Higher scores mean "more likely real".
//
//   aeroblade(x) = d(x, AE(x))
//   hfi(x)       = d(x, AE(x)) - d(F(x), AE(F(x)))
//   bhfi(x)      = hfi(F_B(x))
//
// Ensembles take the minimum over reconstructors, refitting the input to
// each reconstructor's native side first.

#ifndef HFI_SCORING_HPP_
#define HFI_SCORING_HPP_

#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "hfi/distance.hpp"
#include "hfi/filters.hpp"
#include "hfi/image.hpp"
#include "hfi/reconstruct.hpp"

namespace hfi {

enum class ScorerKind { kAeroblade, kHfi, kBhfi };

std::string to_string(ScorerKind kind);
ScorerKind parse_scorer(std::string_view name);

struct ScoreRecord {
  std::string image_id;
  std::string reconstructor_id;  // or "ensemble"
  ScorerKind scorer = ScorerKind::kHfi;
  std::string distance;
  std::string filter;  // canonical FilterSpec, "-" for aeroblade
  double value = 0.0;
};

struct ScorerConfig {
  ScorerKind scorer = ScorerKind::kHfi;
  Distance distance{DistanceKind::mse()};
  FilterSpec filter = FilterSpec::gaussian(3, 0.8);
  FilterSpec blur = FilterSpec::gaussian(3, 0.8);  // F_B, bhfi only

  // "hfi/mse/gaussian:k=3,sigma=0.8"; bhfi appends "/blur=<F_B>".
  std::string label() const;
  // The filter column of score records.
  std::string filter_text() const;
};

double aeroblade_score(const ImageTensor& x, const ReconstructorHandle& h, const Distance& d);
double hfi_score(const ImageTensor& x, const ReconstructorHandle& h, const Distance& d,
                 const FilterSpec& f);
double bhfi_score(const ImageTensor& x, const ReconstructorHandle& h, const Distance& d,
                  const FilterSpec& f, const FilterSpec& blur = FilterSpec::gaussian(3, 0.8));

// Forward difference [d(x,AE(x)) - d(x-εr, AE(x-εr))]/ε with r = x - F(x)
// and d = mse. Throws ContractError unless h is a linear classical handle,
// and ParameterError unless ε > 0.
double hfi_directional(const ImageTensor& x, const ReconstructorHandle& h, const FilterSpec& f,
                       double eps);

// Dispatches on cfg.scorer. x must already fit h.
double score(const ImageTensor& x, const ReconstructorHandle& h, const ScorerConfig& cfg);

struct EnsembleResult {
  ScoreRecord ensemble;              // min over members
  std::vector<ScoreRecord> members;  // one per handle, in handle order
};

// Observes (handle, fitted image) pairs, e.g. to check that every member
// scored at its own native side.
using FitObserver = std::function<void(const ReconstructorHandle&, const ImageTensor&)>;

// Fits `x` to each handle's native side, scores it, and takes the minimum.
// Throws ParameterError if `handles` is empty.
EnsembleResult ensemble_score(const std::string& image_id, const ImageTensor& x,
                              const std::vector<ReconstructorHandle>& handles,
                              const ScorerConfig& cfg, const FitObserver& observer = {});

struct ClassifierConfig {
  double threshold = 0.0;
};

enum class Verdict { kReal, kGenerated };

// Real iff value > threshold.
Verdict classify(const ScoreRecord& rec, const ClassifierConfig& cfg);
std::string to_string(Verdict v);

// Header "image_id,reconstructor_id,scorer,distance,filter,value"; values
// with 6 decimals.
void write_score_csv_header(std::ostream& out);
void write_score_csv_row(std::ostream& out, const ScoreRecord& rec);
// Fixed 6-decimal rendering without a negative zero.
std::string format_value(double v);

}  // namespace hfi

#endif  // HFI_SCORING_HPP_
