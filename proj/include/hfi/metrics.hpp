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

// Threshold-free separability metrics. Positives are expected to score
// higher than negatives.

#ifndef HFI_METRICS_HPP_
#define HFI_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace hfi {

// Mann-Whitney AUROC: pairs won count 1, ties 0.5, divided by |pos|·|neg|.
// Computed from midranks in O(n log n). Throws ParameterError if either
// list is empty or holds a non-finite value.
double auroc(std::span<const double> pos, std::span<const double> neg);

// Average precision without interpolation. Scores are visited in
// descending order, equal scores forming one threshold group:
// AP = Σ_groups ΔRecall · Precision(after group). An empty negative list
// gives 1. Throws ParameterError if pos is empty.
double aupr(std::span<const double> pos, std::span<const double> neg);

// values[m][t] is method m's metric on task t (higher is better). Per task,
// methods are ranked 1 = best with tied methods sharing the mean of their
// rank span; the result is each method's mean rank over tasks.
std::vector<double> average_rank(const std::vector<std::vector<double>>& values);

struct Histogram {
  std::vector<double> edges;         // bins + 1 ascending edges
  std::vector<std::size_t> counts;   // bins
};

// Equal-width bins over [lo, hi]; the last bin is closed. Values outside
// the range are clamped into the end bins.
Histogram make_histogram(std::span<const double> values, double lo, double hi, int bins);

}  // namespace hfi

#endif  // HFI_METRICS_HPP_
