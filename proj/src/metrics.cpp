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

#include "hfi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "hfi/error.hpp"

namespace hfi {
namespace {

void require_scores(std::span<const double> v, const char* what) {
  if (v.empty()) throw ParameterError(std::string(what) + " score list is empty");
  for (double s : v) {
    if (!std::isfinite(s)) throw ParameterError(std::string(what) + " scores contain NaN/Inf");
  }
}

// (score, is_positive) sorted by score descending.
std::vector<std::pair<double, bool>> merged_descending(std::span<const double> pos,
                                                       std::span<const double> neg) {
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.emplace_back(s, true);
  for (double s : neg) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return all;
}

}  // namespace

double auroc(std::span<const double> pos, std::span<const double> neg) {
  require_scores(pos, "positive");
  require_scores(neg, "negative");
  const auto all = merged_descending(pos, neg);
  // U = Σ over positives of (#neg below + 0.5 · #neg tied). Walking groups
  // from the top, negatives below a group are those not yet seen.
  double wins = 0.0;
  std::size_t neg_seen = 0;
  const std::size_t n_neg = neg.size();
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t p = 0;
    std::size_t n = 0;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? p : n) += 1;
      ++j;
    }
    wins += static_cast<double>(p) * (static_cast<double>(n_neg - neg_seen - n) + 0.5 * n);
    neg_seen += n;
    i = j;
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(n_neg));
}

double aupr(std::span<const double> pos, std::span<const double> neg) {
  require_scores(pos, "positive");
  for (double s : neg) {
    if (!std::isfinite(s)) throw ParameterError("negative scores contain NaN/Inf");
  }
  const auto all = merged_descending(pos, neg);
  double tp = 0.0;
  double fp = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    double dtp = 0.0;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? dtp : fp) += 1.0;
      ++j;
    }
    tp += dtp;
    if (dtp > 0.0) sum += dtp * (tp / (tp + fp));
    i = j;
  }
  return sum / static_cast<double>(pos.size());
}

std::vector<double> average_rank(const std::vector<std::vector<double>>& values) {
  const std::size_t methods = values.size();
  if (methods == 0) return {};
  const std::size_t tasks = values[0].size();
  for (const auto& row : values) {
    if (row.size() != tasks) throw ParameterError("average_rank needs a value for every task");
  }
  std::vector<double> total(methods, 0.0);
  std::vector<std::size_t> order(methods);
  for (std::size_t t = 0; t < tasks; ++t) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a][t] > values[b][t]; });
    for (std::size_t i = 0; i < methods;) {
      std::size_t j = i;
      while (j < methods && values[order[j]][t] == values[order[i]][t]) ++j;
      // Ranks i+1 .. j share their mean.
      const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (std::size_t k = i; k < j; ++k) total[order[k]] += mean_rank;
      i = j;
    }
  }
  if (tasks == 0) return std::vector<double>(methods, 1.0);
  for (double& v : total) v /= static_cast<double>(tasks);
  return total;
}

Histogram make_histogram(std::span<const double> values, double lo, double hi, int bins) {
  if (bins <= 0) throw ParameterError("histogram needs at least one bin");
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (int k = 0; k <= bins; ++k) h.edges[k] = lo + (hi - lo) * k / bins;
  h.counts.assign(bins, 0);
  for (double v : values) {
    const double t = (v - lo) / (hi - lo) * bins;
    const int k = std::clamp(static_cast<int>(std::floor(t)), 0, bins - 1);
    ++h.counts[k];
  }
  return h;
}

}  // namespace hfi
