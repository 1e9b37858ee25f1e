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

// Reconstruction distances: LPIPS (full and per stage) and pixel oracles.
//
// LPIPS asset contract. The ONNX graph maps one normalized image
// [1,3,H,W] to five feature maps, one output per backbone stage in order.
// The learned per-channel weights of stage j are stored as the initializer
// "lpips.lin{j}" (j = 0..4, shape [1,C_j,1,1] or [C_j]). Input
// normalization is carried as metadata:
//   lpips.shift = "-0.030,-0.088,-0.188"   per-channel, applied to 2x-1
//   lpips.scale = "0.458,0.448,0.450"
//   lpips.eps   = "1e-10"                  channel-normalization epsilon
// so the backbone sees ((2x - 1) - shift) / scale.

#ifndef HFI_DISTANCE_HPP_
#define HFI_DISTANCE_HPP_

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hfi/image.hpp"

namespace hfi {

struct DistanceKind {
  enum class Kind { kLpipsFull, kLpipsLayer, kMse, kL1 };
  Kind kind = Kind::kMse;
  int layer = 0;  // 1..5 for kLpipsLayer

  static DistanceKind lpips() { return {Kind::kLpipsFull, 0}; }
  static DistanceKind lpips_layer(int j);
  static DistanceKind mse() { return {Kind::kMse, 0}; }
  static DistanceKind l1() { return {Kind::kL1, 0}; }

  // "lpips", "lpips1".."lpips5", "mse", "l1".
  static DistanceKind parse(std::string_view text);
  std::string to_string() const;
  bool needs_asset() const noexcept {
    return kind == Kind::kLpipsFull || kind == Kind::kLpipsLayer;
  }

  friend bool operator==(const DistanceKind&, const DistanceKind&) = default;
};

struct FeatureMap {
  int stage = 0;  // 1..5
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> values;  // c×h×w
};

using FeatureStack = std::array<FeatureMap, 5>;

class LpipsModel {
 public:
  // Throws AssetError if the file is missing, is not a valid graph, lacks
  // the lin heads or metadata, or does not produce five outputs.
  static std::shared_ptr<const LpipsModel> load(const std::filesystem::path& path,
                                                const std::string& id = "lpips");

  // Runs the backbone on a 3-channel image in [0,1]. Throws NumericError
  // naming the stage if a feature is NaN/Inf.
  FeatureStack extract_features(const ImageTensor& img) const;

  // Per-stage LPIPS terms for two images of equal shape.
  std::array<double, 5> stage_terms(const ImageTensor& x, const ImageTensor& y) const;
  std::array<double, 5> stage_terms(const FeatureStack& fx, const FeatureStack& fy) const;

  const std::vector<double>& lin_weights(int stage) const { return lin_.at(stage - 1); }
  const std::array<double, 3>& shift() const noexcept { return shift_; }
  const std::array<double, 3>& scale() const noexcept { return scale_; }
  double eps() const noexcept { return eps_; }
  const std::string& id() const noexcept { return id_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::string id_;
  std::array<std::vector<double>, 5> lin_;
  std::array<double, 3> shift_{};
  std::array<double, 3> scale_{};
  double eps_ = 1e-10;
};

// Divides each spatial location's channel vector by (its L2 norm + eps).
std::vector<float> unit_normalize(const FeatureMap& f, double eps);

// A distance kind bound to its asset (if it needs one). Copyable and safe
// to share between threads.
class Distance {
 public:
  Distance() = default;
  // Throws ParameterError if `kind` needs an LPIPS model and none is given.
  explicit Distance(DistanceKind kind, std::shared_ptr<const LpipsModel> lpips = nullptr);

  // d(x, y) >= 0. Throws GeometryError on shape mismatch.
  double operator()(const ImageTensor& x, const ImageTensor& y) const;

  const DistanceKind& kind() const noexcept { return kind_; }
  std::string name() const { return kind_.to_string(); }

 private:
  DistanceKind kind_;
  std::shared_ptr<const LpipsModel> lpips_;
};

double mse(const ImageTensor& x, const ImageTensor& y);
double l1(const ImageTensor& x, const ImageTensor& y);

}  // namespace hfi

#endif  // HFI_DISTANCE_HPP_
