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

#include "hfi/distance.hpp"

#include <cmath>
#include <sstream>

#include "hfi/error.hpp"
#include "hfi/nn/model.hpp"

namespace hfi {

struct LpipsModel::Impl {
  nn::Model model;
};

namespace {

std::array<double, 3> parse_triple(const std::string& text, const std::string& key,
                                   const std::string& id) {
  std::array<double, 3> out{};
  std::stringstream ss(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 3) break;
    try {
      out[n++] = std::stod(item);
    } catch (const std::exception&) {
      throw AssetError("LPIPS asset '" + id + "': metadata " + key + " is not numeric");
    }
  }
  if (n != 3 || std::getline(ss, item, ',')) {
    throw AssetError("LPIPS asset '" + id + "': metadata " + key + " needs three values");
  }
  return out;
}

}  // namespace

DistanceKind DistanceKind::lpips_layer(int j) {
  if (j < 1 || j > 5) throw ParameterError("LPIPS layer must be in 1..5, got " + std::to_string(j));
  return {Kind::kLpipsLayer, j};
}

DistanceKind DistanceKind::parse(std::string_view text) {
  if (text == "lpips") return lpips();
  if (text == "mse") return mse();
  if (text == "l1") return l1();
  if (text.size() == 6 && text.substr(0, 5) == "lpips" && text[5] >= '1' && text[5] <= '5') {
    return lpips_layer(text[5] - '0');
  }
  throw ParameterError("unknown distance '" + std::string(text) +
                       "' (expected lpips, lpips1..lpips5, mse or l1)");
}

std::string DistanceKind::to_string() const {
  switch (kind) {
    case Kind::kLpipsFull:
      return "lpips";
    case Kind::kLpipsLayer:
      return "lpips" + std::to_string(layer);
    case Kind::kMse:
      return "mse";
    case Kind::kL1:
      return "l1";
  }
  return "?";
}

std::shared_ptr<const LpipsModel> LpipsModel::load(const std::filesystem::path& path,
                                                   const std::string& id) {
  auto m = std::make_shared<LpipsModel>();
  m->id_ = id;
  auto impl = std::make_shared<Impl>(Impl{nn::Model::load(path)});
  const nn::Model& g = impl->model;
  if (g.input_names().size() != 1 || g.output_names().size() != 5) {
    throw AssetError("LPIPS asset '" + id + "' must have one input and five outputs");
  }
  for (int j = 0; j < 5; ++j) {
    const std::string name = "lpips.lin" + std::to_string(j);
    const nn::Tensor* w = g.initializer(name);
    if (!w || w->dtype != nn::DType::kFloat) {
      throw AssetError("LPIPS asset '" + id + "' lacks initializer " + name);
    }
    m->lin_[j].assign(w->f.begin(), w->f.end());
  }
  auto meta = [&](const std::string& key) {
    auto v = g.metadata(key);
    if (!v) throw AssetError("LPIPS asset '" + id + "' lacks metadata " + key);
    return *v;
  };
  m->shift_ = parse_triple(meta("lpips.shift"), "lpips.shift", id);
  m->scale_ = parse_triple(meta("lpips.scale"), "lpips.scale", id);
  try {
    m->eps_ = std::stod(meta("lpips.eps"));
  } catch (const std::invalid_argument&) {
    throw AssetError("LPIPS asset '" + id + "': metadata lpips.eps is not numeric");
  }
  m->impl_ = std::move(impl);
  return m;
}

FeatureStack LpipsModel::extract_features(const ImageTensor& img) const {
  if (img.channels() != 3) {
    throw GeometryError("LPIPS needs a 3-channel image, got " + img.shape_string());
  }
  const nn::Model& g = impl_->model;
  nn::Tensor x = nn::Tensor::floats({1, 3, img.height(), img.width()});
  for (int c = 0; c < 3; ++c) {
    const auto p = img.plane(c);
    for (std::size_t k = 0; k < p.size(); ++k) {
      x.f[c * p.size() + k] = static_cast<float>(((2.0 * p[k] - 1.0) - shift_[c]) / scale_[c]);
    }
  }
  auto outs = g.run({{g.input_names()[0], x}});
  FeatureStack stack;
  for (int j = 0; j < 5; ++j) {
    nn::Tensor& t = outs[j];
    if (t.rank() != 4 || t.shape[0] != 1) {
      throw AssetError("LPIPS asset '" + id_ + "': stage " + std::to_string(j + 1) +
                       " output has shape " + t.shape_string());
    }
    FeatureMap& f = stack[j];
    f.stage = j + 1;
    f.channels = static_cast<int>(t.shape[1]);
    f.height = static_cast<int>(t.shape[2]);
    f.width = static_cast<int>(t.shape[3]);
    for (float v : t.f) {
      if (!std::isfinite(v)) {
        throw NumericError("LPIPS asset '" + id_ + "': non-finite feature at stage " +
                           std::to_string(j + 1));
      }
    }
    if (static_cast<std::size_t>(f.channels) != lin_[j].size()) {
      throw AssetError("LPIPS asset '" + id_ + "': stage " + std::to_string(j + 1) + " has " +
                       std::to_string(f.channels) + " channels but lpips.lin" + std::to_string(j) +
                       " has " + std::to_string(lin_[j].size()));
    }
    f.values = std::move(t.f);
  }
  return stack;
}

std::vector<float> unit_normalize(const FeatureMap& f, double eps) {
  const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;
  std::vector<float> out(f.values.size());
  for (std::size_t p = 0; p < plane; ++p) {
    double sq = 0.0;
    for (int c = 0; c < f.channels; ++c) {
      const double v = f.values[c * plane + p];
      sq += v * v;
    }
    const double denom = std::sqrt(sq) + eps;
    for (int c = 0; c < f.channels; ++c) {
      out[c * plane + p] = static_cast<float>(f.values[c * plane + p] / denom);
    }
  }
  return out;
}

std::array<double, 5> LpipsModel::stage_terms(const FeatureStack& fx,
                                              const FeatureStack& fy) const {
  std::array<double, 5> terms{};
  for (int j = 0; j < 5; ++j) {
    const FeatureMap& a = fx[j];
    const FeatureMap& b = fy[j];
    if (a.channels != b.channels || a.height != b.height || a.width != b.width) {
      throw GeometryError("LPIPS stage " + std::to_string(j + 1) + " feature shapes differ");
    }
    const auto na = unit_normalize(a, eps_);
    const auto nb = unit_normalize(b, eps_);
    const std::size_t plane = static_cast<std::size_t>(a.height) * a.width;
    double total = 0.0;
    for (std::size_t p = 0; p < plane; ++p) {
      double acc = 0.0;
      for (int c = 0; c < a.channels; ++c) {
        const double d = static_cast<double>(na[c * plane + p]) - nb[c * plane + p];
        acc += lin_[j][c] * d * d;
      }
      total += acc;
    }
    terms[j] = total / static_cast<double>(plane);
    if (!std::isfinite(terms[j])) {
      throw NumericError("LPIPS stage " + std::to_string(j + 1) + " produced a non-finite term");
    }
  }
  return terms;
}

std::array<double, 5> LpipsModel::stage_terms(const ImageTensor& x, const ImageTensor& y) const {
  require_same_shape(x, y, "lpips");
  return stage_terms(extract_features(x), extract_features(y));
}

double mse(const ImageTensor& x, const ImageTensor& y) {
  require_same_shape(x, y, "mse");
  const auto a = x.samples();
  const auto b = y.samples();
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double l1(const ImageTensor& x, const ImageTensor& y) {
  require_same_shape(x, y, "l1");
  const auto a = x.samples();
  const auto b = y.samples();
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
  return acc / static_cast<double>(a.size());
}

Distance::Distance(DistanceKind kind, std::shared_ptr<const LpipsModel> lpips)
    : kind_(kind), lpips_(std::move(lpips)) {
  if (kind_.needs_asset() && !lpips_) {
    throw ParameterError("distance '" + kind_.to_string() + "' needs an LPIPS asset");
  }
}

double Distance::operator()(const ImageTensor& x, const ImageTensor& y) const {
  switch (kind_.kind) {
    case DistanceKind::Kind::kMse:
      return mse(x, y);
    case DistanceKind::Kind::kL1:
      return l1(x, y);
    case DistanceKind::Kind::kLpipsFull: {
      const auto t = lpips_->stage_terms(x, y);
      return t[0] + t[1] + t[2] + t[3] + t[4];
    }
    case DistanceKind::Kind::kLpipsLayer:
      return lpips_->stage_terms(x, y)[kind_.layer - 1];
  }
  return 0.0;
}

}  // namespace hfi
