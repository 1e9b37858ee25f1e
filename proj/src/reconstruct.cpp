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

#include "hfi/reconstruct.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

#include "hfi/error.hpp"
#include "hfi/nn/model.hpp"

namespace hfi {

class NeuralBackend {
 public:
  NeuralBackend(std::string id, std::filesystem::path encoder, std::filesystem::path decoder)
      : id_(std::move(id)), encoder_path_(std::move(encoder)), decoder_path_(std::move(decoder)) {}

  void ensure_loaded() const {
    std::call_once(once_, [this] {
      try {
        encoder_ = std::make_unique<nn::Model>(nn::Model::load(encoder_path_));
        if (!decoder_path_.empty()) {
          decoder_ = std::make_unique<nn::Model>(nn::Model::load(decoder_path_));
        }
      } catch (const Error& e) {
        load_error_ = e.what();
      }
    });
    if (!load_error_.empty()) {
      throw AssetError("reconstructor '" + id_ + "': " + load_error_);
    }
  }

  // x is [1,3,H,W] in the graph's input range.
  nn::Tensor run(const nn::Tensor& x) const {
    ensure_loaded();
    try {
      nn::Tensor y = run_single(*encoder_, x);
      if (!decoder_) return y;
      if (y.rank() != 4 || y.shape[1] % 2 != 0) {
        throw AssetError("encoder output " + y.shape_string() + " is not a moments tensor");
      }
      // Posterior mean: the first half of the moment channels.
      const std::int64_t c = y.shape[1] / 2;
      const auto plane = static_cast<std::size_t>(y.shape[2] * y.shape[3]);
      nn::Tensor mean = nn::Tensor::floats({y.shape[0], c, y.shape[2], y.shape[3]});
      for (std::int64_t b = 0; b < y.shape[0]; ++b) {
        std::copy_n(y.f.begin() + static_cast<std::ptrdiff_t>(b * 2 * c * plane),
                    static_cast<std::size_t>(c) * plane,
                    mean.f.begin() + static_cast<std::ptrdiff_t>(b * c * plane));
      }
      return run_single(*decoder_, mean);
    } catch (const AssetError& e) {
      throw AssetError("reconstructor '" + id_ + "': " + e.what());
    }
  }

 private:
  static nn::Tensor run_single(const nn::Model& m, const nn::Tensor& x) {
    if (m.input_names().size() != 1) throw AssetError("graph must have exactly one input");
    auto out = m.run({{m.input_names()[0], x}});
    if (out.empty() || out[0].dtype != nn::DType::kFloat) {
      throw AssetError("graph produced no float output");
    }
    return std::move(out[0]);
  }

  std::string id_;
  std::filesystem::path encoder_path_;
  std::filesystem::path decoder_path_;
  mutable std::once_flag once_;
  mutable std::unique_ptr<nn::Model> encoder_;
  mutable std::unique_ptr<nn::Model> decoder_;
  mutable std::string load_error_;
};

namespace {

std::array<double, 4> keys_weights(double t) {
  constexpr double a = -0.5;
  auto w = [](double x) {
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
  };
  return {w(t + 1.0), w(t), w(1.0 - t), w(2.0 - t)};
}

void require_classical(const ReconstructorHandle& h, const char* op) {
  if (h.kind != ReconstructorKind::kClassical) {
    throw ContractError(std::string(op) + " requires a classical handle, got '" + h.id + "'");
  }
}

ImageTensor reconstruct_neural(const ReconstructorHandle& h, const ImageTensor& img) {
  if (img.channels() != 3 || img.height() != h.native_side || img.width() != h.native_side) {
    throw GeometryError("reconstructor '" + h.id + "' expects 3x" +
                        std::to_string(h.native_side) + "x" + std::to_string(h.native_side) +
                        ", got " + img.shape_string());
  }
  if (!h.backend) throw AssetError("reconstructor '" + h.id + "' has no asset bound");
  const std::int64_t side = h.native_side;
  nn::Tensor x = nn::Tensor::floats({1, 3, side, side});
  const auto s = img.samples();
  for (std::size_t k = 0; k < s.size(); ++k) {
    x.f[k] = static_cast<float>(h.signed_input ? 2.0 * s[k] - 1.0 : s[k]);
  }
  const nn::Tensor y = h.backend->run(x);
  if (y.shape != x.shape) {
    throw GeometryError("reconstructor '" + h.id + "' returned " + y.shape_string() +
                        " for input " + x.shape_string());
  }
  std::vector<double> out(y.f.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double v = h.signed_input ? (static_cast<double>(y.f[k]) + 1.0) * 0.5 : y.f[k];
    if (!std::isfinite(v)) throw NumericError("reconstructor '" + h.id + "' produced NaN/Inf");
    out[k] = std::clamp(v, 0.0, 1.0);
  }
  return ImageTensor(3, h.native_side, h.native_side, std::move(out));
}

}  // namespace

std::string to_string(ReconstructorKind kind) {
  return kind == ReconstructorKind::kNeural ? "neural" : "classical";
}

std::string to_string(UpsampleKind kind) {
  switch (kind) {
    case UpsampleKind::kNearest:
      return "nearest";
    case UpsampleKind::kBilinear:
      return "bilinear";
    case UpsampleKind::kBicubic:
      return "bicubic";
  }
  return "?";
}

UpsampleKind parse_upsample(std::string_view name) {
  if (name == "nearest") return UpsampleKind::kNearest;
  if (name == "bilinear") return UpsampleKind::kBilinear;
  if (name == "bicubic") return UpsampleKind::kBicubic;
  throw ParameterError("unknown upsample kind '" + std::string(name) + "'");
}

ReconstructorHandle ReconstructorHandle::classical(std::string id, int native_side, int factor,
                                                   std::optional<FilterSpec> prefilter,
                                                   UpsampleKind upsample,
                                                   std::string training_corpus) {
  ReconstructorHandle h;
  h.id = std::move(id);
  h.kind = ReconstructorKind::kClassical;
  h.native_side = native_side;
  h.factor = factor;
  h.prefilter = std::move(prefilter);
  h.upsample = upsample;
  h.training_corpus = std::move(training_corpus);
  h.validate();
  return h;
}

ReconstructorHandle ReconstructorHandle::neural(std::string id, int native_side, int factor,
                                                std::filesystem::path asset,
                                                std::string training_corpus) {
  ReconstructorHandle h;
  h.id = std::move(id);
  h.kind = ReconstructorKind::kNeural;
  h.native_side = native_side;
  h.factor = factor;
  h.asset = std::move(asset);
  h.training_corpus = std::move(training_corpus);
  h.validate();
  bind_backend(h);
  return h;
}

void bind_backend(ReconstructorHandle& h) {
  if (h.kind != ReconstructorKind::kNeural) return;
  h.backend = std::make_shared<NeuralBackend>(h.id, h.asset, h.decoder_asset);
}

void ReconstructorHandle::validate() const {
  if (id.empty()) throw ParameterError("reconstructor id is empty");
  if (native_side <= 0) throw ParameterError("reconstructor '" + id + "': native_side must be > 0");
  if (factor <= 0) throw ParameterError("reconstructor '" + id + "': factor must be > 0");
  if (native_side % factor != 0) {
    throw ParameterError("reconstructor '" + id + "': native_side " + std::to_string(native_side) +
                         " is not divisible by factor " + std::to_string(factor));
  }
  if (prefilter) prefilter->validate();
}

bool ReconstructorHandle::is_linear() const noexcept {
  if (kind != ReconstructorKind::kClassical) return false;
  if (prefilter && !prefilter->is_linear()) return false;
  return upsample == UpsampleKind::kNearest || upsample == UpsampleKind::kBilinear;
}

std::string ReconstructorHandle::describe() const {
  if (kind == ReconstructorKind::kNeural) {
    std::string s = asset.filename().string();
    if (!decoder_asset.empty()) s += "+" + decoder_asset.filename().string();
    return s;
  }
  return "s=" + std::to_string(factor) +
         ",prefilter=" + (prefilter ? prefilter->to_string() : std::string("none")) +
         ",up=" + to_string(upsample);
}

std::vector<ReconstructorHandle> default_classical_suite(int native_side) {
  return {
      ReconstructorHandle::classical("classical-aa", native_side, 8, FilterSpec::gaussian(3, 0.8),
                                     UpsampleKind::kBilinear),
      ReconstructorHandle::classical("classical-alias", native_side, 8, std::nullopt,
                                     UpsampleKind::kBilinear),
      ReconstructorHandle::classical("classical-identity", native_side, 1, std::nullopt,
                                     UpsampleKind::kNearest),
  };
}

ImageTensor classical_encode(const ReconstructorHandle& h, const ImageTensor& img) {
  require_classical(h, "classical_encode");
  const ImageTensor src = h.prefilter ? apply_lowpass(img, *h.prefilter) : img;
  const int s = h.factor;
  const int lh = (src.height() + s - 1) / s;
  const int lw = (src.width() + s - 1) / s;
  ImageTensor latent(src.channels(), lh, lw);
  for (int c = 0; c < src.channels(); ++c) {
    for (int y = 0; y < lh; ++y) {
      for (int x = 0; x < lw; ++x) latent(c, y, x) = src(c, y * s, x * s);
    }
  }
  return latent;
}

ImageTensor classical_decode(const ReconstructorHandle& h, const ImageTensor& latent, int height,
                             int width) {
  require_classical(h, "classical_decode");
  const int s = h.factor;
  const int lh = latent.height();
  const int lw = latent.width();
  ImageTensor out(latent.channels(), height, width);
  auto cy = [lh](int i) { return std::clamp(i, 0, lh - 1); };
  auto cx = [lw](int i) { return std::clamp(i, 0, lw - 1); };
  for (int c = 0; c < latent.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      const int y0 = y / s;
      const double ty = static_cast<double>(y % s) / s;
      for (int x = 0; x < width; ++x) {
        const int x0 = x / s;
        const double tx = static_cast<double>(x % s) / s;
        double v = 0.0;
        switch (h.upsample) {
          case UpsampleKind::kNearest:
            v = latent(c, cy(y0), cx(x0));
            break;
          case UpsampleKind::kBilinear: {
            const double top = latent(c, cy(y0), cx(x0)) * (1 - tx) + latent(c, cy(y0), cx(x0 + 1)) * tx;
            const double bot =
                latent(c, cy(y0 + 1), cx(x0)) * (1 - tx) + latent(c, cy(y0 + 1), cx(x0 + 1)) * tx;
            v = top * (1 - ty) + bot * ty;
            break;
          }
          case UpsampleKind::kBicubic: {
            const auto wy = keys_weights(ty);
            const auto wx = keys_weights(tx);
            for (int i = 0; i < 4; ++i) {
              double row = 0.0;
              for (int j = 0; j < 4; ++j) row += wx[j] * latent(c, cy(y0 - 1 + i), cx(x0 - 1 + j));
              v += wy[i] * row;
            }
            break;
          }
        }
        out(c, y, x) = v;
      }
    }
  }
  return out;
}

ImageTensor reconstruct(const ReconstructorHandle& h, const ImageTensor& img) {
  if (h.kind == ReconstructorKind::kNeural) return reconstruct_neural(h, img);
  return clamp01(classical_decode(h, classical_encode(h, img), img.height(), img.width()));
}

void warm_up(const ReconstructorHandle& h) {
  if (h.kind != ReconstructorKind::kNeural) return;
  if (!h.backend) throw AssetError("reconstructor '" + h.id + "' has no asset bound");
  h.backend->ensure_loaded();
}

}  // namespace hfi
