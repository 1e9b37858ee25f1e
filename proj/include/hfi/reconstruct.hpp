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

// Deterministic reconstruction maps x -> AE(x).
//
// Two kinds share one handle type. Neural handles wrap an ONNX autoencoder
// asset and require a native_side×native_side RGB input. Classical handles
// are decimate-then-upsample kernels: an optional low-pass prefilter,
// phase-0 stride-s sampling, and interpolation back to the input grid with
// source coordinate i/s. Classical handles accept any image geometry.

#ifndef HFI_RECONSTRUCT_HPP_
#define HFI_RECONSTRUCT_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "hfi/filters.hpp"
#include "hfi/image.hpp"

namespace hfi {

enum class ReconstructorKind { kNeural, kClassical };
enum class UpsampleKind { kNearest, kBilinear, kBicubic };

std::string to_string(ReconstructorKind kind);
std::string to_string(UpsampleKind kind);
// Throws ParameterError for unknown names.
UpsampleKind parse_upsample(std::string_view name);

// Loaded ONNX session(s) behind a neural handle. Loading is lazy and
// thread-safe; a loaded backend is immutable.
class NeuralBackend;

struct ReconstructorHandle {
  std::string id;
  ReconstructorKind kind = ReconstructorKind::kClassical;
  int native_side = 64;
  int factor = 1;
  std::string training_corpus;

  // classical
  std::optional<FilterSpec> prefilter;
  UpsampleKind upsample = UpsampleKind::kBilinear;

  // neural: either a round-trip graph (`asset` alone) or an encoder graph
  // emitting latent moments plus a separate decoder graph.
  std::filesystem::path asset;
  std::string sha256;
  std::filesystem::path decoder_asset;
  std::string decoder_sha256;
  bool signed_input = true;  // graph expects [-1,1] rather than [0,1]
  std::shared_ptr<NeuralBackend> backend;

  static ReconstructorHandle classical(std::string id, int native_side, int factor,
                                       std::optional<FilterSpec> prefilter,
                                       UpsampleKind upsample,
                                       std::string training_corpus = "synthetic");
  static ReconstructorHandle neural(std::string id, int native_side, int factor,
                                    std::filesystem::path asset,
                                    std::string training_corpus = "");

  // Throws ParameterError if the side, factor or prefilter are invalid.
  void validate() const;

  // Classical handle whose map is linear on [0,1] inputs: prefilter none,
  // identity, gaussian or box, and nearest or bilinear upsampling.
  bool is_linear() const noexcept;

  // "s=8,prefilter=gaussian:k=3,sigma=0.8,up=bilinear" or the asset name.
  std::string describe() const;
};

// The three classical handles used for asset-free verification:
// classical-aa (s=8, gaussian k=3 σ=0.8, bilinear), classical-alias (s=8,
// no prefilter, bilinear) and classical-identity (s=1).
std::vector<ReconstructorHandle> default_classical_suite(int native_side = 128);

// Prefilter then phase-0 stride-s decimation. The latent has
// ceil(H/s)×ceil(W/s) samples per channel. Throws ContractError for neural
// handles.
ImageTensor classical_encode(const ReconstructorHandle& h, const ImageTensor& img);

// Interpolates a latent back to height×width using source coordinate i/s
// with clamped neighbours. Not clamped to [0,1].
ImageTensor classical_decode(const ReconstructorHandle& h, const ImageTensor& latent,
                             int height, int width);

// AE(x), clamped to [0,1]. Deterministic and safe to call concurrently.
// Throws GeometryError if a neural handle gets anything but a 3-channel
// native_side×native_side image, and AssetError naming the handle id if the
// asset cannot be loaded or run.
ImageTensor reconstruct(const ReconstructorHandle& h, const ImageTensor& img);

// (Re)creates the lazily loaded session for a neural handle from its asset
// fields. Call after changing `asset` or `decoder_asset`.
void bind_backend(ReconstructorHandle& h);

// Loads the neural backend now instead of on first use.
void warm_up(const ReconstructorHandle& h);

}  // namespace hfi

#endif  // HFI_RECONSTRUCT_HPP_
