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

// Deterministic synthetic corpora for asset-free experiments: textured RGB
// images standing in for real photographs, their reconstructions standing
// in for generated images, and background-padded variants.

#ifndef HFI_SYNTHETIC_HPP_
#define HFI_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hfi/image.hpp"
#include "hfi/reconstruct.hpp"

namespace hfi {

// Small deterministic generator (splitmix64) with platform-independent
// uniform and normal draws.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() noexcept;
  double uniform() noexcept;                    // [0,1)
  double uniform(double lo, double hi) noexcept;
  double normal() noexcept;                     // N(0,1), Box-Muller

 private:
  std::uint64_t state_;
};

// A 3-channel side×side texture in [0,1]: a colored base, a few oriented
// gratings across a wide frequency band, and pixel noise. Fully determined
// by (seed, index).
ImageTensor synthetic_texture(std::uint64_t seed, std::size_t index, int side = 128);

std::vector<ImageTensor> synthetic_corpus(std::uint64_t seed, std::size_t count, int side = 128);

// Keeps the central core_fraction·H × core_fraction·W window of `img` and
// replaces the rest with a constant border equal to the image mean. The
// core fades into the border over `ramp` pixels (raised cosine) so the
// padding does not add a step edge of its own. Size is preserved.
ImageTensor pad_background(const ImageTensor& img, double core_fraction = 0.4, int ramp = 16);

// Period-2 checkerboard: sample (y, x) is 1 when y + x is even, else 0.
ImageTensor checkerboard(int channels, int height, int width);

// Writes real/NNNN.png (textures), generated/NNNN.png (their
// reconstructions under `generator`), manifest.csv and a registry.json
// holding the default classical suite at the textures' side.
void write_synthetic_benchmark(const std::filesystem::path& dir, std::uint64_t seed,
                               std::size_t count, int side,
                               const ReconstructorHandle& generator);

}  // namespace hfi

#endif  // HFI_SYNTHETIC_HPP_
