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

#include "hfi/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "hfi/error.hpp"
#include "hfi/evaluate.hpp"
#include "hfi/imaging.hpp"

namespace hfi {

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

double SplitMix64::normal() noexcept {
  double u = uniform();
  while (u <= 0.0) u = uniform();
  const double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

ImageTensor synthetic_texture(std::uint64_t seed, std::size_t index, int side) {
  if (side <= 0) throw ParameterError("texture side must be positive");
  SplitMix64 seeder(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
  SplitMix64 rng(seeder.next());

  double base[3];
  for (double& b : base) b = rng.uniform(0.3, 0.7);

  struct Grating {
    double fx, fy, phase, amp, mix[3];
  };
  // Per-image detail level: the highest grating frequency varies from
  // well below the latent Nyquist rate to near the pixel Nyquist rate, so
  // the corpus spans smooth and busy images.
  const double f_max = std::exp(rng.uniform(std::log(0.02), std::log(0.45)));
  const int n = 2 + static_cast<int>(rng.uniform() * 5.0);
  std::vector<Grating> gratings(n);
  for (auto& g : gratings) {
    // Log-uniform radial frequency in cycles per pixel.
    const double f = std::exp(rng.uniform(std::log(0.01), std::log(f_max)));
    const double theta = rng.uniform(0.0, std::numbers::pi);
    g.fx = f * std::cos(theta);
    g.fy = f * std::sin(theta);
    g.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    g.amp = rng.uniform(0.03, 0.15);
    for (double& m : g.mix) m = rng.uniform(0.5, 1.0);
  }
  const double noise = std::exp(rng.uniform(std::log(0.0005), std::log(0.04)));

  ImageTensor img(3, side, side);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        double v = base[c];
        for (const auto& g : gratings) {
          v += g.amp * g.mix[c] *
               std::sin(2.0 * std::numbers::pi * (g.fx * x + g.fy * y) + g.phase);
        }
        img(c, y, x) = v;
      }
    }
  }
  for (double& s : img.samples()) s = std::clamp(s + noise * rng.normal(), 0.0, 1.0);
  return img;
}

std::vector<ImageTensor> synthetic_corpus(std::uint64_t seed, std::size_t count, int side) {
  std::vector<ImageTensor> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(synthetic_texture(seed, i, side));
  return out;
}

ImageTensor pad_background(const ImageTensor& img, double core_fraction, int ramp) {
  if (!(core_fraction > 0.0 && core_fraction <= 1.0)) {
    throw ParameterError("core fraction must be in (0,1]");
  }
  if (ramp < 0) throw ParameterError("ramp width must be >= 0");
  double fill = 0.0;
  for (double v : img.samples()) fill += v;
  fill /= static_cast<double>(img.size());

  // Separable raised-cosine window: 1 on the core, 0 beyond core + ramp.
  auto window = [&](int n) {
    const int core = std::max(1, static_cast<int>(std::lround(core_fraction * n)));
    const int lo = (n - core) / 2;
    const int hi = lo + core - 1;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
      const int d = i < lo ? lo - i : (i > hi ? i - hi : 0);
      if (d == 0) {
        w[i] = 1.0;
      } else if (d >= ramp) {
        w[i] = 0.0;
      } else {
        w[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * d / ramp));
      }
    }
    return w;
  };
  const auto wy = window(img.height());
  const auto wx = window(img.width());
  ImageTensor out = img;
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const double w = wy[y] * wx[x];
        out(c, y, x) = w * img(c, y, x) + (1.0 - w) * fill;
      }
    }
  }
  return out;
}

ImageTensor checkerboard(int channels, int height, int width) {
  ImageTensor img(channels, height, width);
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) img(c, y, x) = (y + x) % 2 == 0 ? 1.0 : 0.0;
    }
  }
  return img;
}

void write_synthetic_benchmark(const std::filesystem::path& dir, std::uint64_t seed,
                               std::size_t count, int side,
                               const ReconstructorHandle& generator) {
  std::filesystem::create_directories(dir / "real");
  std::filesystem::create_directories(dir / "generated");
  DatasetManifest manifest;
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.png", i);
    const ImageTensor x = synthetic_texture(seed, i, side);
    write_png(x, dir / "real" / name);
    write_png(reconstruct(generator, x), dir / "generated" / name);
    manifest.entries.push_back({std::string("real/") + name, Label::kReal, "texture", ""});
    manifest.entries.push_back(
        {std::string("generated/") + name, Label::kGenerated, generator.id, ""});
  }
  // Real rows first, then generated, so the file reads naturally.
  std::stable_sort(manifest.entries.begin(), manifest.entries.end(),
                   [](const ManifestEntry& a, const ManifestEntry& b) {
                     return a.label == Label::kReal && b.label != Label::kReal;
                   });
  write_manifest_csv(manifest, dir / "manifest.csv");

  nlohmann::ordered_json reg;
  reg["reconstructors"] = nlohmann::ordered_json::array();
  for (const auto& h : default_classical_suite(side)) {
    reg["reconstructors"].push_back({{"id", h.id},
                                     {"kind", "classical"},
                                     {"native_side", h.native_side},
                                     {"factor", h.factor},
                                     {"training_corpus", h.training_corpus},
                                     {"prefilter", h.prefilter ? h.prefilter->to_string() : "none"},
                                     {"upsample", to_string(h.upsample)}});
  }
  reg["distance_assets"] = nlohmann::ordered_json::array();
  std::ofstream out(dir / "registry.json");
  if (!out) throw Error("cannot write " + (dir / "registry.json").string());
  out << reg.dump(2) << "\n";
}

}  // namespace hfi
