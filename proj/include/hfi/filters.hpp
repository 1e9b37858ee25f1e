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

// Low-pass filter family and the high-pass residual x - F(x).
//
// All spatial filters work per channel with reflect borders (mirror without
// repeating the edge sample, i.e. "dcb|abcd|cba"). DCT nulling zeroes every
// orthonormal DCT-II coefficient whose radial index sqrt(u²+v²) exceeds the
// cutoff.

#ifndef HFI_FILTERS_HPP_
#define HFI_FILTERS_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "hfi/image.hpp"

namespace hfi {

enum class FilterKind { kGaussian, kBox, kMedian, kBilateral, kDctNull, kIdentity };

struct FilterSpec {
  FilterKind kind = FilterKind::kGaussian;
  int k = 3;                      // odd kernel size (spatial kinds)
  double sigma = 0.8;             // gaussian
  double sigma_spatial = 0.8;     // bilateral
  double sigma_range = 0.1;       // bilateral, on [0,1] intensities
  double cutoff = 36.0;           // dct_null

  static FilterSpec gaussian(int k = 3, double sigma = 0.8) {
    FilterSpec s;
    s.kind = FilterKind::kGaussian;
    s.k = k;
    s.sigma = sigma;
    return s;
  }
  static FilterSpec box(int k = 3) {
    FilterSpec s;
    s.kind = FilterKind::kBox;
    s.k = k;
    return s;
  }
  static FilterSpec median(int k = 3) {
    FilterSpec s;
    s.kind = FilterKind::kMedian;
    s.k = k;
    return s;
  }
  static FilterSpec bilateral(int k = 3, double sigma_spatial = 0.8, double sigma_range = 0.1) {
    FilterSpec s;
    s.kind = FilterKind::kBilateral;
    s.k = k;
    s.sigma_spatial = sigma_spatial;
    s.sigma_range = sigma_range;
    return s;
  }
  static FilterSpec dct(double cutoff = 36.0) {
    FilterSpec s;
    s.kind = FilterKind::kDctNull;
    s.cutoff = cutoff;
    return s;
  }
  static FilterSpec identity() {
    FilterSpec s;
    s.kind = FilterKind::kIdentity;
    return s;
  }

  // Throws ParameterError if a field read by `kind` is out of range.
  void validate() const;

  // Linear (no clamping, no data-dependent weights): gaussian, box, identity.
  bool is_linear() const noexcept {
    return kind == FilterKind::kGaussian || kind == FilterKind::kBox ||
           kind == FilterKind::kIdentity;
  }

  // Canonical text: "gaussian:k=3,sigma=0.8", "box:k=3", "median:k=3",
  // "bilateral:k=3,sigma_s=0.8,sigma_r=0.1", "dct:f=36", "identity".
  // Numbers use the shortest round-tripping decimal form.
  std::string to_string() const;
  // Inverse of to_string(). Omitted parameters take their defaults.
  static FilterSpec parse(std::string_view text);

  friend bool operator==(const FilterSpec& a, const FilterSpec& b) {
    return a.to_string() == b.to_string();
  }
};

// Normalized taps w_i ∝ exp(-i²/(2σ²)), i = -(k-1)/2 .. (k-1)/2.
std::vector<double> gaussian_kernel_1d(int k, double sigma);

// Maps an out-of-range index into [0, n) by mirror reflection without edge
// repeat. n == 1 always maps to 0.
int reflect_index(int i, int n) noexcept;

ImageTensor apply_lowpass(const ImageTensor& img, const FilterSpec& spec);

// img - apply_lowpass(img, spec); values may be negative.
ImageTensor highpass_residual(const ImageTensor& img, const FilterSpec& spec);

// Orthonormal 2-D DCT-II of every channel (same shape as the input; the
// coefficient for frequency (u,v) of channel c sits at (c, u, v)).
ImageTensor dct2(const ImageTensor& img);
// Orthonormal 2-D DCT-III, the exact inverse of dct2.
ImageTensor idct2(const ImageTensor& coeffs);

// dct_null without the final clamp to [0,1].
ImageTensor dct_null_unclamped(const ImageTensor& img, double cutoff);
ImageTensor dct_null(const ImageTensor& img, double cutoff);

}  // namespace hfi

#endif  // HFI_FILTERS_HPP_
