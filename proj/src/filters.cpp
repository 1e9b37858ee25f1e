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

#include "hfi/filters.hpp"

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>

#include "hfi/error.hpp"

namespace hfi {
namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_number(std::string_view text, std::string_view key) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ParameterError("filter parameter '" + std::string(key) + "' is not a number: '" +
                         std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text, std::string_view key) {
  int v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ParameterError("filter parameter '" + std::string(key) + "' is not an integer: '" +
                         std::string(text) + "'");
  }
  return v;
}

// Correlates every row (axis = 1) or column (axis = 0) of every channel with
// a symmetric kernel under reflect padding.
ImageTensor convolve_axis(const ImageTensor& img, const std::vector<double>& taps, int axis) {
  const int radius = static_cast<int>(taps.size()) / 2;
  ImageTensor out(img.channels(), img.height(), img.width());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
          const double w = taps[t + radius];
          acc += axis == 1 ? w * img(c, y, reflect_index(x + t, img.width()))
                           : w * img(c, reflect_index(y + t, img.height()), x);
        }
        out(c, y, x) = acc;
      }
    }
  }
  return out;
}

ImageTensor separable(const ImageTensor& img, const std::vector<double>& taps) {
  return convolve_axis(convolve_axis(img, taps, 1), taps, 0);
}

ImageTensor median_filter(const ImageTensor& img, int k) {
  const int r = k / 2;
  ImageTensor out(img.channels(), img.height(), img.width());
  std::vector<double> window(static_cast<std::size_t>(k) * k);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        std::size_t n = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            window[n++] = img(c, reflect_index(y + dy, img.height()),
                              reflect_index(x + dx, img.width()));
          }
        }
        auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
        std::nth_element(window.begin(), mid, window.end());
        out(c, y, x) = *mid;
      }
    }
  }
  return out;
}

ImageTensor bilateral_filter(const ImageTensor& img, const FilterSpec& spec) {
  const int r = spec.k / 2;
  const double inv_s = 1.0 / (2.0 * spec.sigma_spatial * spec.sigma_spatial);
  const double inv_r = 1.0 / (2.0 * spec.sigma_range * spec.sigma_range);
  ImageTensor out(img.channels(), img.height(), img.width());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const double center = img(c, y, x);
        double acc = 0.0;
        double norm = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double v = img(c, reflect_index(y + dy, img.height()),
                                 reflect_index(x + dx, img.width()));
            const double w = std::exp(-(dx * dx + dy * dy) * inv_s -
                                      (v - center) * (v - center) * inv_r);
            acc += w * v;
            norm += w;
          }
        }
        out(c, y, x) = acc / norm;
      }
    }
  }
  return out;
}

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

enum class DctDirection { kForward, kInverse };

// Runs an unnormalized REDFT10/REDFT01 on one plane in place.
void run_r2r(std::vector<double>& plane, int rows, int cols, DctDirection dir) {
  const fftw_r2r_kind kind = dir == DctDirection::kForward ? FFTW_REDFT10 : FFTW_REDFT01;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_r2r_2d(rows, cols, plane.data(), plane.data(), kind, kind, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("FFTW could not plan a DCT");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

// Orthonormal scale for DCT-II output index u of an n-point transform
// computed by REDFT10 (which is 2Σ x cos(...)).
double forward_scale(int u, int n) {
  return u == 0 ? std::sqrt(1.0 / (4.0 * n)) : std::sqrt(1.0 / (2.0 * n));
}

// Pre-scale that makes REDFT01 compute the orthonormal DCT-III.
double inverse_scale(int u, int n) {
  return u == 0 ? std::sqrt(1.0 / n) : 1.0 / std::sqrt(2.0 * n);
}

ImageTensor transform(const ImageTensor& img, DctDirection dir) {
  const int rows = img.height();
  const int cols = img.width();
  std::vector<double> out_samples(img.size());
  std::vector<double> plane(img.plane_size());
  for (int c = 0; c < img.channels(); ++c) {
    auto src = img.plane(c);
    std::copy(src.begin(), src.end(), plane.begin());
    if (dir == DctDirection::kInverse) {
      for (int u = 0; u < rows; ++u) {
        for (int v = 0; v < cols; ++v) {
          plane[static_cast<std::size_t>(u) * cols + v] *=
              inverse_scale(u, rows) * inverse_scale(v, cols);
        }
      }
    }
    run_r2r(plane, rows, cols, dir);
    if (dir == DctDirection::kForward) {
      for (int u = 0; u < rows; ++u) {
        for (int v = 0; v < cols; ++v) {
          plane[static_cast<std::size_t>(u) * cols + v] *=
              forward_scale(u, rows) * forward_scale(v, cols);
        }
      }
    }
    std::copy(plane.begin(), plane.end(), out_samples.begin() + c * img.plane_size());
  }
  return ImageTensor(img.channels(), rows, cols, std::move(out_samples));
}

}  // namespace

void FilterSpec::validate() const {
  const bool spatial = kind == FilterKind::kGaussian || kind == FilterKind::kBox ||
                       kind == FilterKind::kMedian || kind == FilterKind::kBilateral;
  if (spatial && (k <= 0 || k % 2 == 0)) {
    throw ParameterError("filter kernel size must be odd and positive, got " + std::to_string(k));
  }
  if (kind == FilterKind::kGaussian && !(sigma > 0.0)) {
    throw ParameterError("gaussian sigma must be positive");
  }
  if (kind == FilterKind::kBilateral && !(sigma_spatial > 0.0 && sigma_range > 0.0)) {
    throw ParameterError("bilateral sigmas must be positive");
  }
  if (kind == FilterKind::kDctNull && !(cutoff > 0.0)) {
    throw ParameterError("dct cutoff must be positive");
  }
}

std::string FilterSpec::to_string() const {
  const std::string ks = "k=" + std::to_string(k);
  switch (kind) {
    case FilterKind::kGaussian:
      return "gaussian:" + ks + ",sigma=" + format_number(sigma);
    case FilterKind::kBox:
      return "box:" + ks;
    case FilterKind::kMedian:
      return "median:" + ks;
    case FilterKind::kBilateral:
      return "bilateral:" + ks + ",sigma_s=" + format_number(sigma_spatial) +
             ",sigma_r=" + format_number(sigma_range);
    case FilterKind::kDctNull:
      return "dct:f=" + format_number(cutoff);
    case FilterKind::kIdentity:
      return "identity";
  }
  return {};
}

FilterSpec FilterSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  std::map<std::string, std::string_view, std::less<>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ParameterError("malformed filter parameter '" + std::string(item) + "' in '" +
                             std::string(text) + "'");
      }
      if (!params.emplace(std::string(item.substr(0, eq)), item.substr(eq + 1)).second) {
        throw ParameterError("duplicate filter parameter in '" + std::string(text) + "'");
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }

  FilterSpec spec;
  std::vector<std::string_view> allowed;
  if (name == "gaussian") {
    spec.kind = FilterKind::kGaussian;
    allowed = {"k", "sigma"};
  } else if (name == "box") {
    spec.kind = FilterKind::kBox;
    allowed = {"k"};
  } else if (name == "median") {
    spec.kind = FilterKind::kMedian;
    allowed = {"k"};
  } else if (name == "bilateral") {
    spec.kind = FilterKind::kBilateral;
    allowed = {"k", "sigma_s", "sigma_r"};
  } else if (name == "dct") {
    spec.kind = FilterKind::kDctNull;
    allowed = {"f"};
  } else if (name == "identity") {
    spec.kind = FilterKind::kIdentity;
  } else {
    throw ParameterError("unknown filter kind '" + std::string(name) + "'");
  }
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParameterError("filter '" + std::string(name) + "' has no parameter '" + key + "'");
    }
    if (key == "k") spec.k = parse_int(value, key);
    if (key == "sigma") spec.sigma = parse_number(value, key);
    if (key == "sigma_s") spec.sigma_spatial = parse_number(value, key);
    if (key == "sigma_r") spec.sigma_range = parse_number(value, key);
    if (key == "f") spec.cutoff = parse_number(value, key);
  }
  spec.validate();
  return spec;
}

std::vector<double> gaussian_kernel_1d(int k, double sigma) {
  if (k <= 0 || k % 2 == 0) {
    throw ParameterError("gaussian kernel size must be odd and positive, got " + std::to_string(k));
  }
  if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be positive");
  const int r = k / 2;
  std::vector<double> w(k);
  double total = 0.0;
  for (int i = -r; i <= r; ++i) {
    w[i + r] = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    total += w[i + r];
  }
  for (double& v : w) v /= total;
  return w;
}

int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

ImageTensor apply_lowpass(const ImageTensor& img, const FilterSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case FilterKind::kIdentity:
      return img;
    case FilterKind::kGaussian:
      return separable(img, gaussian_kernel_1d(spec.k, spec.sigma));
    case FilterKind::kBox:
      return separable(img, std::vector<double>(spec.k, 1.0 / spec.k));
    case FilterKind::kMedian:
      return median_filter(img, spec.k);
    case FilterKind::kBilateral:
      return bilateral_filter(img, spec);
    case FilterKind::kDctNull:
      return dct_null(img, spec.cutoff);
  }
  return img;
}

ImageTensor highpass_residual(const ImageTensor& img, const FilterSpec& spec) {
  return subtract(img, apply_lowpass(img, spec));
}

ImageTensor dct2(const ImageTensor& img) { return transform(img, DctDirection::kForward); }

ImageTensor idct2(const ImageTensor& coeffs) { return transform(coeffs, DctDirection::kInverse); }

ImageTensor dct_null_unclamped(const ImageTensor& img, double cutoff) {
  if (!(cutoff > 0.0)) throw ParameterError("dct cutoff must be positive");
  ImageTensor coeffs = dct2(img);
  const double limit = cutoff * cutoff;
  for (int c = 0; c < coeffs.channels(); ++c) {
    for (int u = 0; u < coeffs.height(); ++u) {
      for (int v = 0; v < coeffs.width(); ++v) {
        if (static_cast<double>(u) * u + static_cast<double>(v) * v > limit) coeffs(c, u, v) = 0.0;
      }
    }
  }
  return idct2(coeffs);
}

ImageTensor dct_null(const ImageTensor& img, double cutoff) {
  return clamp01(dct_null_unclamped(img, cutoff));
}

}  // namespace hfi
