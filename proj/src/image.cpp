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

#include "hfi/image.hpp"

#include <algorithm>
#include <cmath>

#include "hfi/error.hpp"

namespace hfi {
namespace {

void validate_geometry(int channels, int height, int width) {
  if (channels != 1 && channels != 3) {
    throw ParameterError("image channels must be 1 or 3, got " + std::to_string(channels));
  }
  if (height <= 0 || width <= 0) {
    throw ParameterError("image dimensions must be positive, got " + std::to_string(height) +
                         "x" + std::to_string(width));
  }
}

}  // namespace

ImageTensor::ImageTensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  validate_geometry(channels, height, width);
  samples_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

ImageTensor::ImageTensor(int channels, int height, int width, std::vector<double> samples)
    : channels_(channels), height_(height), width_(width), samples_(std::move(samples)) {
  validate_geometry(channels, height, width);
  if (samples_.size() != static_cast<std::size_t>(channels) * height * width) {
    throw ParameterError("sample count " + std::to_string(samples_.size()) +
                         " does not match shape " + shape_string());
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) throw ParameterError("image samples must be finite");
  }
}

std::string ImageTensor::shape_string() const {
  return std::to_string(channels_) + "x" + std::to_string(height_) + "x" +
         std::to_string(width_);
}

void check_finite(const ImageTensor& img, const char* context) {
  for (double v : img.samples()) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite sample in ") + context);
    }
  }
}

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* context) {
  if (!a.same_shape(b)) {
    throw GeometryError(std::string(context) + ": shape mismatch " + a.shape_string() +
                        " vs " + b.shape_string());
  }
}

ImageTensor clamp01(ImageTensor img) {
  for (double& v : img.samples()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

ImageTensor quantize_8bit(ImageTensor img) {
  for (double& v : img.samples()) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  return img;
}

ImageTensor subtract(const ImageTensor& a, const ImageTensor& b) {
  return axpy(a, -1.0, b);
}

ImageTensor add(const ImageTensor& a, const ImageTensor& b) { return axpy(a, 1.0, b); }

ImageTensor axpy(const ImageTensor& a, double factor, const ImageTensor& b) {
  require_same_shape(a, b, "axpy");
  ImageTensor out = a;
  auto dst = out.samples();
  auto src = b.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += factor * src[i];
  return out;
}

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  auto sa = a.samples();
  auto sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) worst = std::max(worst, std::abs(sa[i] - sb[i]));
  return worst;
}

ImageTensor crop(const ImageTensor& img, int top, int left, int h, int w) {
  if (top < 0 || left < 0 || h <= 0 || w <= 0 || top + h > img.height() ||
      left + w > img.width()) {
    throw GeometryError("crop window out of bounds for " + img.shape_string());
  }
  ImageTensor out(img.channels(), h, w);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out(c, y, x) = img(c, top + y, left + x);
    }
  }
  return out;
}

ImageTensor pad_to(const ImageTensor& img, int height, int width, int top, int left,
                   double fill) {
  if (top < 0 || left < 0 || top + img.height() > height || left + img.width() > width) {
    throw GeometryError("pad_to: image does not fit canvas");
  }
  ImageTensor out(img.channels(), height, width, fill);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) out(c, top + y, left + x) = img(c, y, x);
    }
  }
  return out;
}

}  // namespace hfi
