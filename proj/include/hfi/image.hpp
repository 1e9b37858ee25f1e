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

#ifndef HFI_IMAGE_HPP_
#define HFI_IMAGE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hfi {

// Planar c×H×W image with double samples, row-major within each channel.
// Nominal range is [0,1]; signed values are allowed for residual images.
// Every module passes images around as values of this type.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(int channels, int height, int width, double fill = 0.0);
  // Throws ParameterError unless channels ∈ {1,3}, the sizes are positive,
  // the sample count matches and every sample is finite.
  ImageTensor(int channels, int height, int width, std::vector<double> samples);

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  bool empty() const noexcept { return samples_.empty(); }

  std::span<double> samples() noexcept { return samples_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> plane(int c) noexcept {
    return std::span<double>(samples_).subspan(c * plane_size(), plane_size());
  }
  std::span<const double> plane(int c) const noexcept {
    return std::span<const double>(samples_).subspan(c * plane_size(), plane_size());
  }

  double& operator()(int c, int y, int x) noexcept {
    return samples_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }
  double operator()(int c, int y, int x) const noexcept {
    return samples_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }

  bool same_shape(const ImageTensor& other) const noexcept {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }
  // "3x512x512"
  std::string shape_string() const;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> samples_;
};

// Throws NumericError if any sample is NaN or infinite.
void check_finite(const ImageTensor& img, const char* context);

// Throws GeometryError naming `context` unless shapes agree.
void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* context);

ImageTensor clamp01(ImageTensor img);

// Rounds every sample to the nearest k/255 after clamping, i.e. what an 8-bit
// codec boundary does to the image.
ImageTensor quantize_8bit(ImageTensor img);

ImageTensor subtract(const ImageTensor& a, const ImageTensor& b);
ImageTensor add(const ImageTensor& a, const ImageTensor& b);
// a + factor * b
ImageTensor axpy(const ImageTensor& a, double factor, const ImageTensor& b);

double max_abs_diff(const ImageTensor& a, const ImageTensor& b);

// Copies the h×w window whose top-left corner is (top, left).
ImageTensor crop(const ImageTensor& img, int top, int left, int h, int w);

// Places `img` at (top, left) on a canvas filled with `fill`.
ImageTensor pad_to(const ImageTensor& img, int height, int width, int top, int left,
                   double fill);

}  // namespace hfi

#endif  // HFI_IMAGE_HPP_
