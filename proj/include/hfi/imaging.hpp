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

// Image I/O and geometry normalization: PNG/JPEG codecs, bicubic resizing,
// the crop-or-resize rule that brings an image to a reconstructor's native
// side, and the JPEG/crop corruptions used by robustness sweeps.

#ifndef HFI_IMAGING_HPP_
#define HFI_IMAGING_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hfi/image.hpp"

namespace hfi {

enum class ImageFormat { kAuto, kPng, kJpeg };

// Decodes a PNG or JPEG stream into a 3-channel image in [0,1]. Alpha is
// discarded and grayscale is replicated. kAuto sniffs the magic bytes.
// Throws DecodeError with the failing byte offset on malformed input.
ImageTensor decode_image(std::span<const std::uint8_t> bytes,
                         ImageFormat hint = ImageFormat::kAuto);

ImageTensor read_image(const std::filesystem::path& path);

// 8-bit encoders. Samples are clamped and rounded to k/255. A 1-channel
// image is written as grayscale.
std::vector<std::uint8_t> encode_png(const ImageTensor& img);
std::vector<std::uint8_t> encode_jpeg(const ImageTensor& img, int quality);

void write_png(const ImageTensor& img, const std::filesystem::path& path);

// Library versions behind the codecs, e.g. "libpng 1.6.37; libjpeg 80
// (libjpeg-turbo 2.1.2)". Recorded in evaluation reports.
std::string codec_versions();

// Bicubic (Keys, a = -0.5) resampling with half-pixel centers and replicated
// borders. Same-size resizes return the input unchanged. Output is not
// clamped.
ImageTensor resize_bicubic(const ImageTensor& img, int height, int width);

ImageTensor center_crop(const ImageTensor& img, int height, int width);

// Brings an image to side×side: any axis longer than `side` is center
// cropped, then if any axis is still short the result is bicubic-resized to
// side×side and clamped to [0,1].
ImageTensor fit_to_dim(const ImageTensor& img, int side);

struct CorruptionSpec {
  enum class Kind { kJpeg, kCrop };
  Kind kind = Kind::kJpeg;
  int jpeg_quality = 95;        // [1,100]
  double crop_fraction = 1.0;   // (0,1]

  static CorruptionSpec jpeg(int quality) { return {Kind::kJpeg, quality, 1.0}; }
  static CorruptionSpec crop(double fraction) { return {Kind::kCrop, 95, fraction}; }

  // Throws ParameterError when the active parameter is out of range.
  void validate() const;
  // "jpeg:q=50", "crop:f=0.8"
  std::string to_string() const;
};

// jpeg: encode at the given quality and decode back. crop: center-crop to
// round(f·H)×round(f·W) then bicubic-resize back to H×W and clamp.
// Dimensions are always preserved.
ImageTensor corrupt(const ImageTensor& img, const CorruptionSpec& spec);

}  // namespace hfi

#endif  // HFI_IMAGING_HPP_
