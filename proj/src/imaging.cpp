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

#include "hfi/imaging.hpp"

#include <png.h>
#include <stdio.h>
// jpeglib.h needs size_t and FILE before inclusion.
#include <jerror.h>
#include <jpeglib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hfi/error.hpp"

#define HFI_STRINGIFY_IMPL(x) #x
#define HFI_STRINGIFY(x) HFI_STRINGIFY_IMPL(x)

namespace hfi {
namespace {

constexpr std::array<std::uint8_t, 8> kPngMagic = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

ImageFormat sniff(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= kPngMagic.size() &&
      std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin())) {
    return ImageFormat::kPng;
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return ImageFormat::kJpeg;
  }
  throw DecodeError("unrecognized image signature", 0);
}

// ---------------------------------------------------------------- PNG

ImageTensor decode_png(std::span<const std::uint8_t> bytes) {
  // fmemopen gives us a stream whose position tells where libpng stopped.
  FILE* stream = fmemopen(const_cast<std::uint8_t*>(bytes.data()), bytes.size(), "rb");
  if (stream == nullptr) throw DecodeError("cannot open PNG stream", 0);

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  auto fail = [&](const char* stage) {
    const long pos = std::ftell(stream);
    std::string message = std::string("PNG ") + stage + ": " + image.message;
    png_image_free(&image);
    std::fclose(stream);
    throw DecodeError(message, pos < 0 ? 0 : static_cast<std::size_t>(pos));
  };
  if (!png_image_begin_read_from_stdio(&image, stream)) fail("header");
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) fail("data");
  std::fclose(stream);

  const int h = static_cast<int>(image.height);
  const int w = static_cast<int>(image.width);
  ImageTensor out(3, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t* px = &rgba[(static_cast<std::size_t>(y) * w + x) * 4];
      for (int c = 0; c < 3; ++c) out(c, y, x) = px[c] / 255.0;
    }
  }
  return out;
}

std::vector<std::uint8_t> to_interleaved_8bit(const ImageTensor& img) {
  const int c = img.channels();
  std::vector<std::uint8_t> buf(img.size());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int k = 0; k < c; ++k) {
        const double v = std::clamp(img(k, y, x), 0.0, 1.0);
        buf[(static_cast<std::size_t>(y) * img.width() + x) * c + k] =
            static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  return buf;
}

// ---------------------------------------------------------------- JPEG

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

[[noreturn]] void jpeg_on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_on_message(j_common_ptr cinfo, int level) {
  // A truncated stream is only a warning for libjpeg; treat it as fatal.
  if (level < 0 && cinfo->err->msg_code == JWRN_JPEG_EOF) jpeg_on_error(cinfo);
}

// Plain C-style body so that longjmp never skips a destructor.
bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& rgb,
                     int& width, int& height, std::string& message, std::size_t& offset) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_on_error;
  err.mgr.emit_message = jpeg_on_message;
  if (setjmp(err.jump)) {
    message = err.message;
    offset = cinfo.src != nullptr ? bytes.size() - cinfo.src->bytes_in_buffer : 0;
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
    std::snprintf(err.message, sizeof(err.message), "CMYK JPEG is not supported");
    std::longjmp(err.jump, 1);
  }
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  rgb.resize(static_cast<std::size_t>(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = &rgb[static_cast<std::size_t>(cinfo.output_scanline) * width * 3];
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

ImageTensor decode_jpeg(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> rgb;
  int w = 0;
  int h = 0;
  std::string message;
  std::size_t offset = 0;
  if (!decode_jpeg_raw(bytes, rgb, w, h, message, offset)) {
    throw DecodeError("JPEG: " + message, offset);
  }
  ImageTensor out(3, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        out(c, y, x) = rgb[(static_cast<std::size_t>(y) * w + x) * 3 + c] / 255.0;
      }
    }
  }
  return out;
}

bool encode_jpeg_raw(const std::vector<std::uint8_t>& pixels, int width, int height,
                     int channels, int quality, unsigned char*& out, unsigned long& out_size,
                     std::string& message) {
  jpeg_compress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_on_error;
  if (setjmp(err.jump)) {
    message = err.message;
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out, &out_size);
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = channels;
  cinfo.in_color_space = channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(
        &pixels[static_cast<std::size_t>(cinfo.next_scanline) * width * channels]);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

// ---------------------------------------------------------------- resampling

double keys_cubic(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

struct Taps {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

std::vector<Taps> cubic_taps(int in_size, int out_size) {
  std::vector<Taps> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int i = 0; i < out_size; ++i) {
    const double src = (i + 0.5) * scale - 0.5;
    const double base = std::floor(src);
    const double frac = src - base;
    for (int k = 0; k < 4; ++k) {
      const int idx = static_cast<int>(base) + k - 1;
      taps[i].index[k] = std::clamp(idx, 0, in_size - 1);
      taps[i].weight[k] = keys_cubic(frac - (k - 1));
    }
  }
  return taps;
}

}  // namespace

ImageTensor decode_image(std::span<const std::uint8_t> bytes, ImageFormat hint) {
  if (bytes.empty()) throw DecodeError("empty image stream", 0);
  const ImageFormat format = hint == ImageFormat::kAuto ? sniff(bytes) : hint;
  return format == ImageFormat::kPng ? decode_png(bytes) : decode_jpeg(bytes);
}

ImageTensor read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string(), 0);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what(), e.offset());
  }
}

std::vector<std::uint8_t> encode_png(const ImageTensor& img) {
  const std::vector<std::uint8_t> pixels = to_interleaved_8bit(img);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_jpeg(const ImageTensor& img, int quality) {
  if (quality < 1 || quality > 100) {
    throw ParameterError("JPEG quality must be in [1,100], got " + std::to_string(quality));
  }
  const std::vector<std::uint8_t> pixels = to_interleaved_8bit(img);
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  std::string message;
  const bool ok = encode_jpeg_raw(pixels, img.width(), img.height(), img.channels(), quality,
                                  buffer, size, message);
  std::vector<std::uint8_t> out;
  if (ok) out.assign(buffer, buffer + size);
  std::free(buffer);
  if (!ok) throw Error("JPEG encode: " + message);
  return out;
}

void write_png(const ImageTensor& img, const std::filesystem::path& path) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::string codec_versions() {
  std::ostringstream os;
  os << "libpng " << png_get_libpng_ver(nullptr) << "; libjpeg " << JPEG_LIB_VERSION;
#ifdef LIBJPEG_TURBO_VERSION
  os << " (libjpeg-turbo " << HFI_STRINGIFY(LIBJPEG_TURBO_VERSION) << ")";
#endif
  return os.str();
}

ImageTensor resize_bicubic(const ImageTensor& img, int height, int width) {
  if (height <= 0 || width <= 0) throw ParameterError("resize target must be positive");
  if (img.height() == height && img.width() == width) return img;

  const auto htaps = cubic_taps(img.width(), width);
  const auto vtaps = cubic_taps(img.height(), height);
  ImageTensor horizontal(img.channels(), img.height(), width);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < width; ++x) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += htaps[x].weight[k] * img(c, y, htaps[x].index[k]);
        horizontal(c, y, x) = acc;
      }
    }
  }
  ImageTensor out(img.channels(), height, width);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          acc += vtaps[y].weight[k] * horizontal(c, vtaps[y].index[k], x);
        }
        out(c, y, x) = acc;
      }
    }
  }
  return out;
}

ImageTensor center_crop(const ImageTensor& img, int height, int width) {
  height = std::min(height, img.height());
  width = std::min(width, img.width());
  return crop(img, (img.height() - height) / 2, (img.width() - width) / 2, height, width);
}

ImageTensor fit_to_dim(const ImageTensor& img, int side) {
  if (side <= 0) throw ParameterError("fit_to_dim side must be positive");
  ImageTensor cropped = center_crop(img, side, side);
  if (cropped.height() == side && cropped.width() == side) return cropped;
  return clamp01(resize_bicubic(cropped, side, side));
}

void CorruptionSpec::validate() const {
  if (kind == Kind::kJpeg && (jpeg_quality < 1 || jpeg_quality > 100)) {
    throw ParameterError("JPEG quality must be in [1,100], got " + std::to_string(jpeg_quality));
  }
  if (kind == Kind::kCrop && !(crop_fraction > 0.0 && crop_fraction <= 1.0)) {
    throw ParameterError("crop fraction must be in (0,1], got " + std::to_string(crop_fraction));
  }
}

std::string CorruptionSpec::to_string() const {
  if (kind == Kind::kJpeg) return "jpeg:q=" + std::to_string(jpeg_quality);
  std::ostringstream os;
  os << "crop:f=" << crop_fraction;
  return os.str();
}

ImageTensor corrupt(const ImageTensor& img, const CorruptionSpec& spec) {
  spec.validate();
  if (img.channels() != 3) throw ParameterError("corrupt expects a 3-channel image");
  if (spec.kind == CorruptionSpec::Kind::kJpeg) {
    return decode_image(encode_jpeg(img, spec.jpeg_quality), ImageFormat::kJpeg);
  }
  const int h = std::max(1, static_cast<int>(std::lround(spec.crop_fraction * img.height())));
  const int w = std::max(1, static_cast<int>(std::lround(spec.crop_fraction * img.width())));
  if (h == img.height() && w == img.width()) return img;
  return clamp01(resize_bicubic(center_crop(img, h, w), img.height(), img.width()));
}

}  // namespace hfi
