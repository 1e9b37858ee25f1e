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

#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "hfi/distance.hpp"
#include "hfi/error.hpp"
#include "hfi/imaging.hpp"
#include "hfi/synthetic.hpp"
#include "test_util.hpp"

namespace hfi {
namespace {

using testing::fixture_dir;
using testing::random_image;

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(ImageTensor, RejectsBadShapesAndNonFiniteSamples) {
  EXPECT_THROW(ImageTensor(2, 2, 2, std::vector<double>(8)), ParameterError);
  EXPECT_THROW(ImageTensor(1, 2, 2, std::vector<double>(3)), ParameterError);
  EXPECT_THROW(ImageTensor(1, 1, 1, std::vector<double>{NAN}), ParameterError);
  EXPECT_THROW(ImageTensor(3, 0, 4), ParameterError);
  ImageTensor ok(3, 2, 5);
  EXPECT_EQ(ok.size(), 30u);
  EXPECT_EQ(ok.shape_string(), "3x2x5");
}

TEST(DecodeImage, WhitePngIsAllOnes) {
  const ImageTensor white(3, 2, 2, 1.0);
  const auto img = decode_image(encode_png(white));
  ASSERT_EQ(img.channels(), 3);
  for (double s : img.samples()) EXPECT_EQ(s, 1.0);
}

TEST(DecodeImage, BlackPixelIsZero) {
  const auto img = decode_image(encode_png(ImageTensor(3, 1, 1, 0.0)));
  ASSERT_EQ(img.size(), 3u);
  for (double s : img.samples()) EXPECT_EQ(s, 0.0);
}

TEST(DecodeImage, GrayscaleIsReplicated) {
  std::mt19937_64 rng(1);
  const auto gray = quantize_8bit(random_image(rng, 1, 5, 7));
  const auto img = decode_image(encode_png(gray));
  ASSERT_EQ(img.channels(), 3);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 7; ++x) EXPECT_EQ(img(c, y, x), gray(0, y, x));
    }
  }
}

TEST(DecodeImage, AlphaIsDiscarded) {
  const auto img = read_image(fixture_dir() / "rgba.png");
  ASSERT_EQ(img.channels(), 3);
  ASSERT_EQ(img.height(), 2);
  // Pixel (1,0) is fully transparent blue; color survives untouched.
  EXPECT_EQ(img(0, 1, 0), 0.0);
  EXPECT_EQ(img(2, 1, 0), 1.0);
  EXPECT_EQ(img(1, 0, 1), 1.0);
}

TEST(DecodeImage, MalformedStreamsReportAnOffset) {
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5};
  EXPECT_THROW(decode_image(junk), DecodeError);
  auto png = read_bytes(fixture_dir() / "img0.png");
  png.resize(png.size() / 2);
  try {
    decode_image(png);
    FAIL() << "truncated PNG decoded";
  } catch (const DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos);
  }
  auto jpg = read_bytes(fixture_dir() / "img0.jpg");
  jpg.resize(40);
  EXPECT_THROW(decode_image(jpg), DecodeError);
}

TEST(DecodeImage, BaselineAndProgressiveJpegAgree) {
  const auto base = read_image(fixture_dir() / "img0.jpg");
  const auto prog = read_image(fixture_dir() / "img0_progressive.jpg");
  EXPECT_EQ(base.shape_string(), "3x32x32");
  EXPECT_EQ(max_abs_diff(base, prog), 0.0);
}

// Regression value: decode the fixture JPEG, re-encode at quality 100,
// decode again. Nonzero because the default encoder subsamples chroma.
TEST(DecodeImage, JpegReencodeAtQuality100IsLossy) {
  const auto x = read_image(fixture_dir() / "img0.jpg");
  const auto y = decode_image(encode_jpeg(x, 100));
  EXPECT_DOUBLE_EQ(max_abs_diff(x, y), 18.0 / 255.0);
}

TEST(DecodeImage, PngRoundTripIsExactForQuantizedImages) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> side(1, 40);
    const auto x = quantize_8bit(random_image(rng, 3, side(rng), side(rng)));
    EXPECT_EQ(decode_image(encode_png(x)), x);
  }
}

TEST(FitToDim, CropsTheLongAxisWithoutResizing) {
  std::mt19937_64 rng(2);
  const auto x = random_image(rng, 3, 768, 512);
  const auto y = fit_to_dim(x, 512);
  EXPECT_EQ(y.shape_string(), "3x512x512");
  EXPECT_EQ(y, center_crop(x, 512, 512));
  EXPECT_EQ(y(1, 0, 0), x(1, 128, 0));
}

TEST(FitToDim, NativeSizeIsIdentity) {
  std::mt19937_64 rng(3);
  const auto x = random_image(rng, 3, 512, 512);
  EXPECT_EQ(fit_to_dim(x, 512), x);
}

TEST(FitToDim, MixedAxesCropThenResize) {
  std::mt19937_64 rng(4);
  const auto x = random_image(rng, 3, 300, 600);
  const auto y = fit_to_dim(x, 512);
  EXPECT_EQ(y.shape_string(), "3x512x512");
  EXPECT_EQ(y, clamp01(resize_bicubic(center_crop(x, 300, 512), 512, 512)));
}

TEST(FitToDim, PropertyAlwaysSquareAndIdempotent) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 90);
  for (int trial = 0; trial < 60; ++trial) {
    const int side = 1 + trial % 48;
    const auto x = random_image(rng, 3, dim(rng), dim(rng));
    const auto once = fit_to_dim(x, side);
    ASSERT_EQ(once.height(), side);
    ASSERT_EQ(once.width(), side);
    EXPECT_EQ(fit_to_dim(once, side), once) << x.shape_string() << " -> " << side;
  }
}

TEST(ResizeBicubic, PreservesConstants) {
  const ImageTensor c(3, 7, 5, 0.37);
  const auto y = resize_bicubic(c, 13, 11);
  for (double s : y.samples()) EXPECT_NEAR(s, 0.37, 1e-12);
}

TEST(Corrupt, CropFractionOneIsIdentity) {
  std::mt19937_64 rng(6);
  const auto x = random_image(rng, 3, 24, 30);
  EXPECT_EQ(corrupt(x, CorruptionSpec::crop(1.0)), x);
}

TEST(Corrupt, JpegQuality100KeepsConstantImages) {
  const ImageTensor c(3, 16, 16, 100.0 / 255.0);
  const auto y = corrupt(c, CorruptionSpec::jpeg(100));
  EXPECT_LE(max_abs_diff(c, y), 1.0 / 255.0 + 1e-12);
}

// Regression value for the codec build recorded in reports.
TEST(Corrupt, JpegQuality50DamagesACheckerboard) {
  const auto cb = checkerboard(3, 16, 16);
  const double m = mse(cb, corrupt(cb, CorruptionSpec::jpeg(50)));
  EXPECT_GT(m, 0.0);
  EXPECT_NEAR(m, 0.00082131872356785843, 1e-12);
}

TEST(Corrupt, PropertyCropPreservesDimensions) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> dim(1, 50);
  std::uniform_real_distribution<double> frac(0.01, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = random_image(rng, 3, dim(rng), dim(rng));
    const auto y = corrupt(x, CorruptionSpec::crop(frac(rng)));
    EXPECT_TRUE(y.same_shape(x));
    for (double s : y.samples()) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(Corrupt, RejectsOutOfRangeParameters) {
  const ImageTensor x(3, 8, 8, 0.5);
  EXPECT_THROW(corrupt(x, CorruptionSpec::jpeg(0)), ParameterError);
  EXPECT_THROW(corrupt(x, CorruptionSpec::jpeg(101)), ParameterError);
  EXPECT_THROW(corrupt(x, CorruptionSpec::crop(0.0)), ParameterError);
  EXPECT_THROW(corrupt(x, CorruptionSpec::crop(1.5)), ParameterError);
  EXPECT_EQ(CorruptionSpec::jpeg(50).to_string(), "jpeg:q=50");
  EXPECT_EQ(CorruptionSpec::crop(0.8).to_string(), "crop:f=0.8");
}

TEST(CodecVersions, NamesBothLibraries) {
  const auto v = codec_versions();
  EXPECT_NE(v.find("libpng"), std::string::npos);
  EXPECT_NE(v.find("libjpeg"), std::string::npos);
}

}  // namespace
}  // namespace hfi
