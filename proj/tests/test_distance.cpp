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
#include <cstdlib>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "hfi/distance.hpp"
#include "hfi/error.hpp"
#include "hfi/imaging.hpp"
#include "hfi/registry.hpp"
#include "test_util.hpp"

namespace hfi {
namespace {

using testing::fixture_dir;
using testing::random_image;
using testing::row;

nlohmann::json golden() {
  std::ifstream in(fixture_dir() / "golden.json");
  return nlohmann::json::parse(in);
}

std::shared_ptr<const LpipsModel> fixture_lpips() {
  static const auto model = [] {
    const auto reg = load_registry(fixture_dir() / "registry.json");
    return LpipsModel::load(reg.distance_assets.at(0).asset, reg.distance_assets.at(0).id);
  }();
  return model;
}

std::vector<Distance> asset_free() { return {Distance(DistanceKind::mse()), Distance(DistanceKind::l1())}; }

std::vector<Distance> every_kind() {
  auto out = asset_free();
  out.emplace_back(DistanceKind::lpips(), fixture_lpips());
  for (int j = 1; j <= 5; ++j) out.emplace_back(DistanceKind::lpips_layer(j), fixture_lpips());
  return out;
}

TEST(Distance, MseAndL1Examples) {
  EXPECT_DOUBLE_EQ(mse(row({1, 0, 1, 0}), row({1, 1, 1, 1})), 0.5);
  EXPECT_DOUBLE_EQ(l1(row({1, 0, 1, 0}), row({1, 1, 1, 0.5})), 0.375);
}

TEST(Distance, ShapeMismatchIsAGeometryError) {
  EXPECT_THROW(mse(ImageTensor(3, 4, 4), ImageTensor(3, 4, 5)), GeometryError);
  EXPECT_THROW(Distance(DistanceKind::lpips(), fixture_lpips())(ImageTensor(3, 32, 32),
                                                               ImageTensor(3, 16, 32)),
               GeometryError);
}

TEST(Distance, PropertyZeroOnIdenticalInputsNonnegativeSymmetric) {
  std::mt19937_64 rng(31);
  for (const auto& d : every_kind()) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto x = random_image(rng, 3, 32, 32);
      const auto y = random_image(rng, 3, 32, 32);
      EXPECT_NEAR(d(x, x), 0.0, 1e-7) << d.name();
      const double xy = d(x, y);
      EXPECT_GE(xy, 0.0) << d.name();
      EXPECT_EQ(xy, d(y, x)) << d.name();
    }
  }
}

TEST(Distance, PropertyMseRelaxedTriangle) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_image(rng, 3, 6, 6);
    const auto y = random_image(rng, 3, 6, 6);
    const auto z = random_image(rng, 3, 6, 6);
    EXPECT_LE(mse(x, z), 2.0 * (mse(x, y) + mse(y, z)) + 1e-15);
  }
}

TEST(DistanceKind, ParseAndPrint) {
  for (const char* t : {"lpips", "lpips1", "lpips2", "lpips5", "mse", "l1"}) {
    EXPECT_EQ(DistanceKind::parse(t).to_string(), t);
  }
  EXPECT_EQ(DistanceKind::parse("lpips2"), DistanceKind::lpips_layer(2));
  EXPECT_THROW(DistanceKind::parse("lpips6"), ParameterError);
  EXPECT_THROW(DistanceKind::parse("dists"), ParameterError);
  EXPECT_TRUE(DistanceKind::lpips().needs_asset());
  EXPECT_FALSE(DistanceKind::l1().needs_asset());
  EXPECT_THROW(Distance(DistanceKind::lpips_layer(2)), ParameterError);
}

TEST(Lpips, ContractConstantsAreLoaded) {
  const auto m = fixture_lpips();
  EXPECT_NEAR(m->shift()[0], -0.030, 1e-12);
  EXPECT_NEAR(m->scale()[2], 0.450, 1e-12);
  EXPECT_EQ(m->eps(), 1e-10);
  EXPECT_EQ(m->lin_weights(1).size(), 4u);
  EXPECT_EQ(m->lin_weights(5).size(), 32u);
}

TEST(Lpips, FeatureStackMatchesGoldenShapes) {
  const auto g = golden();
  const auto x = read_image(fixture_dir() / "img0.png");
  const auto stack = fixture_lpips()->extract_features(x);
  for (int j = 0; j < 5; ++j) {
    const auto& ref = g["lpips_stages"][j];
    const auto& f = stack[j];
    EXPECT_EQ(f.stage, j + 1);
    EXPECT_EQ(f.channels, ref["channels"].get<int>());
    EXPECT_EQ(f.height, ref["height"].get<int>());
    EXPECT_EQ(f.width, ref["width"].get<int>());
    double mean = 0.0;
    for (float v : f.values) mean += v;
    mean /= static_cast<double>(f.values.size());
    EXPECT_NEAR(mean, ref["mean"].get<double>(), 1e-5) << "stage " << j + 1;
    if (j > 0) EXPECT_LT(f.height, stack[j - 1].height);
  }
}

TEST(Lpips, DeterministicAndFiniteOnBlackImages) {
  const auto m = fixture_lpips();
  const ImageTensor black(3, 32, 32, 0.0);
  const auto a = m->extract_features(black);
  const auto b = m->extract_features(black);
  for (int j = 0; j < 5; ++j) {
    EXPECT_EQ(a[j].values, b[j].values);
    for (float v : a[j].values) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Lpips, NanInputIsANumericErrorNamingTheStage) {
  ImageTensor x(3, 32, 32, 0.5);
  x(0, 3, 3) = std::nan("");
  try {
    fixture_lpips()->extract_features(x);
    FAIL() << "NaN features accepted";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("stage 1"), std::string::npos) << e.what();
  }
}

TEST(Lpips, UnitNormalizationGivesUnitVectors) {
  const auto stack = fixture_lpips()->extract_features(read_image(fixture_dir() / "img1.png"));
  for (const auto& f : stack) {
    const auto n = unit_normalize(f, 1e-10);
    const std::size_t hw = static_cast<std::size_t>(f.height) * f.width;
    for (std::size_t p = 0; p < hw; ++p) {
      double raw = 0.0;
      double unit = 0.0;
      for (int c = 0; c < f.channels; ++c) {
        raw += static_cast<double>(f.values[c * hw + p]) * f.values[c * hw + p];
        unit += static_cast<double>(n[c * hw + p]) * n[c * hw + p];
      }
      if (std::sqrt(raw) > 1e-6) EXPECT_NEAR(std::sqrt(unit), 1.0, 1e-5);
    }
  }
}

TEST(Lpips, MatchesReferenceValuesOnGoldenPairs) {
  const auto g = golden();
  for (const auto& pair : g["lpips_pairs"]) {
    const auto x = read_image(fixture_dir() / pair["x"].get<std::string>());
    const auto y = read_image(fixture_dir() / pair["y"].get<std::string>());
    const double full = Distance(DistanceKind::lpips(), fixture_lpips())(x, y);
    EXPECT_NEAR(full, pair["lpips"].get<double>(), 1e-4) << pair["y"];
    for (int j = 1; j <= 5; ++j) {
      EXPECT_NEAR(Distance(DistanceKind::lpips_layer(j), fixture_lpips())(x, y),
                  pair["layers"][j - 1].get<double>(), 1e-4)
          << pair["y"] << " stage " << j;
    }
  }
}

TEST(Lpips, FullIsTheSumOfStageTerms) {
  std::mt19937_64 rng(33);
  std::vector<std::pair<ImageTensor, ImageTensor>> pairs = {
      {read_image(fixture_dir() / "img0.png"), read_image(fixture_dir() / "img0_blur.png")},
      {read_image(fixture_dir() / "img0.png"), read_image(fixture_dir() / "img1.png")},
      {random_image(rng, 3, 32, 32), random_image(rng, 3, 32, 32)}};
  for (const auto& [x, y] : pairs) {
    double sum = 0.0;
    for (int j = 1; j <= 5; ++j) sum += Distance(DistanceKind::lpips_layer(j), fixture_lpips())(x, y);
    EXPECT_NEAR(Distance(DistanceKind::lpips(), fixture_lpips())(x, y), sum, 1e-6);
  }
}

TEST(Lpips, MissingOrInvalidAssetsAreAssetErrors) {
  EXPECT_THROW(LpipsModel::load(fixture_dir() / "nope.onnx"), AssetError);
  // A graph without the lin heads does not satisfy the contract.
  EXPECT_THROW(LpipsModel::load(fixture_dir() / "tiny-vae-59dc354f.onnx"), AssetError);
}

// Needs an LPIPS asset with the published VGG16 backbone layout, e.g. one
// written by tests/fixtures/make_fixtures.py --full-vgg.
TEST(Lpips, FullVggBackboneChannelCounts) {
  const char* path = std::getenv("HFI_LPIPS_ASSET");
  if (!path || !*path) GTEST_SKIP() << "HFI_LPIPS_ASSET not set";
  const auto m = LpipsModel::load(path, "lpips-vgg");
  const auto stack = m->extract_features(read_image(fixture_dir() / "img0.png"));
  const int want[] = {64, 128, 256, 512, 512};
  for (int j = 0; j < 5; ++j) EXPECT_EQ(stack[j].channels, want[j]);
  EXPECT_EQ(m->lin_weights(3).size(), 256u);
}

}  // namespace
}  // namespace hfi
