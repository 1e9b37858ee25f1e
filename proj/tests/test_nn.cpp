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
#include <random>

#include <gtest/gtest.h>

#include "hfi/error.hpp"
#include "hfi/nn/model.hpp"
#include "test_util.hpp"

namespace hfi::nn {
namespace {

using hfi::testing::fixture_dir;

Node node(std::string op, std::size_t n_inputs) {
  Node n;
  n.op = std::move(op);
  for (std::size_t k = 0; k < n_inputs; ++k) n.inputs.push_back("in" + std::to_string(k));
  n.outputs = {"out"};
  return n;
}

void set_ints(Node& n, const std::string& key, std::vector<std::int64_t> v) {
  n.attrs[key].ints = std::move(v);
}

Tensor run1(const Node& n, std::vector<Tensor> inputs) {
  std::vector<const Tensor*> ptrs;
  for (const auto& t : inputs) ptrs.push_back(&t);
  auto out = execute_node(n, ptrs);
  EXPECT_EQ(out.size(), 1u);
  return out.at(0);
}

void expect_floats(const Tensor& t, std::vector<std::int64_t> shape, std::vector<float> want,
                   float tol = 1e-6f) {
  ASSERT_EQ(t.dtype, DType::kFloat);
  EXPECT_EQ(t.shape, shape);
  ASSERT_EQ(t.f.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(t.f[i], want[i], tol) << "at " << i;
}

TEST(NnOps, AddBroadcastsTrailingAxes) {
  const auto a = Tensor::floats({2, 3}, {1, 2, 3, 4, 5, 6});
  const auto b = Tensor::floats({3}, {10, 20, 30});
  expect_floats(run1(node("Add", 2), {a, b}), {2, 3}, {11, 22, 33, 14, 25, 36});
  const auto col = Tensor::floats({2, 1}, {100, 200});
  expect_floats(run1(node("Mul", 2), {a, col}), {2, 3}, {100, 200, 300, 800, 1000, 1200});
}

TEST(NnOps, ConvWithPaddingAndBias) {
  // 1x1x3x3 input, one 3x3 all-ones kernel, pad 1: each output sums the
  // in-bounds neighbourhood.
  auto n = node("Conv", 3);
  set_ints(n, "pads", {1, 1, 1, 1});
  const auto x = Tensor::floats({1, 1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto w = Tensor::floats({1, 1, 3, 3}, std::vector<float>(9, 1.0f));
  const auto b = Tensor::floats({1}, {0.5f});
  expect_floats(run1(n, {x, w, b}), {1, 1, 3, 3},
                {12.5f, 21.5f, 16.5f, 27.5f, 45.5f, 33.5f, 24.5f, 39.5f, 28.5f});
}

TEST(NnOps, StridedConvAndGroups) {
  auto n = node("Conv", 2);
  set_ints(n, "strides", {2, 2});
  n.attrs["group"].i = 2;
  std::vector<float> xs(2 * 4 * 4);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<float>(i);
  const auto x = Tensor::floats({1, 2, 4, 4}, xs);
  // Channel 0 kernel picks the top-left tap, channel 1 the bottom-right.
  const auto w = Tensor::floats({2, 1, 2, 2}, {1, 0, 0, 0, 0, 0, 0, 1});
  expect_floats(run1(n, {x, w}), {1, 2, 2, 2}, {0, 2, 8, 10, 21, 23, 29, 31});
}

TEST(NnOps, MaxPoolCeilMode) {
  auto n = node("MaxPool", 1);
  set_ints(n, "kernel_shape", {2, 2});
  set_ints(n, "strides", {2, 2});
  n.attrs["ceil_mode"].i = 1;
  const auto x = Tensor::floats({1, 1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  expect_floats(run1(n, {x}), {1, 1, 2, 2}, {5, 6, 8, 9});
}

TEST(NnOps, ResizeNearestAndLinear) {
  const auto x = Tensor::floats({1, 1, 1, 2}, {0, 1});
  const auto scales = Tensor::floats({4}, {1, 1, 1, 2});
  auto n = node("Resize", 3);
  n.attrs["mode"].s = "nearest";
  n.attrs["coordinate_transformation_mode"].s = "asymmetric";
  n.attrs["nearest_mode"].s = "floor";
  expect_floats(run1(n, {x, Tensor::floats({0}), scales}), {1, 1, 1, 4}, {0, 0, 1, 1});
  n.attrs["mode"].s = "linear";
  n.attrs["coordinate_transformation_mode"].s = "half_pixel";
  expect_floats(run1(n, {x, Tensor::floats({0}), scales}), {1, 1, 1, 4}, {0, 0.25f, 0.75f, 1});
}

TEST(NnOps, ReluAndMaxPoolPropagateNan) {
  const float nan = std::nanf("");
  const auto r = run1(node("Relu", 1), {Tensor::floats({3}, {-1, nan, 2})});
  EXPECT_EQ(r.f[0], 0.0f);
  EXPECT_TRUE(std::isnan(r.f[1]));
  auto n = node("MaxPool", 1);
  set_ints(n, "kernel_shape", {2, 2});
  const auto m = run1(n, {Tensor::floats({1, 1, 2, 2}, {nan, 1, 2, 3})});
  EXPECT_TRUE(std::isnan(m.f[0]));
}

TEST(NnOps, ReshapeWithZeroAndInferredDims) {
  const auto x = Tensor::floats({2, 3, 4}, std::vector<float>(24, 1.0f));
  const auto s = Tensor::ints({2}, {0, -1});
  const auto y = run1(node("Reshape", 2), {x, s});
  EXPECT_EQ(y.shape, (std::vector<std::int64_t>{2, 12}));
}

TEST(NnOps, SliceWithNegativeIndices) {
  const auto x = Tensor::floats({1, 6}, {0, 1, 2, 3, 4, 5});
  const auto y = run1(node("Slice", 4), {x, Tensor::ints({1}, {-4}), Tensor::ints({1}, {-1}),
                                         Tensor::ints({1}, {1})});
  expect_floats(y, {1, 3}, {2, 3, 4});
}

TEST(NnOps, SoftmaxAlongLastAxis) {
  const auto x = Tensor::floats({1, 3}, {0, 0, std::log(2.0f)});
  expect_floats(run1(node("Softmax", 1), {x}), {1, 3}, {0.25f, 0.25f, 0.5f});
}

TEST(NnOps, GemmWithTransposedB) {
  auto n = node("Gemm", 3);
  n.attrs["transB"].i = 1;
  const auto a = Tensor::floats({1, 2}, {1, 2});
  const auto b = Tensor::floats({3, 2}, {1, 0, 0, 1, 1, 1});
  const auto c = Tensor::floats({3}, {0, 0, 10});
  expect_floats(run1(n, {a, b, c}), {1, 3}, {1, 2, 13});
}

TEST(NnOps, InstanceNormalization) {
  auto n = node("InstanceNormalization", 3);
  n.attrs["epsilon"].f = 0.0f;
  const auto x = Tensor::floats({1, 1, 1, 4}, {1, 2, 3, 4});
  const auto y = run1(n, {x, Tensor::floats({1}, {2}), Tensor::floats({1}, {1})});
  const float sd = std::sqrt(1.25f);
  expect_floats(y, {1, 1, 1, 4}, {1 - 3 / sd, 1 - 1 / sd, 1 + 1 / sd, 1 + 3 / sd}, 1e-5f);
}

TEST(NnOps, PadReflect) {
  auto n = node("Pad", 2);
  n.attrs["mode"].s = "reflect";
  const auto x = Tensor::floats({1, 3}, {1, 2, 3});
  expect_floats(run1(n, {x, Tensor::ints({4}, {0, 2, 0, 1})}), {1, 6}, {3, 2, 1, 2, 3, 2});
}

TEST(NnOps, TransposeAndMatMul) {
  auto t = node("Transpose", 1);
  set_ints(t, "perm", {1, 0});
  const auto a = Tensor::floats({2, 3}, {1, 2, 3, 4, 5, 6});
  const auto at = run1(t, {a});
  expect_floats(at, {3, 2}, {1, 4, 2, 5, 3, 6});
  expect_floats(run1(node("MatMul", 2), {a, at}), {2, 2}, {14, 32, 32, 77});
}

TEST(NnOps, UnsupportedOperatorsAreReported) {
  EXPECT_TRUE(is_supported_op("Conv"));
  EXPECT_TRUE(is_supported_op("InstanceNormalization"));
  EXPECT_FALSE(is_supported_op("LSTM"));
}

TEST(NnModel, LoadsFixtureGraphsAndMetadata) {
  const auto m = Model::load(fixture_dir() / "tiny-lpips-d6be253f.onnx");
  EXPECT_EQ(m.input_names().size(), 1u);
  EXPECT_EQ(m.output_names().size(), 5u);
  ASSERT_TRUE(m.metadata("lpips.eps").has_value());
  EXPECT_EQ(*m.metadata("lpips.eps"), "1e-10");
  ASSERT_NE(m.initializer("lpips.lin4"), nullptr);
  EXPECT_EQ(m.initializer("lpips.lin4")->numel(), 32u);
}

TEST(NnModel, RejectsGarbage) {
  const std::vector<std::uint8_t> junk = {0xff, 0x01, 0x02, 0x03, 0x04};
  EXPECT_THROW(Model::from_bytes(junk, "junk"), hfi::AssetError);
  EXPECT_THROW(Model::load(fixture_dir() / "nope.onnx"), hfi::AssetError);
}

}  // namespace
}  // namespace hfi::nn
