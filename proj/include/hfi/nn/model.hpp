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

// A small CPU interpreter for ONNX inference graphs.
//
// It covers the operator subset produced by exporting convolutional
// autoencoders (SD-family VAEs) and VGG-style feature extractors from
// PyTorch: convolutions, normalization, pooling, resampling, attention
// (MatMul/Softmax/Transpose) and the shape arithmetic around them. Tensors
// are float32 or int64; other element types are converted on load.
//
// A loaded Model is immutable. run() keeps all intermediate state on the
// caller's stack, so one Model may serve any number of threads.

#ifndef HFI_NN_MODEL_HPP_
#define HFI_NN_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hfi::nn {

enum class DType { kFloat, kInt64 };

struct Tensor {
  DType dtype = DType::kFloat;
  std::vector<std::int64_t> shape;
  std::vector<float> f;          // dtype == kFloat
  std::vector<std::int64_t> i;   // dtype == kInt64

  static Tensor floats(std::vector<std::int64_t> shape, std::vector<float> data = {});
  static Tensor ints(std::vector<std::int64_t> shape, std::vector<std::int64_t> data = {});

  std::size_t numel() const noexcept;
  std::size_t rank() const noexcept { return shape.size(); }
  std::string shape_string() const;
  // Reads element k as double regardless of dtype.
  double value(std::size_t k) const noexcept {
    return dtype == DType::kFloat ? static_cast<double>(f[k]) : static_cast<double>(i[k]);
  }
};

struct Attribute {
  std::int64_t i = 0;
  float f = 0.0f;
  std::string s;
  std::vector<std::int64_t> ints;
  std::vector<float> floats;
  std::shared_ptr<const Tensor> t;
};

struct Node {
  std::string op;
  std::string name;
  std::vector<std::string> inputs;   // "" marks an omitted optional input
  std::vector<std::string> outputs;
  std::map<std::string, Attribute, std::less<>> attrs;

  const Attribute* attr(std::string_view key) const;
  std::int64_t attr_int(std::string_view key, std::int64_t fallback) const;
  float attr_float(std::string_view key, float fallback) const;
  std::string attr_string(std::string_view key, std::string fallback) const;
  std::vector<std::int64_t> attr_ints(std::string_view key) const;
};

class Model {
 public:
  // Throws AssetError if the file is unreadable, not a valid ONNX model, or
  // uses an operator the interpreter does not implement.
  static Model load(const std::filesystem::path& path);
  static Model from_bytes(std::span<const std::uint8_t> bytes, const std::string& origin);

  const std::vector<std::string>& input_names() const noexcept { return inputs_; }
  const std::vector<std::string>& output_names() const noexcept { return outputs_; }
  std::optional<std::string> metadata(const std::string& key) const;
  // Graph initializer by name, or nullptr.
  const Tensor* initializer(const std::string& name) const;
  std::size_t node_count() const noexcept { return nodes_.size(); }

  // Evaluates the graph. `feeds` must bind every graph input. Returns the
  // graph outputs in declaration order.
  std::vector<Tensor> run(const std::map<std::string, Tensor>& feeds) const;

 private:
  std::string origin_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::shared_ptr<const Tensor>> initializers_;
  std::map<std::string, std::string> metadata_;
  // Index of the last node reading each intermediate value.
  std::unordered_map<std::string, std::size_t> last_use_;
};

// True if `op` is implemented.
bool is_supported_op(std::string_view op);

// Executes one node. Exposed for unit tests of individual operators.
std::vector<Tensor> execute_node(const Node& node, std::span<const Tensor* const> inputs);

}  // namespace hfi::nn

#endif  // HFI_NN_MODEL_HPP_
