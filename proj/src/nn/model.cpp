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

#include "hfi/nn/model.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "hfi/error.hpp"
#include "onnx.pb.h"

namespace hfi::nn {
namespace {

template <typename T>
std::vector<T> read_raw(const std::string& raw, std::size_t count, const std::string& name) {
  if (raw.size() != count * sizeof(T)) {
    throw AssetError("tensor '" + name + "' raw data has " + std::to_string(raw.size()) +
                     " bytes, expected " + std::to_string(count * sizeof(T)));
  }
  std::vector<T> out(count);
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

Tensor convert_tensor(const onnx::TensorProto& proto) {
  const std::string& name = proto.name();
  if (proto.data_location() == onnx::TensorProto::EXTERNAL) {
    throw AssetError("tensor '" + name + "' uses external data, which is not supported");
  }
  std::vector<std::int64_t> shape(proto.dims().begin(), proto.dims().end());
  std::size_t count = 1;
  for (auto d : shape) count *= static_cast<std::size_t>(d);
  const bool raw = proto.has_raw_data();

  switch (proto.data_type()) {
    case onnx::TensorProto::FLOAT: {
      auto data = raw ? read_raw<float>(proto.raw_data(), count, name)
                      : std::vector<float>(proto.float_data().begin(), proto.float_data().end());
      if (data.size() != count) throw AssetError("tensor '" + name + "' has wrong element count");
      return Tensor::floats(std::move(shape), std::move(data));
    }
    case onnx::TensorProto::DOUBLE: {
      auto data = raw ? read_raw<double>(proto.raw_data(), count, name)
                      : std::vector<double>(proto.double_data().begin(), proto.double_data().end());
      if (data.size() != count) throw AssetError("tensor '" + name + "' has wrong element count");
      return Tensor::floats(std::move(shape), std::vector<float>(data.begin(), data.end()));
    }
    case onnx::TensorProto::INT64: {
      auto data = raw ? read_raw<std::int64_t>(proto.raw_data(), count, name)
                      : std::vector<std::int64_t>(proto.int64_data().begin(),
                                                  proto.int64_data().end());
      if (data.size() != count) throw AssetError("tensor '" + name + "' has wrong element count");
      return Tensor::ints(std::move(shape), std::move(data));
    }
    case onnx::TensorProto::INT32: {
      std::vector<std::int64_t> data;
      if (raw) {
        auto narrow = read_raw<std::int32_t>(proto.raw_data(), count, name);
        data.assign(narrow.begin(), narrow.end());
      } else {
        data.assign(proto.int32_data().begin(), proto.int32_data().end());
      }
      if (data.size() != count) throw AssetError("tensor '" + name + "' has wrong element count");
      return Tensor::ints(std::move(shape), std::move(data));
    }
    case onnx::TensorProto::BOOL: {
      std::vector<std::int64_t> data;
      if (raw) {
        auto bytes = read_raw<std::uint8_t>(proto.raw_data(), count, name);
        data.assign(bytes.begin(), bytes.end());
      } else {
        data.assign(proto.int32_data().begin(), proto.int32_data().end());
      }
      if (data.size() != count) throw AssetError("tensor '" + name + "' has wrong element count");
      return Tensor::ints(std::move(shape), std::move(data));
    }
    default:
      throw AssetError("tensor '" + name + "' has unsupported element type " +
                       std::to_string(proto.data_type()));
  }
}

Attribute convert_attribute(const onnx::AttributeProto& proto) {
  Attribute a;
  a.i = proto.i();
  a.f = proto.f();
  a.s = proto.s();
  a.ints.assign(proto.ints().begin(), proto.ints().end());
  a.floats.assign(proto.floats().begin(), proto.floats().end());
  if (proto.has_t()) a.t = std::make_shared<const Tensor>(convert_tensor(proto.t()));
  return a;
}

}  // namespace

Tensor Tensor::floats(std::vector<std::int64_t> shape, std::vector<float> data) {
  Tensor t;
  t.dtype = DType::kFloat;
  t.shape = std::move(shape);
  t.f = std::move(data);
  if (t.f.empty()) t.f.assign(t.numel(), 0.0f);
  return t;
}

Tensor Tensor::ints(std::vector<std::int64_t> shape, std::vector<std::int64_t> data) {
  Tensor t;
  t.dtype = DType::kInt64;
  t.shape = std::move(shape);
  t.i = std::move(data);
  if (t.i.empty()) t.i.assign(t.numel(), 0);
  return t;
}

std::size_t Tensor::numel() const noexcept {
  std::size_t n = 1;
  for (auto d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(shape[k]);
  }
  return s + "]";
}

const Attribute* Node::attr(std::string_view key) const {
  auto it = attrs.find(key);
  return it == attrs.end() ? nullptr : &it->second;
}

std::int64_t Node::attr_int(std::string_view key, std::int64_t fallback) const {
  const Attribute* a = attr(key);
  return a ? a->i : fallback;
}

float Node::attr_float(std::string_view key, float fallback) const {
  const Attribute* a = attr(key);
  return a ? a->f : fallback;
}

std::string Node::attr_string(std::string_view key, std::string fallback) const {
  const Attribute* a = attr(key);
  return a ? a->s : fallback;
}

std::vector<std::int64_t> Node::attr_ints(std::string_view key) const {
  const Attribute* a = attr(key);
  return a ? a->ints : std::vector<std::int64_t>{};
}

Model Model::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AssetError("cannot open model asset " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return from_bytes(bytes, path.string());
}

Model Model::from_bytes(std::span<const std::uint8_t> bytes, const std::string& origin) {
  onnx::ModelProto proto;
  if (!proto.ParseFromArray(bytes.data(), static_cast<int>(bytes.size()))) {
    throw AssetError(origin + ": not a valid ONNX model");
  }
  Model m;
  m.origin_ = origin;
  for (const auto& kv : proto.metadata_props()) m.metadata_[kv.key()] = kv.value();

  const auto& graph = proto.graph();
  for (const auto& init : graph.initializer()) {
    m.initializers_[init.name()] = std::make_shared<const Tensor>(convert_tensor(init));
  }
  for (const auto& vi : graph.input()) {
    if (!m.initializers_.count(vi.name())) m.inputs_.push_back(vi.name());
  }
  for (const auto& vi : graph.output()) m.outputs_.push_back(vi.name());

  std::set<std::string> unsupported;
  for (const auto& np : graph.node()) {
    if (!np.domain().empty() && np.domain() != "ai.onnx") {
      unsupported.insert(np.domain() + "::" + np.op_type());
      continue;
    }
    Node n;
    n.op = np.op_type();
    n.name = np.name();
    n.inputs.assign(np.input().begin(), np.input().end());
    n.outputs.assign(np.output().begin(), np.output().end());
    for (const auto& ap : np.attribute()) n.attrs.emplace(ap.name(), convert_attribute(ap));
    if (!is_supported_op(n.op)) unsupported.insert(n.op);
    m.nodes_.push_back(std::move(n));
  }
  if (!unsupported.empty()) {
    std::string list;
    for (const auto& op : unsupported) list += (list.empty() ? "" : ", ") + op;
    throw AssetError(origin + ": unsupported operators: " + list);
  }

  for (std::size_t k = 0; k < m.nodes_.size(); ++k) {
    for (const auto& name : m.nodes_[k].inputs) {
      if (!name.empty()) m.last_use_[name] = k;
    }
  }
  return m;
}

std::optional<std::string> Model::metadata(const std::string& key) const {
  auto it = metadata_.find(key);
  if (it == metadata_.end()) return std::nullopt;
  return it->second;
}

const Tensor* Model::initializer(const std::string& name) const {
  auto it = initializers_.find(name);
  return it == initializers_.end() ? nullptr : it->second.get();
}

std::vector<Tensor> Model::run(const std::map<std::string, Tensor>& feeds) const {
  std::unordered_map<std::string, Tensor> values;
  for (const auto& name : inputs_) {
    auto it = feeds.find(name);
    if (it == feeds.end()) throw AssetError(origin_ + ": missing graph input '" + name + "'");
    values.emplace(name, it->second);
  }
  const std::set<std::string> outputs(outputs_.begin(), outputs_.end());

  auto lookup = [&](const std::string& name) -> const Tensor* {
    if (auto it = values.find(name); it != values.end()) return &it->second;
    if (auto it = initializers_.find(name); it != initializers_.end()) return it->second.get();
    throw AssetError(origin_ + ": value '" + name + "' is used before it is produced");
  };

  std::vector<const Tensor*> args;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& node = nodes_[k];
    args.clear();
    for (const auto& name : node.inputs) args.push_back(name.empty() ? nullptr : lookup(name));
    std::vector<Tensor> produced;
    try {
      produced = execute_node(node, args);
    } catch (const AssetError& e) {
      throw AssetError(origin_ + ": node '" + node.name + "' (" + node.op + "): " + e.what());
    }
    for (std::size_t o = 0; o < node.outputs.size() && o < produced.size(); ++o) {
      if (!node.outputs[o].empty()) values[node.outputs[o]] = std::move(produced[o]);
    }
    // Drop intermediates whose last reader just ran.
    for (const auto& name : node.inputs) {
      if (name.empty() || outputs.count(name)) continue;
      auto lu = last_use_.find(name);
      if (lu != last_use_.end() && lu->second == k) values.erase(name);
    }
  }

  std::vector<Tensor> result;
  result.reserve(outputs_.size());
  for (const auto& name : outputs_) result.push_back(*lookup(name));
  return result;
}

}  // namespace hfi::nn
