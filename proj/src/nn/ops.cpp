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

// Operator kernels for the ONNX interpreter. Semantics follow the ONNX
// operator definitions for the opset range PyTorch emits by default
// (opset 11 through 18).

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "hfi/error.hpp"
#include "hfi/nn/model.hpp"

namespace hfi::nn {
namespace {

using Args = std::span<const Tensor* const>;
using Shape = std::vector<std::int64_t>;

[[noreturn]] void fail(const std::string& msg) { throw AssetError(msg); }

bool has(Args args, std::size_t k) { return k < args.size() && args[k] != nullptr; }

const Tensor& arg(Args args, std::size_t k) {
  if (!has(args, k)) fail("missing required input #" + std::to_string(k));
  return *args[k];
}

std::int64_t normalize_axis(std::int64_t axis, std::size_t rank) {
  const auto r = static_cast<std::int64_t>(rank);
  if (axis < -r || axis >= std::max<std::int64_t>(r, 1)) {
    fail("axis " + std::to_string(axis) + " out of range for rank " + std::to_string(rank));
  }
  return axis < 0 ? axis + r : axis;
}

std::vector<std::int64_t> as_ints(const Tensor& t) {
  if (t.dtype == DType::kInt64) return t.i;
  std::vector<std::int64_t> out(t.f.size());
  for (std::size_t k = 0; k < t.f.size(); ++k) out[k] = static_cast<std::int64_t>(t.f[k]);
  return out;
}

std::vector<float> as_floats(const Tensor& t) {
  if (t.dtype == DType::kFloat) return t.f;
  return std::vector<float>(t.i.begin(), t.i.end());
}

std::size_t product(const Shape& s, std::size_t begin, std::size_t end) {
  std::size_t p = 1;
  for (std::size_t k = begin; k < end; ++k) p *= static_cast<std::size_t>(s[k]);
  return p;
}

Shape contiguous_strides(const Shape& shape) {
  Shape st(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) st[k - 1] = st[k] * shape[k];
  return st;
}

Tensor like(const Tensor& proto, Shape shape) {
  return proto.dtype == DType::kFloat ? Tensor::floats(std::move(shape))
                                      : Tensor::ints(std::move(shape));
}

// Copies element `src` of `from` into element `dst` of `to` (same dtype).
inline void copy_elem(const Tensor& from, std::size_t src, Tensor& to, std::size_t dst) {
  if (from.dtype == DType::kFloat) {
    to.f[dst] = from.f[src];
  } else {
    to.i[dst] = from.i[src];
  }
}

// ------------------------------------------------------------ broadcasting

Shape broadcast_shape(const std::vector<const Shape*>& shapes) {
  std::size_t rank = 0;
  for (auto* s : shapes) rank = std::max(rank, s->size());
  Shape out(rank, 1);
  for (auto* s : shapes) {
    const std::size_t off = rank - s->size();
    for (std::size_t k = 0; k < s->size(); ++k) {
      const auto d = (*s)[k];
      auto& o = out[off + k];
      if (d == o || d == 1) continue;
      if (o == 1) {
        o = d;
      } else {
        fail("shapes are not broadcast-compatible");
      }
    }
  }
  return out;
}

// Strides of `in` viewed in the broadcast output's index space.
Shape broadcast_strides(const Shape& in, const Shape& out) {
  Shape st(out.size(), 0);
  const std::size_t off = out.size() - in.size();
  std::int64_t stride = 1;
  for (std::size_t k = in.size(); k-- > 0;) {
    st[off + k] = in[k] == 1 ? 0 : stride;
    stride *= in[k];
  }
  return st;
}

// Calls fn(out_index, offsets...) for every element of `out`, where offsets
// are the broadcast source positions of each input.
template <std::size_t N, typename Fn>
void for_each_broadcast(const Shape& out, const std::array<Shape, N>& strides, Fn&& fn) {
  const std::size_t rank = out.size();
  const std::size_t total = product(out, 0, rank);
  if (total == 0) return;
  std::vector<std::int64_t> idx(rank, 0);
  std::array<std::size_t, N> off{};
  for (std::size_t e = 0; e < total; ++e) {
    fn(e, off);
    for (std::size_t k = rank; k-- > 0;) {
      ++idx[k];
      for (std::size_t n = 0; n < N; ++n) off[n] += strides[n][k];
      if (idx[k] < out[k]) break;
      for (std::size_t n = 0; n < N; ++n) off[n] -= strides[n][k] * out[k];
      idx[k] = 0;
    }
  }
}

template <typename FloatOp, typename IntOp>
Tensor binary(const Tensor& a, const Tensor& b, FloatOp fop, IntOp iop) {
  const Shape out_shape = broadcast_shape({&a.shape, &b.shape});
  const std::array<Shape, 2> st = {broadcast_strides(a.shape, out_shape),
                                   broadcast_strides(b.shape, out_shape)};
  if (a.dtype == DType::kFloat || b.dtype == DType::kFloat) {
    const auto af = as_floats(a);
    const auto bf = as_floats(b);
    Tensor out = Tensor::floats(out_shape);
    if (a.shape == b.shape) {
      for (std::size_t k = 0; k < out.f.size(); ++k) out.f[k] = fop(af[k], bf[k]);
    } else if (bf.size() == 1) {
      for (std::size_t k = 0; k < out.f.size(); ++k) out.f[k] = fop(af[k], bf[0]);
    } else {
      for_each_broadcast<2>(out_shape, st, [&](std::size_t e, const auto& off) {
        out.f[e] = fop(af[off[0]], bf[off[1]]);
      });
    }
    return out;
  }
  Tensor out = Tensor::ints(out_shape);
  for_each_broadcast<2>(out_shape, st, [&](std::size_t e, const auto& off) {
    out.i[e] = iop(a.i[off[0]], b.i[off[1]]);
  });
  return out;
}

template <typename FloatOp>
std::vector<Tensor> unary_float(const Tensor& x, FloatOp op) {
  Tensor out = Tensor::floats(x.shape, as_floats(x));
  for (float& v : out.f) v = op(v);
  return {std::move(out)};
}

// ------------------------------------------------------------ elementwise

std::vector<Tensor> op_add(const Node&, Args a) {
  return {binary(arg(a, 0), arg(a, 1), std::plus<float>(), std::plus<std::int64_t>())};
}
std::vector<Tensor> op_sub(const Node&, Args a) {
  return {binary(arg(a, 0), arg(a, 1), std::minus<float>(), std::minus<std::int64_t>())};
}
std::vector<Tensor> op_mul(const Node&, Args a) {
  return {binary(arg(a, 0), arg(a, 1), std::multiplies<float>(),
                 std::multiplies<std::int64_t>())};
}
std::vector<Tensor> op_div(const Node&, Args a) {
  return {binary(arg(a, 0), arg(a, 1), std::divides<float>(), [](std::int64_t x, std::int64_t y) {
    if (y == 0) fail("integer division by zero");
    return x / y;
  })};
}
std::vector<Tensor> op_pow(const Node&, Args a) {
  return {binary(
      arg(a, 0), arg(a, 1), [](float x, float y) { return std::pow(x, y); },
      [](std::int64_t x, std::int64_t y) {
        return static_cast<std::int64_t>(std::pow(static_cast<double>(x), static_cast<double>(y)));
      })};
}
std::vector<Tensor> op_max(const Node&, Args a) {
  Tensor acc = arg(a, 0);
  for (std::size_t k = 1; k < a.size(); ++k) {
    acc = binary(acc, arg(a, k), [](float x, float y) { return std::max(x, y); },
                 [](std::int64_t x, std::int64_t y) { return std::max(x, y); });
  }
  return {std::move(acc)};
}
std::vector<Tensor> op_min(const Node&, Args a) {
  Tensor acc = arg(a, 0);
  for (std::size_t k = 1; k < a.size(); ++k) {
    acc = binary(acc, arg(a, k), [](float x, float y) { return std::min(x, y); },
                 [](std::int64_t x, std::int64_t y) { return std::min(x, y); });
  }
  return {std::move(acc)};
}
std::vector<Tensor> op_equal(const Node&, Args a) {
  Tensor r = binary(
      arg(a, 0), arg(a, 1), [](float x, float y) { return x == y ? 1.0f : 0.0f; },
      [](std::int64_t x, std::int64_t y) -> std::int64_t { return x == y ? 1 : 0; });
  return {Tensor::ints(r.shape, as_ints(r))};
}

std::vector<Tensor> op_where(const Node&, Args a) {
  const Tensor& cond = arg(a, 0);
  const Tensor& x = arg(a, 1);
  const Tensor& y = arg(a, 2);
  if (x.dtype != y.dtype) fail("Where branches must share a type");
  const Shape out_shape = broadcast_shape({&cond.shape, &x.shape, &y.shape});
  const std::array<Shape, 3> st = {broadcast_strides(cond.shape, out_shape),
                                   broadcast_strides(x.shape, out_shape),
                                   broadcast_strides(y.shape, out_shape)};
  Tensor out = like(x, out_shape);
  for_each_broadcast<3>(out_shape, st, [&](std::size_t e, const auto& off) {
    const bool take_x = cond.value(off[0]) != 0.0;
    copy_elem(take_x ? x : y, take_x ? off[1] : off[2], out, e);
  });
  return {std::move(out)};
}

std::vector<Tensor> op_sqrt(const Node&, Args a) {
  return unary_float(arg(a, 0), [](float v) { return std::sqrt(v); });
}
std::vector<Tensor> op_exp(const Node&, Args a) {
  return unary_float(arg(a, 0), [](float v) { return std::exp(v); });
}
std::vector<Tensor> op_log(const Node&, Args a) {
  return unary_float(arg(a, 0), [](float v) { return std::log(v); });
}
std::vector<Tensor> op_sigmoid(const Node&, Args a) {
  return unary_float(arg(a, 0), [](float v) { return 1.0f / (1.0f + std::exp(-v)); });
}
std::vector<Tensor> op_relu(const Node&, Args a) {
  // v < 0 rather than v > 0 so NaN passes through.
  return unary_float(arg(a, 0), [](float v) { return v < 0.0f ? 0.0f : v; });
}
std::vector<Tensor> op_tanh(const Node&, Args a) {
  return unary_float(arg(a, 0), [](float v) { return std::tanh(v); });
}
std::vector<Tensor> op_erf(const Node&, Args a) {
  return unary_float(arg(a, 0), [](float v) { return std::erf(v); });
}
std::vector<Tensor> op_abs(const Node&, Args a) {
  return unary_float(arg(a, 0), [](float v) { return std::abs(v); });
}
std::vector<Tensor> op_reciprocal(const Node&, Args a) {
  return unary_float(arg(a, 0), [](float v) { return 1.0f / v; });
}
std::vector<Tensor> op_neg(const Node&, Args a) {
  Tensor out = arg(a, 0);
  for (float& v : out.f) v = -v;
  for (auto& v : out.i) v = -v;
  return {std::move(out)};
}
std::vector<Tensor> op_leaky_relu(const Node& n, Args a) {
  const float alpha = n.attr_float("alpha", 0.01f);
  return unary_float(arg(a, 0), [alpha](float v) { return v >= 0.0f ? v : alpha * v; });
}

std::vector<Tensor> op_clip(const Node& n, Args a) {
  float lo = n.attr_float("min", -std::numeric_limits<float>::infinity());
  float hi = n.attr_float("max", std::numeric_limits<float>::infinity());
  if (has(a, 1)) lo = static_cast<float>(a[1]->value(0));
  if (has(a, 2)) hi = static_cast<float>(a[2]->value(0));
  return unary_float(arg(a, 0), [lo, hi](float v) { return std::min(std::max(v, lo), hi); });
}

// ------------------------------------------------------------ shape ops

std::vector<Tensor> op_constant(const Node& n, Args) {
  if (const Attribute* v = n.attr("value"); v && v->t) return {*v->t};
  if (const Attribute* v = n.attr("value_float")) return {Tensor::floats({}, {v->f})};
  if (const Attribute* v = n.attr("value_floats")) {
    return {Tensor::floats({static_cast<std::int64_t>(v->floats.size())}, v->floats)};
  }
  if (const Attribute* v = n.attr("value_int")) return {Tensor::ints({}, {v->i})};
  if (const Attribute* v = n.attr("value_ints")) {
    return {Tensor::ints({static_cast<std::int64_t>(v->ints.size())}, v->ints)};
  }
  fail("Constant without a supported value attribute");
}

std::vector<Tensor> op_identity(const Node&, Args a) { return {arg(a, 0)}; }

std::vector<Tensor> op_cast(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  const std::int64_t to = n.attr_int("to", 1);
  if (to == 1 || to == 11) return {Tensor::floats(x.shape, as_floats(x))};
  if (to == 6 || to == 7 || to == 9 || to == 2 || to == 3 || to == 12 || to == 13) {
    auto ints = as_ints(x);
    if (to == 9) {
      for (std::size_t k = 0; k < ints.size(); ++k) ints[k] = x.value(k) != 0.0 ? 1 : 0;
    }
    return {Tensor::ints(x.shape, std::move(ints))};
  }
  fail("Cast to unsupported type " + std::to_string(to));
}

std::vector<Tensor> op_shape(const Node& n, Args a) {
  const Shape& s = arg(a, 0).shape;
  const auto r = static_cast<std::int64_t>(s.size());
  std::int64_t start = n.attr_int("start", 0);
  std::int64_t end = n.attr_int("end", r);
  if (start < 0) start += r;
  if (end < 0) end += r;
  start = std::clamp<std::int64_t>(start, 0, r);
  end = std::clamp<std::int64_t>(end, start, r);
  Shape out(s.begin() + start, s.begin() + end);
  return {Tensor::ints({static_cast<std::int64_t>(out.size())}, out)};
}

std::vector<Tensor> op_constant_of_shape(const Node& n, Args a) {
  const Shape shape = as_ints(arg(a, 0));
  const Attribute* v = n.attr("value");
  if (v && v->t && v->t->dtype == DType::kInt64) {
    return {Tensor::ints(shape, std::vector<std::int64_t>(product(shape, 0, shape.size()),
                                                          v->t->i.at(0)))};
  }
  const float fill = (v && v->t) ? v->t->f.at(0) : 0.0f;
  return {Tensor::floats(shape, std::vector<float>(product(shape, 0, shape.size()), fill))};
}

std::vector<Tensor> op_reshape(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  Shape target = as_ints(arg(a, 1));
  const bool allow_zero = n.attr_int("allowzero", 0) != 0;
  std::int64_t infer = -1;
  std::int64_t known = 1;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] == 0 && !allow_zero) {
      if (k >= x.shape.size()) fail("Reshape copies a missing dimension");
      target[k] = x.shape[k];
    }
    if (target[k] == -1) {
      if (infer >= 0) fail("Reshape with more than one -1");
      infer = static_cast<std::int64_t>(k);
    } else {
      known *= target[k];
    }
  }
  const auto total = static_cast<std::int64_t>(x.numel());
  if (infer >= 0) {
    if (known == 0 || total % known != 0) fail("Reshape cannot infer dimension");
    target[infer] = total / known;
  }
  if (static_cast<std::int64_t>(product(target, 0, target.size())) != total) {
    fail("Reshape " + x.shape_string() + " to incompatible shape");
  }
  Tensor out = x;
  out.shape = std::move(target);
  return {std::move(out)};
}

std::vector<Tensor> op_flatten(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  std::int64_t axis = n.attr_int("axis", 1);
  if (axis < 0) axis += static_cast<std::int64_t>(x.rank());
  Tensor out = x;
  out.shape = {static_cast<std::int64_t>(product(x.shape, 0, axis)),
               static_cast<std::int64_t>(product(x.shape, axis, x.rank()))};
  return {std::move(out)};
}

std::vector<std::int64_t> axes_from(const Node& n, Args a, std::size_t input_index) {
  if (has(a, input_index)) return as_ints(*a[input_index]);
  return n.attr_ints("axes");
}

std::vector<Tensor> op_unsqueeze(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  auto axes = axes_from(n, a, 1);
  const std::size_t out_rank = x.rank() + axes.size();
  for (auto& ax : axes) ax = normalize_axis(ax, out_rank);
  std::sort(axes.begin(), axes.end());
  Shape shape;
  std::size_t src = 0;
  for (std::size_t k = 0; k < out_rank; ++k) {
    if (std::binary_search(axes.begin(), axes.end(), static_cast<std::int64_t>(k))) {
      shape.push_back(1);
    } else {
      shape.push_back(x.shape.at(src++));
    }
  }
  Tensor out = x;
  out.shape = std::move(shape);
  return {std::move(out)};
}

std::vector<Tensor> op_squeeze(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  auto axes = axes_from(n, a, 1);
  for (auto& ax : axes) ax = normalize_axis(ax, x.rank());
  Shape shape;
  for (std::size_t k = 0; k < x.rank(); ++k) {
    const bool listed = std::find(axes.begin(), axes.end(), static_cast<std::int64_t>(k)) !=
                        axes.end();
    const bool drop = axes.empty() ? x.shape[k] == 1 : listed;
    if (drop && x.shape[k] != 1) fail("Squeeze of a non-unit dimension");
    if (!drop) shape.push_back(x.shape[k]);
  }
  Tensor out = x;
  out.shape = std::move(shape);
  return {std::move(out)};
}

std::vector<Tensor> op_expand(const Node&, Args a) {
  const Tensor& x = arg(a, 0);
  const Shape target = as_ints(arg(a, 1));
  const Shape out_shape = broadcast_shape({&x.shape, &target});
  const std::array<Shape, 1> st = {broadcast_strides(x.shape, out_shape)};
  Tensor out = like(x, out_shape);
  for_each_broadcast<1>(out_shape, st,
                        [&](std::size_t e, const auto& off) { copy_elem(x, off[0], out, e); });
  return {std::move(out)};
}

std::vector<Tensor> op_concat(const Node& n, Args a) {
  const Tensor& first = arg(a, 0);
  const auto axis = static_cast<std::size_t>(normalize_axis(n.attr_int("axis", 0), first.rank()));
  Shape shape = first.shape;
  shape[axis] = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Tensor& t = arg(a, k);
    if (t.rank() != first.rank()) fail("Concat rank mismatch");
    shape[axis] += t.shape[axis];
  }
  const bool is_float = std::any_of(a.begin(), a.end(), [](const Tensor* t) {
    return t->dtype == DType::kFloat;
  });
  Tensor out = is_float ? Tensor::floats(shape) : Tensor::ints(shape);
  const std::size_t outer = product(shape, 0, axis);
  const std::size_t inner = product(shape, axis + 1, shape.size());
  std::size_t dst = 0;
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      const Tensor& t = *a[k];
      const std::size_t chunk = static_cast<std::size_t>(t.shape[axis]) * inner;
      for (std::size_t e = 0; e < chunk; ++e, ++dst) {
        if (is_float) {
          out.f[dst] = static_cast<float>(t.value(o * chunk + e));
        } else {
          out.i[dst] = t.i[o * chunk + e];
        }
      }
    }
  }
  return {std::move(out)};
}

std::vector<Tensor> op_transpose(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  const std::size_t r = x.rank();
  auto perm = n.attr_ints("perm");
  if (perm.empty()) {
    perm.resize(r);
    for (std::size_t k = 0; k < r; ++k) perm[k] = static_cast<std::int64_t>(r - 1 - k);
  }
  if (perm.size() != r) fail("Transpose perm has wrong length");
  const Shape in_st = contiguous_strides(x.shape);
  Shape out_shape(r);
  Shape st(r);
  for (std::size_t k = 0; k < r; ++k) {
    out_shape[k] = x.shape[perm[k]];
    st[k] = in_st[perm[k]];
  }
  Tensor out = like(x, out_shape);
  for_each_broadcast<1>(out_shape, std::array<Shape, 1>{st},
                        [&](std::size_t e, const auto& off) { copy_elem(x, off[0], out, e); });
  return {std::move(out)};
}

std::vector<Tensor> op_slice(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  const std::size_t r = x.rank();
  std::vector<std::int64_t> starts;
  std::vector<std::int64_t> ends;
  std::vector<std::int64_t> axes;
  std::vector<std::int64_t> steps;
  if (has(a, 1)) {
    starts = as_ints(*a[1]);
    ends = as_ints(arg(a, 2));
    if (has(a, 3)) axes = as_ints(*a[3]);
    if (has(a, 4)) steps = as_ints(*a[4]);
  } else {
    starts = n.attr_ints("starts");
    ends = n.attr_ints("ends");
    axes = n.attr_ints("axes");
  }
  if (axes.empty()) {
    axes.resize(starts.size());
    std::iota(axes.begin(), axes.end(), 0);
  }
  if (steps.empty()) steps.assign(starts.size(), 1);

  std::vector<std::int64_t> begin(r, 0);
  std::vector<std::int64_t> step(r, 1);
  Shape out_shape = x.shape;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const auto ax = static_cast<std::size_t>(normalize_axis(axes[k], r));
    const std::int64_t dim = x.shape[ax];
    const std::int64_t s = steps[k];
    if (s == 0) fail("Slice step of zero");
    std::int64_t b = starts[k];
    std::int64_t e = ends[k];
    if (b < 0) b += dim;
    if (e < 0) e += dim;
    if (s > 0) {
      b = std::clamp<std::int64_t>(b, 0, dim);
      e = std::clamp<std::int64_t>(e, 0, dim);
      out_shape[ax] = e > b ? (e - b + s - 1) / s : 0;
    } else {
      b = std::clamp<std::int64_t>(b, 0, dim - 1);
      e = std::clamp<std::int64_t>(e, -1, dim - 1);
      out_shape[ax] = b > e ? (b - e - s - 1) / (-s) : 0;
    }
    begin[ax] = b;
    step[ax] = s;
  }
  const Shape in_st = contiguous_strides(x.shape);
  Shape st(r);
  std::int64_t base = 0;
  for (std::size_t k = 0; k < r; ++k) {
    st[k] = in_st[k] * step[k];
    base += begin[k] * in_st[k];
  }
  Tensor out = like(x, out_shape);
  for_each_broadcast<1>(out_shape, std::array<Shape, 1>{st}, [&](std::size_t e, const auto& off) {
    copy_elem(x, static_cast<std::size_t>(base + static_cast<std::int64_t>(off[0])), out, e);
  });
  return {std::move(out)};
}

std::vector<Tensor> op_gather(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  const Tensor& idx = arg(a, 1);
  const auto axis = static_cast<std::size_t>(normalize_axis(n.attr_int("axis", 0), x.rank()));
  const auto indices = as_ints(idx);
  Shape out_shape(x.shape.begin(), x.shape.begin() + axis);
  out_shape.insert(out_shape.end(), idx.shape.begin(), idx.shape.end());
  out_shape.insert(out_shape.end(), x.shape.begin() + axis + 1, x.shape.end());
  const std::size_t outer = product(x.shape, 0, axis);
  const std::size_t inner = product(x.shape, axis + 1, x.rank());
  const std::int64_t dim = x.shape[axis];
  Tensor out = like(x, out_shape);
  std::size_t dst = 0;
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::int64_t j : indices) {
      if (j < 0) j += dim;
      if (j < 0 || j >= dim) fail("Gather index out of range");
      const std::size_t src = (o * dim + j) * inner;
      for (std::size_t e = 0; e < inner; ++e) copy_elem(x, src + e, out, dst++);
    }
  }
  return {std::move(out)};
}

std::vector<Tensor> op_split(const Node& n, Args a) {
  const Tensor& x = arg(a, 0);
  const auto axis = static_cast<std::size_t>(normalize_axis(n.attr_int("axis", 0), x.rank()));
  std::vector<std::int64_t> sizes = has(a, 1) ? as_ints(*a[1]) : n.attr_ints("split");
  const std::int64_t dim = x.shape[axis];
  if (sizes.empty()) {
    const auto parts = static_cast<std::int64_t>(n.attr_int("num_outputs",
                                                            static_cast<std::int64_t>(n.outputs.size())));
    const std::int64_t chunk = (dim + parts - 1) / parts;
    for (std::int64_t used = 0; used < dim; used += chunk) sizes.push_back(std::min(chunk, dim - used));
  }
  const std::size_t outer = product(x.shape, 0, axis);
  const std::size_t inner = product(x.shape, axis + 1, x.rank());
  std::vector<Tensor> outs;
  std::int64_t offset = 0;
  for (std::int64_t sz : sizes) {
    Shape shape = x.shape;
    shape[axis] = sz;
    Tensor t = like(x, shape);
    std::size_t dst = 0;
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t src = (o * dim + offset) * inner;
      for (std::size_t e = 0; e < static_cast<std::size_t>(sz) * inner; ++e) {
        copy_elem(x, src + e, t, dst++);
      }
    }
    offset += sz;
    outs.push_back(std::move(t));
  }
  return outs;
}

// ------------------------------------------------------------ reductions

std::vector<Tensor> reduce(const Node& n, Args a, bool mean) {
  const Tensor& x = arg(a, 0);
  auto axes = axes_from(n, a, 1);
  const bool keep = n.attr_int("keepdims", 1) != 0;
  if (axes.empty()) {
    if (n.attr_int("noop_with_empty_axes", 0) != 0) return {x};
    axes.resize(x.rank());
    std::iota(axes.begin(), axes.end(), 0);
  }
  for (auto& ax : axes) ax = normalize_axis(ax, x.rank());
  Shape kept_shape = x.shape;
  for (auto ax : axes) kept_shape[ax] = 1;
  const std::array<Shape, 1> st = {broadcast_strides(kept_shape, x.shape)};
  std::vector<double> acc(product(kept_shape, 0, kept_shape.size()), 0.0);
  for_each_broadcast<1>(x.shape, st,
                        [&](std::size_t e, const auto& off) { acc[off[0]] += x.value(e); });
  const double count = static_cast<double>(x.numel()) / static_cast<double>(acc.size());
  Shape out_shape;
  if (keep) {
    out_shape = kept_shape;
  } else {
    for (std::size_t k = 0; k < x.rank(); ++k) {
      if (std::find(axes.begin(), axes.end(), static_cast<std::int64_t>(k)) == axes.end()) {
        out_shape.push_back(x.shape[k]);
      }
    }
  }
  Tensor out = Tensor::floats(out_shape);
  for (std::size_t k = 0; k < acc.size(); ++k) {
    out.f[k] = static_cast<float>(mean ? acc[k] / count : acc[k]);
  }
  return {std::move(out)};
}

std::vector<Tensor> op_reduce_mean(const Node& n, Args a) { return reduce(n, a, true); }
std::vector<Tensor> op_reduce_sum(const Node& n, Args a) { return reduce(n, a, false); }

std::vector<Tensor> op_softmax(const Node& n, Args a) {
  Tensor out = Tensor::floats(arg(a, 0).shape, as_floats(arg(a, 0)));
  const auto axis = static_cast<std::size_t>(normalize_axis(n.attr_int("axis", -1), out.rank()));
  const std::size_t outer = product(out.shape, 0, axis);
  const std::size_t dim = static_cast<std::size_t>(out.shape[axis]);
  const std::size_t inner = product(out.shape, axis + 1, out.rank());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      float* base = out.f.data() + o * dim * inner + i;
      float mx = -std::numeric_limits<float>::infinity();
      for (std::size_t d = 0; d < dim; ++d) mx = std::max(mx, base[d * inner]);
      double total = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        base[d * inner] = std::exp(base[d * inner] - mx);
        total += base[d * inner];
      }
      for (std::size_t d = 0; d < dim; ++d) {
        base[d * inner] = static_cast<float>(base[d * inner] / total);
      }
    }
  }
  return {std::move(out)};
}

// ------------------------------------------------------------ linear algebra

void sgemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, float alpha,
           const float* a, std::size_t lda, const float* b, std::size_t ldb, float beta, float* c,
           std::size_t ldc) {
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, static_cast<int>(m), static_cast<int>(n),
              static_cast<int>(k), alpha, a, static_cast<int>(lda), b, static_cast<int>(ldb), beta,
              c, static_cast<int>(ldc));
}

std::vector<Tensor> op_matmul(const Node&, Args args) {
  Tensor a = Tensor::floats(arg(args, 0).shape, as_floats(arg(args, 0)));
  Tensor b = Tensor::floats(arg(args, 1).shape, as_floats(arg(args, 1)));
  const bool a_vec = a.rank() == 1;
  const bool b_vec = b.rank() == 1;
  if (a_vec) a.shape.insert(a.shape.begin(), 1);
  if (b_vec) b.shape.push_back(1);
  const auto m = static_cast<std::size_t>(a.shape[a.rank() - 2]);
  const auto k = static_cast<std::size_t>(a.shape[a.rank() - 1]);
  const auto n = static_cast<std::size_t>(b.shape[b.rank() - 1]);
  if (static_cast<std::size_t>(b.shape[b.rank() - 2]) != k) {
    fail("MatMul inner dimensions differ: " + a.shape_string() + " x " + b.shape_string());
  }
  const Shape a_batch(a.shape.begin(), a.shape.end() - 2);
  const Shape b_batch(b.shape.begin(), b.shape.end() - 2);
  const Shape batch = broadcast_shape({&a_batch, &b_batch});
  Shape out_shape = batch;
  out_shape.push_back(static_cast<std::int64_t>(m));
  out_shape.push_back(static_cast<std::int64_t>(n));
  Tensor out = Tensor::floats(out_shape);
  const std::array<Shape, 2> st = {broadcast_strides(a_batch, batch),
                                   broadcast_strides(b_batch, batch)};
  if (batch.empty()) {
    sgemm(false, false, m, n, k, 1.0f, a.f.data(), k, b.f.data(), n, 0.0f, out.f.data(), n);
  } else {
    for_each_broadcast<2>(batch, st, [&](std::size_t e, const auto& off) {
      sgemm(false, false, m, n, k, 1.0f, a.f.data() + off[0] * m * k, k,
            b.f.data() + off[1] * k * n, n, 0.0f, out.f.data() + e * m * n, n);
    });
  }
  if (a_vec) out.shape.erase(out.shape.end() - 2);
  if (b_vec) out.shape.pop_back();
  return {std::move(out)};
}

std::vector<Tensor> op_gemm(const Node& n, Args args) {
  const Tensor& a = arg(args, 0);
  const Tensor& b = arg(args, 1);
  const bool ta = n.attr_int("transA", 0) != 0;
  const bool tb = n.attr_int("transB", 0) != 0;
  const float alpha = n.attr_float("alpha", 1.0f);
  const float beta = n.attr_float("beta", 1.0f);
  const auto m = static_cast<std::size_t>(ta ? a.shape[1] : a.shape[0]);
  const auto k = static_cast<std::size_t>(ta ? a.shape[0] : a.shape[1]);
  const auto nn = static_cast<std::size_t>(tb ? b.shape[0] : b.shape[1]);
  Tensor out = Tensor::floats({static_cast<std::int64_t>(m), static_cast<std::int64_t>(nn)});
  float c_beta = 0.0f;
  if (has(args, 2)) {
    const Tensor& c = *args[2];
    const std::array<Shape, 1> st = {broadcast_strides(c.shape, out.shape)};
    for_each_broadcast<1>(out.shape, st, [&](std::size_t e, const auto& off) {
      out.f[e] = static_cast<float>(c.value(off[0]));
    });
    c_beta = beta;
  }
  const auto af = as_floats(a);
  const auto bf = as_floats(b);
  sgemm(ta, tb, m, nn, k, alpha, af.data(), static_cast<std::size_t>(a.shape[1]), bf.data(),
        static_cast<std::size_t>(b.shape[1]), c_beta, out.f.data(), nn);
  return {std::move(out)};
}

// ------------------------------------------------------------ convolution

struct Window2d {
  std::int64_t kh, kw, sh, sw, dh, dw, pt, pl, pb, pr;
  std::int64_t out_h, out_w;
};

Window2d window_2d(const Node& n, std::int64_t h, std::int64_t w, std::int64_t kh,
                   std::int64_t kw, bool ceil_mode) {
  Window2d win{};
  win.kh = kh;
  win.kw = kw;
  auto strides = n.attr_ints("strides");
  auto dil = n.attr_ints("dilations");
  auto pads = n.attr_ints("pads");
  win.sh = strides.size() == 2 ? strides[0] : 1;
  win.sw = strides.size() == 2 ? strides[1] : 1;
  win.dh = dil.size() == 2 ? dil[0] : 1;
  win.dw = dil.size() == 2 ? dil[1] : 1;
  const std::int64_t ekh = (kh - 1) * win.dh + 1;
  const std::int64_t ekw = (kw - 1) * win.dw + 1;
  const std::string auto_pad = n.attr_string("auto_pad", "NOTSET");
  if (auto_pad == "SAME_UPPER" || auto_pad == "SAME_LOWER") {
    const std::int64_t oh = (h + win.sh - 1) / win.sh;
    const std::int64_t ow = (w + win.sw - 1) / win.sw;
    const std::int64_t ph = std::max<std::int64_t>(0, (oh - 1) * win.sh + ekh - h);
    const std::int64_t pw = std::max<std::int64_t>(0, (ow - 1) * win.sw + ekw - w);
    const bool upper = auto_pad == "SAME_UPPER";
    win.pt = upper ? ph / 2 : ph - ph / 2;
    win.pb = ph - win.pt;
    win.pl = upper ? pw / 2 : pw - pw / 2;
    win.pr = pw - win.pl;
  } else if (pads.size() == 4) {
    win.pt = pads[0];
    win.pl = pads[1];
    win.pb = pads[2];
    win.pr = pads[3];
  }
  auto out_size = [&](std::int64_t in, std::int64_t p0, std::int64_t p1, std::int64_t ek,
                      std::int64_t s) {
    const std::int64_t span = in + p0 + p1 - ek;
    if (span < 0) fail("pooling/convolution window larger than padded input");
    std::int64_t o = (ceil_mode ? (span + s - 1) / s : span / s) + 1;
    // A window must start inside the input or the leading pad.
    if (ceil_mode && (o - 1) * s >= in + p0) --o;
    return o;
  };
  win.out_h = out_size(h, win.pt, win.pb, ekh, win.sh);
  win.out_w = out_size(w, win.pl, win.pr, ekw, win.sw);
  return win;
}

std::vector<Tensor> op_conv(const Node& n, Args args) {
  const Tensor& x = arg(args, 0);
  const Tensor& wt = arg(args, 1);
  if (x.rank() != 4 || wt.rank() != 4) fail("only 2-D convolution is supported");
  const std::int64_t batch = x.shape[0];
  const std::int64_t cin = x.shape[1];
  const std::int64_t h = x.shape[2];
  const std::int64_t w = x.shape[3];
  const std::int64_t cout = wt.shape[0];
  const std::int64_t groups = n.attr_int("group", 1);
  const std::int64_t cin_g = wt.shape[1];
  if (cin_g * groups != cin) fail("Conv channel/group mismatch");
  const Window2d win = window_2d(n, h, w, wt.shape[2], wt.shape[3], false);
  const std::int64_t cout_g = cout / groups;
  const auto kdim = static_cast<std::size_t>(cin_g * win.kh * win.kw);
  const auto plane_out = static_cast<std::size_t>(win.out_h * win.out_w);
  Tensor out = Tensor::floats({batch, cout, win.out_h, win.out_w});

  const bool pointwise = win.kh == 1 && win.kw == 1 && win.sh == 1 && win.sw == 1 &&
                         win.pt == 0 && win.pl == 0 && win.pb == 0 && win.pr == 0;
  // Bound the im2col buffer to roughly 16M floats by tiling output rows.
  const std::int64_t rows_per_tile = std::clamp<std::int64_t>(
      static_cast<std::int64_t>((std::size_t{1} << 24) / std::max<std::size_t>(1, kdim * win.out_w)),
      1, win.out_h);
  std::vector<float> col;
  if (!pointwise) col.resize(kdim * static_cast<std::size_t>(rows_per_tile * win.out_w));

  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t g = 0; g < groups; ++g) {
      const float* wg = wt.f.data() + g * cout_g * static_cast<std::int64_t>(kdim);
      const float* xg = x.f.data() + (b * cin + g * cin_g) * h * w;
      float* yg = out.f.data() + (b * cout + g * cout_g) * static_cast<std::int64_t>(plane_out);
      if (pointwise) {
        sgemm(false, false, cout_g, plane_out, kdim, 1.0f, wg, kdim, xg, plane_out, 0.0f, yg,
              plane_out);
        continue;
      }
      for (std::int64_t y0 = 0; y0 < win.out_h; y0 += rows_per_tile) {
        const std::int64_t rows = std::min(rows_per_tile, win.out_h - y0);
        const auto tile = static_cast<std::size_t>(rows * win.out_w);
        for (std::int64_t c = 0; c < cin_g; ++c) {
          for (std::int64_t ki = 0; ki < win.kh; ++ki) {
            for (std::int64_t kj = 0; kj < win.kw; ++kj) {
              float* dst = col.data() + ((c * win.kh + ki) * win.kw + kj) * tile;
              for (std::int64_t oy = 0; oy < rows; ++oy) {
                const std::int64_t iy = (y0 + oy) * win.sh - win.pt + ki * win.dh;
                for (std::int64_t ox = 0; ox < win.out_w; ++ox) {
                  const std::int64_t ix = ox * win.sw - win.pl + kj * win.dw;
                  dst[oy * win.out_w + ox] =
                      (iy >= 0 && iy < h && ix >= 0 && ix < w) ? xg[(c * h + iy) * w + ix] : 0.0f;
                }
              }
            }
          }
        }
        sgemm(false, false, cout_g, tile, kdim, 1.0f, wg, kdim, col.data(), tile, 0.0f,
              yg + y0 * win.out_w, plane_out);
      }
    }
  }
  if (has(args, 2)) {
    const auto bias = as_floats(*args[2]);
    for (std::int64_t b = 0; b < batch; ++b) {
      for (std::int64_t c = 0; c < cout; ++c) {
        float* p = out.f.data() + (b * cout + c) * static_cast<std::int64_t>(plane_out);
        for (std::size_t e = 0; e < plane_out; ++e) p[e] += bias[c];
      }
    }
  }
  return {std::move(out)};
}

std::vector<Tensor> op_max_pool(const Node& n, Args args) {
  const Tensor& x = arg(args, 0);
  if (x.rank() != 4) fail("only 2-D MaxPool is supported");
  const auto kernel = n.attr_ints("kernel_shape");
  if (kernel.size() != 2) fail("MaxPool needs a 2-D kernel_shape");
  const Window2d win =
      window_2d(n, x.shape[2], x.shape[3], kernel[0], kernel[1], n.attr_int("ceil_mode", 0) != 0);
  const std::int64_t planes = x.shape[0] * x.shape[1];
  const std::int64_t h = x.shape[2];
  const std::int64_t w = x.shape[3];
  Tensor out = Tensor::floats({x.shape[0], x.shape[1], win.out_h, win.out_w});
  for (std::int64_t p = 0; p < planes; ++p) {
    const float* src = x.f.data() + p * h * w;
    float* dst = out.f.data() + p * win.out_h * win.out_w;
    for (std::int64_t oy = 0; oy < win.out_h; ++oy) {
      for (std::int64_t ox = 0; ox < win.out_w; ++ox) {
        float best = -std::numeric_limits<float>::infinity();
        for (std::int64_t ki = 0; ki < win.kh; ++ki) {
          const std::int64_t iy = oy * win.sh - win.pt + ki * win.dh;
          if (iy < 0 || iy >= h) continue;
          for (std::int64_t kj = 0; kj < win.kw; ++kj) {
            const std::int64_t ix = ox * win.sw - win.pl + kj * win.dw;
            if (ix < 0 || ix >= w) continue;
            const float v = src[iy * w + ix];
            if (v > best || std::isnan(v)) best = v;  // NaN is sticky, as in torch
          }
        }
        dst[oy * win.out_w + ox] = best;
      }
    }
  }
  return {std::move(out)};
}

std::vector<Tensor> op_instance_norm(const Node& n, Args args) {
  const Tensor& x = arg(args, 0);
  const auto scale = as_floats(arg(args, 1));
  const auto bias = as_floats(arg(args, 2));
  const double eps = n.attr_float("epsilon", 1e-5f);
  const std::int64_t batch = x.shape[0];
  const std::int64_t ch = x.shape[1];
  const std::size_t spatial = product(x.shape, 2, x.rank());
  Tensor out = Tensor::floats(x.shape);
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t c = 0; c < ch; ++c) {
      const std::size_t base = static_cast<std::size_t>(b * ch + c) * spatial;
      double mean = 0.0;
      for (std::size_t e = 0; e < spatial; ++e) mean += x.f[base + e];
      mean /= static_cast<double>(spatial);
      double var = 0.0;
      for (std::size_t e = 0; e < spatial; ++e) {
        const double d = x.f[base + e] - mean;
        var += d * d;
      }
      var /= static_cast<double>(spatial);
      const double inv = 1.0 / std::sqrt(var + eps);
      for (std::size_t e = 0; e < spatial; ++e) {
        out.f[base + e] = static_cast<float>((x.f[base + e] - mean) * inv * scale[c] + bias[c]);
      }
    }
  }
  return {std::move(out)};
}

// ------------------------------------------------------------ resampling

double source_coordinate(const std::string& mode, std::int64_t o, double scale,
                         std::int64_t in, std::int64_t out) {
  if (mode == "asymmetric") return o / scale;
  if (mode == "align_corners") {
    return out == 1 ? 0.0 : static_cast<double>(o) * (in - 1) / static_cast<double>(out - 1);
  }
  if (mode == "pytorch_half_pixel") return out > 1 ? (o + 0.5) / scale - 0.5 : 0.0;
  if (mode == "tf_half_pixel_for_nn") return (o + 0.5) / scale;
  if (mode == "half_pixel") return (o + 0.5) / scale - 0.5;
  fail("unsupported coordinate_transformation_mode '" + mode + "'");
}

std::int64_t nearest_index(const std::string& mode, double x, std::int64_t in) {
  double r;
  if (mode == "floor") {
    r = std::floor(x);
  } else if (mode == "ceil") {
    r = std::ceil(x);
  } else if (mode == "round_prefer_ceil") {
    r = std::floor(x + 0.5);
  } else {
    r = std::ceil(x - 0.5);  // round_prefer_floor
  }
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(r), 0, in - 1);
}

std::vector<Tensor> op_resize(const Node& n, Args args) {
  const Tensor& x = arg(args, 0);
  const std::size_t r = x.rank();
  std::vector<double> scales(r, 1.0);
  Shape out_shape = x.shape;
  if (has(args, 3) && args[3]->numel() > 0) {
    const auto sizes = as_ints(*args[3]);
    if (sizes.size() != r) fail("Resize sizes rank mismatch");
    for (std::size_t k = 0; k < r; ++k) {
      out_shape[k] = sizes[k];
      scales[k] = static_cast<double>(sizes[k]) / static_cast<double>(x.shape[k]);
    }
  } else if (has(args, 2) && args[2]->numel() > 0) {
    const auto sc = as_floats(*args[2]);
    if (sc.size() != r) fail("Resize scales rank mismatch");
    for (std::size_t k = 0; k < r; ++k) {
      scales[k] = sc[k];
      out_shape[k] = static_cast<std::int64_t>(std::floor(x.shape[k] * static_cast<double>(sc[k])));
    }
  } else {
    fail("Resize needs scales or sizes");
  }
  if (r != 4 || out_shape[0] != x.shape[0] || out_shape[1] != x.shape[1]) {
    fail("Resize is supported on the spatial axes of NCHW tensors only");
  }
  const std::string mode = n.attr_string("mode", "nearest");
  const std::string coord = n.attr_string("coordinate_transformation_mode", "half_pixel");
  const std::string nearest_mode = n.attr_string("nearest_mode", "round_prefer_floor");
  const std::int64_t h = x.shape[2];
  const std::int64_t w = x.shape[3];
  const std::int64_t oh = out_shape[2];
  const std::int64_t ow = out_shape[3];
  Tensor out = Tensor::floats(out_shape);
  const std::int64_t planes = x.shape[0] * x.shape[1];

  if (mode == "nearest") {
    std::vector<std::int64_t> ys(oh);
    std::vector<std::int64_t> xs(ow);
    for (std::int64_t o = 0; o < oh; ++o) {
      ys[o] = nearest_index(nearest_mode, source_coordinate(coord, o, scales[2], h, oh), h);
    }
    for (std::int64_t o = 0; o < ow; ++o) {
      xs[o] = nearest_index(nearest_mode, source_coordinate(coord, o, scales[3], w, ow), w);
    }
    for (std::int64_t p = 0; p < planes; ++p) {
      for (std::int64_t oy = 0; oy < oh; ++oy) {
        for (std::int64_t ox = 0; ox < ow; ++ox) {
          out.f[(p * oh + oy) * ow + ox] = x.f[(p * h + ys[oy]) * w + xs[ox]];
        }
      }
    }
    return {std::move(out)};
  }
  if (mode == "linear") {
    struct Lerp {
      std::int64_t i0, i1;
      double t;
    };
    auto lerps = [&](std::int64_t in, std::int64_t outn, double scale) {
      std::vector<Lerp> l(outn);
      for (std::int64_t o = 0; o < outn; ++o) {
        double s = std::clamp(source_coordinate(coord, o, scale, in, outn), 0.0,
                              static_cast<double>(in - 1));
        const auto i0 = static_cast<std::int64_t>(std::floor(s));
        l[o] = {i0, std::min(i0 + 1, in - 1), s - i0};
      }
      return l;
    };
    const auto ly = lerps(h, oh, scales[2]);
    const auto lx = lerps(w, ow, scales[3]);
    for (std::int64_t p = 0; p < planes; ++p) {
      const float* src = x.f.data() + p * h * w;
      for (std::int64_t oy = 0; oy < oh; ++oy) {
        for (std::int64_t ox = 0; ox < ow; ++ox) {
          const Lerp& a = ly[oy];
          const Lerp& b = lx[ox];
          const double top = src[a.i0 * w + b.i0] * (1 - b.t) + src[a.i0 * w + b.i1] * b.t;
          const double bot = src[a.i1 * w + b.i0] * (1 - b.t) + src[a.i1 * w + b.i1] * b.t;
          out.f[(p * oh + oy) * ow + ox] = static_cast<float>(top * (1 - a.t) + bot * a.t);
        }
      }
    }
    return {std::move(out)};
  }
  fail("unsupported Resize mode '" + mode + "'");
}

std::vector<Tensor> op_pad(const Node& n, Args args) {
  const Tensor& x = arg(args, 0);
  const std::size_t r = x.rank();
  std::vector<std::int64_t> pads = has(args, 1) ? as_ints(*args[1]) : n.attr_ints("pads");
  std::vector<std::int64_t> axes;
  if (has(args, 3)) {
    axes = as_ints(*args[3]);
  } else {
    axes.resize(r);
    std::iota(axes.begin(), axes.end(), 0);
  }
  if (pads.size() != 2 * axes.size()) fail("Pad has the wrong number of pad values");
  std::vector<std::int64_t> before(r, 0);
  std::vector<std::int64_t> after(r, 0);
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const auto ax = static_cast<std::size_t>(normalize_axis(axes[k], r));
    before[ax] = pads[k];
    after[ax] = pads[k + axes.size()];
  }
  const std::string mode = n.attr_string("mode", "constant");
  double fill = n.attr_float("value", 0.0f);
  if (has(args, 2) && args[2]->numel() > 0) fill = args[2]->value(0);

  Shape out_shape(r);
  for (std::size_t k = 0; k < r; ++k) out_shape[k] = x.shape[k] + before[k] + after[k];
  const Shape in_st = contiguous_strides(x.shape);
  Tensor out = like(x, out_shape);
  std::vector<std::int64_t> idx(r, 0);
  const std::size_t total = out.numel();
  for (std::size_t e = 0; e < total; ++e) {
    std::int64_t src = 0;
    bool inside = true;
    for (std::size_t k = 0; k < r && inside; ++k) {
      std::int64_t s = idx[k] - before[k];
      const std::int64_t dim = x.shape[k];
      if (s < 0 || s >= dim) {
        if (mode == "constant") {
          inside = false;
          break;
        }
        if (mode == "edge") {
          s = std::clamp<std::int64_t>(s, 0, dim - 1);
        } else if (mode == "reflect") {
          if (dim == 1) {
            s = 0;
          } else {
            const std::int64_t period = 2 * (dim - 1);
            s %= period;
            if (s < 0) s += period;
            if (s >= dim) s = period - s;
          }
        } else {
          fail("unsupported Pad mode '" + mode + "'");
        }
      }
      src += s * in_st[k];
    }
    if (inside) {
      copy_elem(x, static_cast<std::size_t>(src), out, e);
    } else if (out.dtype == DType::kFloat) {
      out.f[e] = static_cast<float>(fill);
    } else {
      out.i[e] = static_cast<std::int64_t>(fill);
    }
    for (std::size_t k = r; k-- > 0;) {
      if (++idx[k] < out_shape[k]) break;
      idx[k] = 0;
    }
  }
  return {std::move(out)};
}

using OpFn = std::vector<Tensor> (*)(const Node&, Args);

const std::unordered_map<std::string_view, OpFn>& op_table() {
  static const std::unordered_map<std::string_view, OpFn> table = {
      {"Abs", op_abs},
      {"Add", op_add},
      {"Cast", op_cast},
      {"Clip", op_clip},
      {"Concat", op_concat},
      {"Constant", op_constant},
      {"ConstantOfShape", op_constant_of_shape},
      {"Conv", op_conv},
      {"Div", op_div},
      {"Equal", op_equal},
      {"Erf", op_erf},
      {"Exp", op_exp},
      {"Expand", op_expand},
      {"Flatten", op_flatten},
      {"Gather", op_gather},
      {"Gemm", op_gemm},
      {"Identity", op_identity},
      {"InstanceNormalization", op_instance_norm},
      {"LeakyRelu", op_leaky_relu},
      {"Log", op_log},
      {"MatMul", op_matmul},
      {"Max", op_max},
      {"MaxPool", op_max_pool},
      {"Min", op_min},
      {"Mul", op_mul},
      {"Neg", op_neg},
      {"Pad", op_pad},
      {"Pow", op_pow},
      {"Reciprocal", op_reciprocal},
      {"ReduceMean", op_reduce_mean},
      {"ReduceSum", op_reduce_sum},
      {"Relu", op_relu},
      {"Reshape", op_reshape},
      {"Resize", op_resize},
      {"Shape", op_shape},
      {"Sigmoid", op_sigmoid},
      {"Slice", op_slice},
      {"Softmax", op_softmax},
      {"Split", op_split},
      {"Sqrt", op_sqrt},
      {"Squeeze", op_squeeze},
      {"Sub", op_sub},
      {"Tanh", op_tanh},
      {"Transpose", op_transpose},
      {"Unsqueeze", op_unsqueeze},
      {"Where", op_where},
  };
  return table;
}

}  // namespace

bool is_supported_op(std::string_view op) { return op_table().count(op) != 0; }

std::vector<Tensor> execute_node(const Node& node, std::span<const Tensor* const> inputs) {
  auto it = op_table().find(node.op);
  if (it == op_table().end()) throw AssetError("unsupported operator " + node.op);
  return it->second(node, inputs);
}

}  // namespace hfi::nn
