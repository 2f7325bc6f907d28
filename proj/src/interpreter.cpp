//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsurg/float16.hpp"
#include "gsurg/kernels.hpp"

namespace gsurg {

namespace {

void check_feeds(const Graph& g, const FeedMap& feeds) {
  for (const ValueInfo& vi : g.inputs) {
    auto it = feeds.find(vi.name);
    if (it == feeds.end()) {
      throw FeedError("missing feed for graph input '" + vi.name + "'");
    }
    if (it->second.dtype() != vi.dtype) {
      throw FeedError("feed '" + vi.name + "' has dtype " +
                      dtype_name(it->second.dtype()) + ", expected " +
                      dtype_name(vi.dtype));
    }
    if (it->second.shape() != vi.shape) {
      throw FeedError("feed '" + vi.name + "' has shape " +
                      shape_to_string(it->second.shape()) + ", expected " +
                      shape_to_string(vi.shape));
    }
  }
  if (feeds.size() != g.inputs.size()) {
    for (const auto& [name, t] : feeds) {
      if (!g.is_graph_input(name)) {
        throw FeedError("feed '" + name + "' is not a graph input");
      }
    }
  }
}

Tensor eval_node(const Node& n, const std::map<std::string, Tensor>& env) {
  auto arg = [&](size_t i) -> const Tensor& { return env.at(n.inputs[i]); };
  switch (n.op) {
    case OpKind::kConv2D: {
      const Tensor* bias = n.inputs.size() == 3 ? &arg(2) : nullptr;
      const auto& attrs = std::get<Conv2DAttrs>(n.attrs);
      return kernels::conv2d(arg(0), arg(1), bias, attrs.stride_h,
                             attrs.stride_w, attrs.padding);
    }
    case OpKind::kPad: {
      const auto& attrs = std::get<PadAttrs>(n.attrs);
      return kernels::pad(arg(0), attrs.paddings, attrs.constant_value);
    }
    case OpKind::kConcat: {
      const auto& attrs = std::get<ConcatAttrs>(n.attrs);
      std::vector<const Tensor*> parts;
      parts.reserve(n.inputs.size());
      for (const std::string& in : n.inputs) parts.push_back(&env.at(in));
      return kernels::concat(parts, attrs.axis);
    }
    case OpKind::kMatMul: return kernels::matmul(arg(0), arg(1));
    case OpKind::kAdd: return kernels::add(arg(0), arg(1));
    case OpKind::kMul: return kernels::mul(arg(0), arg(1));
    case OpKind::kRelu: return kernels::relu(arg(0));
    case OpKind::kSigmoid: return kernels::sigmoid(arg(0));
    case OpKind::kReshape: {
      const auto& attrs = std::get<ReshapeAttrs>(n.attrs);
      return arg(0).with_shape(attrs.new_shape);
    }
    case OpKind::kDequantize: return cast_f16_to_f32(arg(0));
  }
  throw DomainError("eval_node: unknown op");
}

int64_t node_op_count(const Node& n,
                      const std::map<std::string, ValueInfo>& infos) {
  const ValueInfo& out = infos.at(n.outputs[0]);
  const int64_t out_elems = shape_num_elements(out.shape);
  switch (n.op) {
    case OpKind::kConv2D: {
      const ValueInfo& filter = infos.at(n.inputs[1]);
      // N*H'*W'*Cout multiplied by kh*kw*Cin taps
      return out_elems * filter.shape[0] * filter.shape[1] * filter.shape[2];
    }
    case OpKind::kMatMul: {
      const ValueInfo& a = infos.at(n.inputs[0]);
      return out_elems * a.shape[1];
    }
    default: return out_elems;
  }
}

void record_range(ExecutionTrace& trace, const std::string& edge,
                  const Tensor& t) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto update = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  switch (t.dtype()) {
    case DType::kF32:
      for (float v : t.f32_data()) update(v);
      break;
    case DType::kF16:
      for (uint16_t b : t.f16_data()) update(f16_to_f32(b));
      break;
    case DType::kI8:
      for (int8_t v : t.i8_data()) update(v);
      break;
    case DType::kI32:
      for (int32_t v : t.i32_data()) update(v);
      break;
  }
  if (t.num_elements() == 0) {
    lo = 0.0;
    hi = 0.0;
  }
  auto it = trace.edge_ranges.find(edge);
  if (it == trace.edge_ranges.end()) {
    trace.edge_ranges.emplace(edge, std::make_pair(lo, hi));
  } else {
    it->second.first = std::min(it->second.first, lo);
    it->second.second = std::max(it->second.second, hi);
  }
}

OutputMap run_impl(const Graph& g, const FeedMap& feeds, const EdgeHook* hook,
                   ExecutionTrace* trace) {
  check_feeds(g, feeds);
  std::map<std::string, Tensor> env = g.constants;
  if (trace) {
    for (const auto& [name, t] : env) record_range(*trace, name, t);
  }
  for (const ValueInfo& vi : g.inputs) {
    Tensor t = feeds.at(vi.name);
    if (hook) t = (*hook)(vi.name, std::move(t));
    if (trace) record_range(*trace, vi.name, t);
    env.emplace(vi.name, std::move(t));
  }
  const auto order = topo_order(g);
  std::map<std::string, ValueInfo> infos;
  if (trace) infos = infer_shapes(g);
  for (const std::string& name : order) {
    const Node* n = g.find_node(name);
    Tensor out = eval_node(*n, env);
    if (hook) out = (*hook)(n->outputs[0], std::move(out));
    if (trace) {
      record_range(*trace, n->outputs[0], out);
      trace->node_op_counts[name] = node_op_count(*n, infos);
    }
    env.emplace(n->outputs[0], std::move(out));
  }
  OutputMap outputs;
  for (const std::string& out : g.outputs) {
    auto it = env.find(out);
    if (it == env.end()) {
      throw DomainError("graph output '" + out + "' was never produced");
    }
    outputs.emplace(out, it->second);
  }
  return outputs;
}

}  // namespace

OutputMap run(const Graph& g, const FeedMap& feeds) {
  return run_impl(g, feeds, nullptr, nullptr);
}

OutputMap run_with_hook(const Graph& g, const FeedMap& feeds,
                        const EdgeHook& hook) {
  return run_impl(g, feeds, &hook, nullptr);
}

RecordingResult run_recording(const Graph& g,
                              const std::vector<FeedMap>& feed_set) {
  if (feed_set.empty()) {
    throw DomainError("run_recording: feed set must not be empty");
  }
  RecordingResult result;
  for (const FeedMap& feeds : feed_set) {
    result.outputs.push_back(run_impl(g, feeds, nullptr, &result.trace));
  }
  return result;
}

std::map<std::string, int64_t> analytic_op_counts(const Graph& g) {
  const auto infos = infer_shapes(g);
  std::map<std::string, int64_t> counts;
  for (const Node& n : g.nodes) counts[n.name] = node_op_count(n, infos);
  return counts;
}

}  // namespace gsurg
