//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gsurg {

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::kConv2D: return "Conv2D";
    case OpKind::kPad: return "Pad";
    case OpKind::kConcat: return "Concat";
    case OpKind::kMatMul: return "MatMul";
    case OpKind::kAdd: return "Add";
    case OpKind::kMul: return "Mul";
    case OpKind::kRelu: return "Relu";
    case OpKind::kSigmoid: return "Sigmoid";
    case OpKind::kReshape: return "Reshape";
    case OpKind::kDequantize: return "Dequantize";
  }
  return "?";
}

std::optional<OpKind> op_from_name(std::string_view name) {
  static const std::map<std::string_view, OpKind> kNames = {
      {"Conv2D", OpKind::kConv2D},   {"Pad", OpKind::kPad},
      {"Concat", OpKind::kConcat},   {"MatMul", OpKind::kMatMul},
      {"Add", OpKind::kAdd},         {"Mul", OpKind::kMul},
      {"Relu", OpKind::kRelu},       {"Sigmoid", OpKind::kSigmoid},
      {"Reshape", OpKind::kReshape}, {"Dequantize", OpKind::kDequantize},
  };
  auto it = kNames.find(name);
  if (it == kNames.end()) return std::nullopt;
  return it->second;
}

const Node* Graph::find_node(std::string_view node_name) const {
  for (const Node& n : nodes) {
    if (n.name == node_name) return &n;
  }
  return nullptr;
}

const Node* Graph::producer_of(std::string_view edge) const {
  for (const Node& n : nodes) {
    for (const std::string& out : n.outputs) {
      if (out == edge) return &n;
    }
  }
  return nullptr;
}

bool Graph::is_graph_input(std::string_view edge) const {
  for (const ValueInfo& vi : inputs) {
    if (vi.name == edge) return true;
  }
  return false;
}

bool Graph::has_edge(std::string_view edge) const {
  return is_graph_input(edge) || constants.count(std::string(edge)) > 0 ||
         producer_of(edge) != nullptr;
}

std::string ValidationReport::to_string() const {
  if (violations.empty()) return "ok";
  std::ostringstream os;
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i) os << '\n';
    os << violations[i].subject << ": " << violations[i].message;
  }
  return os.str();
}

namespace {

struct ArityRule {
  size_t min_inputs;
  size_t max_inputs;
};

ArityRule arity_rule(OpKind op) {
  switch (op) {
    case OpKind::kConv2D: return {2, 3};  // data, filter[, bias]
    case OpKind::kConcat: return {2, SIZE_MAX};
    case OpKind::kMatMul:
    case OpKind::kAdd:
    case OpKind::kMul: return {2, 2};
    default: return {1, 1};
  }
}

bool attrs_match_schema(const Node& n) {
  switch (n.op) {
    case OpKind::kConv2D: return std::holds_alternative<Conv2DAttrs>(n.attrs);
    case OpKind::kPad: return std::holds_alternative<PadAttrs>(n.attrs);
    case OpKind::kConcat: return std::holds_alternative<ConcatAttrs>(n.attrs);
    case OpKind::kReshape: return std::holds_alternative<ReshapeAttrs>(n.attrs);
    default: return std::holds_alternative<std::monostate>(n.attrs);
  }
}

// Producer table: edge -> what produces it. Used by validate and topo_order.
enum class ProducerKind { kInput, kConstant, kNode };

struct Producer {
  ProducerKind kind;
  size_t node_index = 0;  // valid for kNode
};

std::unordered_map<std::string, Producer> build_producers(
    const Graph& g, ValidationReport* report) {
  std::unordered_map<std::string, Producer> producers;
  auto claim = [&](const std::string& edge, Producer p, const char* what) {
    auto [it, inserted] = producers.emplace(edge, p);
    if (!inserted && report) {
      report->violations.push_back(
          {edge, std::string("edge produced more than once (") + what + ")"});
    }
  };
  for (const ValueInfo& vi : g.inputs) claim(vi.name, {ProducerKind::kInput}, "graph input");
  for (const auto& [name, t] : g.constants) claim(name, {ProducerKind::kConstant}, "constant");
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    for (const std::string& out : g.nodes[i].outputs) {
      claim(out, {ProducerKind::kNode, i}, "node output");
    }
  }
  return producers;
}

// Kahn's algorithm with insertion-order tie-break. Returns node indices in
// execution order; leftovers (cycle members) are reported via `cyclic`.
std::vector<size_t> kahn_order(
    const Graph& g, const std::unordered_map<std::string, Producer>& producers,
    std::vector<size_t>* cyclic) {
  const size_t n = g.nodes.size();
  std::vector<int64_t> pending(n, 0);
  std::vector<std::vector<size_t>> consumers(n);
  for (size_t i = 0; i < n; ++i) {
    for (const std::string& in : g.nodes[i].inputs) {
      auto it = producers.find(in);
      if (it != producers.end() && it->second.kind == ProducerKind::kNode) {
        ++pending[i];
        consumers[it->second.node_index].push_back(i);
      }
    }
  }
  std::vector<size_t> order;
  order.reserve(n);
  std::set<size_t> ready;
  for (size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    const size_t i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (size_t c : consumers[i]) {
      if (--pending[c] == 0) ready.insert(c);
    }
  }
  if (cyclic) {
    cyclic->clear();
    for (size_t i = 0; i < n; ++i) {
      if (pending[i] > 0) cyclic->push_back(i);
    }
    // a self-loop never enters the pending count above; catch it directly
    for (size_t i = 0; i < n; ++i) {
      const Node& node = g.nodes[i];
      for (const std::string& in : node.inputs) {
        if (std::find(node.outputs.begin(), node.outputs.end(), in) !=
            node.outputs.end()) {
          if (std::find(cyclic->begin(), cyclic->end(), i) == cyclic->end()) {
            cyclic->push_back(i);
          }
        }
      }
    }
  }
  return order;
}

struct InferContext {
  const Graph& g;
  std::map<std::string, ValueInfo>& infos;

  const ValueInfo& in(const Node& n, size_t idx) const {
    return infos.at(n.inputs[idx]);
  }
};

void require_f32(const Node& n, const ValueInfo& vi) {
  if (vi.dtype != DType::kF32) {
    throw ShapeError("node " + n.name + ": input '" + vi.name +
                     "' must be F32, got " + dtype_name(vi.dtype));
  }
}

ValueInfo infer_node_output(const InferContext& ctx, const Node& n) {
  const std::string out = n.outputs[0];
  switch (n.op) {
    case OpKind::kConv2D: {
      const ValueInfo& data = ctx.in(n, 0);
      const ValueInfo& filter = ctx.in(n, 1);
      require_f32(n, data);
      require_f32(n, filter);
      if (data.shape.size() != 4 || filter.shape.size() != 4) {
        throw ShapeError("node " + n.name +
                         ": Conv2D expects NHWC data and [kh,kw,Cin,Cout] filter");
      }
      const auto& attrs = std::get<Conv2DAttrs>(n.attrs);
      if (attrs.stride_h < 1 || attrs.stride_w < 1) {
        throw ShapeError("node " + n.name + ": strides must be >= 1");
      }
      const int64_t h = data.shape[1], w = data.shape[2], cin = data.shape[3];
      const int64_t kh = filter.shape[0], kw = filter.shape[1];
      if (filter.shape[2] != cin) {
        throw ShapeError("node " + n.name + ": filter Cin " +
                         std::to_string(filter.shape[2]) +
                         " does not match data channels " + std::to_string(cin));
      }
      const int64_t cout = filter.shape[3];
      int64_t oh = 0, ow = 0;
      if (attrs.padding == PaddingScheme::kValid) {
        if (h < kh || w < kw) {
          throw ShapeError("node " + n.name + ": filter larger than input");
        }
        oh = (h - kh) / attrs.stride_h + 1;
        ow = (w - kw) / attrs.stride_w + 1;
      } else {
        oh = (h + attrs.stride_h - 1) / attrs.stride_h;
        ow = (w + attrs.stride_w - 1) / attrs.stride_w;
      }
      if (n.inputs.size() == 3) {
        const ValueInfo& bias = ctx.in(n, 2);
        require_f32(n, bias);
        if (bias.shape != std::vector<int64_t>{cout}) {
          throw ShapeError("node " + n.name + ": bias must have shape [Cout]");
        }
      }
      return {out, DType::kF32, {data.shape[0], oh, ow, cout}};
    }
    case OpKind::kPad: {
      const ValueInfo& data = ctx.in(n, 0);
      require_f32(n, data);
      const auto& attrs = std::get<PadAttrs>(n.attrs);
      if (attrs.paddings.size() != data.shape.size()) {
        throw ShapeError("node " + n.name + ": paddings rank " +
                         std::to_string(attrs.paddings.size()) +
                         " does not match input rank " +
                         std::to_string(data.shape.size()));
      }
      std::vector<int64_t> shape = data.shape;
      for (size_t i = 0; i < shape.size(); ++i) {
        if (attrs.paddings[i][0] < 0 || attrs.paddings[i][1] < 0) {
          throw ShapeError("node " + n.name + ": negative padding");
        }
        shape[i] += attrs.paddings[i][0] + attrs.paddings[i][1];
      }
      return {out, DType::kF32, std::move(shape)};
    }
    case OpKind::kConcat: {
      const auto& attrs = std::get<ConcatAttrs>(n.attrs);
      const ValueInfo& first = ctx.in(n, 0);
      require_f32(n, first);
      const int64_t rank = static_cast<int64_t>(first.shape.size());
      if (attrs.axis < 0 || attrs.axis >= rank) {
        throw ShapeError("node " + n.name + ": concat axis out of range");
      }
      std::vector<int64_t> shape = first.shape;
      for (size_t i = 1; i < n.inputs.size(); ++i) {
        const ValueInfo& vi = ctx.in(n, i);
        require_f32(n, vi);
        if (static_cast<int64_t>(vi.shape.size()) != rank) {
          throw ShapeError("node " + n.name + ": concat rank mismatch");
        }
        for (int64_t d = 0; d < rank; ++d) {
          if (d == attrs.axis) continue;
          if (vi.shape[d] != first.shape[d]) {
            throw ShapeError("node " + n.name +
                             ": concat inputs differ on non-concat axis " +
                             std::to_string(d));
          }
        }
        shape[attrs.axis] += vi.shape[attrs.axis];
      }
      return {out, DType::kF32, std::move(shape)};
    }
    case OpKind::kMatMul: {
      const ValueInfo& a = ctx.in(n, 0);
      const ValueInfo& b = ctx.in(n, 1);
      require_f32(n, a);
      require_f32(n, b);
      if (a.shape.size() != 2 || b.shape.size() != 2 ||
          a.shape[1] != b.shape[0]) {
        throw ShapeError("node " + n.name + ": MatMul expects [m,k] x [k,n], got " +
                         shape_to_string(a.shape) + " x " +
                         shape_to_string(b.shape));
      }
      return {out, DType::kF32, {a.shape[0], b.shape[1]}};
    }
    case OpKind::kAdd:
    case OpKind::kMul: {
      const ValueInfo& a = ctx.in(n, 0);
      const ValueInfo& b = ctx.in(n, 1);
      require_f32(n, a);
      require_f32(n, b);
      // no broadcasting: elementwise ops take identical shapes
      if (a.shape != b.shape) {
        throw ShapeError("node " + n.name + ": elementwise shape mismatch " +
                         shape_to_string(a.shape) + " vs " +
                         shape_to_string(b.shape));
      }
      return {out, DType::kF32, a.shape};
    }
    case OpKind::kRelu:
    case OpKind::kSigmoid: {
      const ValueInfo& a = ctx.in(n, 0);
      require_f32(n, a);
      return {out, DType::kF32, a.shape};
    }
    case OpKind::kReshape: {
      const ValueInfo& a = ctx.in(n, 0);
      const auto& attrs = std::get<ReshapeAttrs>(n.attrs);
      if (shape_num_elements(attrs.new_shape) !=
          shape_num_elements(a.shape)) {
        throw ShapeError("node " + n.name + ": reshape element count mismatch");
      }
      return {out, a.dtype, attrs.new_shape};
    }
    case OpKind::kDequantize: {
      const ValueInfo& a = ctx.in(n, 0);
      if (a.dtype != DType::kF16) {
        throw ShapeError("node " + n.name + ": Dequantize expects an F16 input");
      }
      return {out, DType::kF32, a.shape};
    }
  }
  throw ShapeError("node " + n.name + ": unknown op");
}

}  // namespace

ValidationReport validate(const Graph& g) {
  ValidationReport report;

  std::unordered_set<std::string> node_names;
  for (const Node& n : g.nodes) {
    if (!node_names.insert(n.name).second) {
      report.violations.push_back({n.name, "duplicate node name"});
    }
  }
  std::unordered_set<std::string> input_names;
  for (const ValueInfo& vi : g.inputs) {
    if (!input_names.insert(vi.name).second) {
      report.violations.push_back({vi.name, "duplicate graph input"});
    }
    if (std::any_of(vi.shape.begin(), vi.shape.end(),
                    [](int64_t d) { return d < 0; })) {
      report.violations.push_back({vi.name, "negative input dimension"});
    }
  }

  auto producers = build_producers(g, &report);

  for (const Node& n : g.nodes) {
    const ArityRule rule = arity_rule(n.op);
    if (n.inputs.size() < rule.min_inputs || n.inputs.size() > rule.max_inputs) {
      report.violations.push_back(
          {n.name, std::string(op_name(n.op)) + " has wrong input arity (" +
                       std::to_string(n.inputs.size()) + ")"});
    }
    if (n.outputs.size() != 1) {
      report.violations.push_back({n.name, "node must have exactly one output"});
    }
    if (!attrs_match_schema(n)) {
      report.violations.push_back(
          {n.name, std::string("attributes do not match ") + op_name(n.op) +
                       " schema"});
    }
    for (const std::string& in : n.inputs) {
      if (!producers.count(in)) {
        report.violations.push_back(
            {n.name, "input edge '" + in + "' is produced by nothing"});
      }
    }
  }

  for (const std::string& out : g.outputs) {
    if (!producers.count(out)) {
      report.violations.push_back(
          {out, "graph output is produced by nothing"});
    }
  }

  std::vector<size_t> cyclic;
  kahn_order(g, producers, &cyclic);
  for (size_t i : cyclic) {
    report.violations.push_back({g.nodes[i].name, "node is part of a cycle"});
  }

  // Shape/dtype inference only makes sense on a structurally sound graph.
  if (report.ok()) {
    try {
      infer_shapes(g);
    } catch (const ShapeError& e) {
      report.violations.push_back({"shapes", e.what()});
    }
  }
  return report;
}

std::map<std::string, ValueInfo> infer_shapes(const Graph& g) {
  std::map<std::string, ValueInfo> infos;
  for (const ValueInfo& vi : g.inputs) infos[vi.name] = vi;
  for (const auto& [name, t] : g.constants) {
    infos[name] = ValueInfo{name, t.dtype(), t.shape()};
  }
  auto producers = build_producers(g, nullptr);
  std::vector<size_t> cyclic;
  const auto order = kahn_order(g, producers, &cyclic);
  if (!cyclic.empty()) {
    throw ShapeError("graph contains a cycle at node " + g.nodes[cyclic[0]].name);
  }
  InferContext ctx{g, infos};
  for (size_t i : order) {
    const Node& n = g.nodes[i];
    for (const std::string& in : n.inputs) {
      if (!infos.count(in)) {
        throw ShapeError("node " + n.name + ": unknown input edge '" + in + "'");
      }
    }
    ValueInfo out = infer_node_output(ctx, n);
    infos[out.name] = std::move(out);
  }
  return infos;
}

std::vector<std::string> topo_order(const Graph& g) {
  auto producers = build_producers(g, nullptr);
  std::vector<size_t> cyclic;
  const auto order = kahn_order(g, producers, &cyclic);
  if (!cyclic.empty()) {
    throw DomainError("topo_order: graph contains a cycle at node " +
                      g.nodes[cyclic[0]].name);
  }
  std::vector<std::string> names;
  names.reserve(order.size());
  for (size_t i : order) names.push_back(g.nodes[i].name);
  return names;
}

Graph rewire_replace(const Graph& g, const std::vector<std::string>& remove,
                     const std::vector<Node>& add,
                     const std::map<std::string, Tensor>& add_constants,
                     const std::map<std::string, std::string>& edge_renames) {
  Graph out = g;

  std::optional<size_t> splice_at;
  for (const std::string& name : remove) {
    auto it = std::find_if(out.nodes.begin(), out.nodes.end(),
                           [&](const Node& n) { return n.name == name; });
    if (it == out.nodes.end()) {
      throw DomainError("rewire_replace: node '" + name + "' does not exist");
    }
    const size_t idx = static_cast<size_t>(it - out.nodes.begin());
    if (!splice_at || idx < *splice_at) splice_at = idx;
    out.nodes.erase(it);
  }

  // keep added nodes where the removed ones sat so insertion order stays stable
  const size_t at = splice_at ? std::min(*splice_at, out.nodes.size())
                              : out.nodes.size();
  out.nodes.insert(out.nodes.begin() + static_cast<int64_t>(at), add.begin(),
                   add.end());

  for (const auto& [name, tensor] : add_constants) {
    out.constants[name] = tensor;
  }

  auto renamed = [&](const std::string& edge) {
    auto it = edge_renames.find(edge);
    return it == edge_renames.end() ? edge : it->second;
  };
  for (Node& n : out.nodes) {
    for (std::string& in : n.inputs) in = renamed(in);
  }
  for (std::string& o : out.outputs) o = renamed(o);

  std::unordered_set<std::string> referenced;
  for (const Node& n : out.nodes) {
    referenced.insert(n.inputs.begin(), n.inputs.end());
  }
  referenced.insert(out.outputs.begin(), out.outputs.end());
  for (auto it = out.constants.begin(); it != out.constants.end();) {
    if (!referenced.count(it->first)) {
      it = out.constants.erase(it);
    } else {
      ++it;
    }
  }

  ValidationReport report = validate(out);
  if (!report.ok()) {
    throw RewireError("rewire_replace produced an invalid graph:\n" +
                          report.to_string(),
                      std::move(report));
  }
  return out;
}

}  // namespace gsurg
