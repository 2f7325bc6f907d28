//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gsurg/tensor.hpp"

namespace gsurg {

enum class OpKind {
  kConv2D,
  kPad,
  kConcat,
  kMatMul,
  kAdd,
  kMul,
  kRelu,
  kSigmoid,
  kReshape,
  kDequantize,
};

const char* op_name(OpKind op);
std::optional<OpKind> op_from_name(std::string_view name);

enum class PaddingScheme { kValid, kSame };

struct Conv2DAttrs {
  int64_t stride_h = 1;
  int64_t stride_w = 1;
  PaddingScheme padding = PaddingScheme::kValid;
};

// Only CONSTANT mode exists; paddings are per-axis [before, after].
struct PadAttrs {
  std::vector<std::array<int64_t, 2>> paddings;
  float constant_value = 0.0f;
};

struct ConcatAttrs {
  int64_t axis = 0;
};

struct ReshapeAttrs {
  std::vector<int64_t> new_shape;
};

using NodeAttrs =
    std::variant<std::monostate, Conv2DAttrs, PadAttrs, ConcatAttrs, ReshapeAttrs>;

struct Node {
  std::string name;
  OpKind op = OpKind::kRelu;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  NodeAttrs attrs;
};

// Fully static edge description; no symbolic dims.
struct ValueInfo {
  std::string name;
  DType dtype = DType::kF32;
  std::vector<int64_t> shape;
};

// DAG of operator nodes over named edges. Every node input must be produced
// by exactly one of: a graph input, a constant, or a prior node output.
// Graphs are value types; passes return modified copies.
struct Graph {
  std::string name;
  std::vector<ValueInfo> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, Tensor> constants;
  std::vector<Node> nodes;

  const Node* find_node(std::string_view node_name) const;
  // Node producing the given edge, or nullptr for inputs/constants.
  const Node* producer_of(std::string_view edge) const;
  bool is_graph_input(std::string_view edge) const;
  bool has_edge(std::string_view edge) const;
};

struct Violation {
  std::string subject;  // node or edge the problem is attached to
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Never throws: every problem comes back as a violation.
ValidationReport validate(const Graph& g);

// Requires a validated graph; throws ShapeError naming the offending node.
std::map<std::string, ValueInfo> infer_shapes(const Graph& g);

// Deterministic topological order; ties broken by node insertion order.
std::vector<std::string> topo_order(const Graph& g);

class RewireError : public Error {
 public:
  RewireError(std::string message, ValidationReport report)
      : Error(std::move(message)), report(std::move(report)) {}
  ValidationReport report;
};

// Replaces nodes wholesale: removes `remove`, splices in `add` at the first
// removed position, registers `add_constants`, re-points consumers of renamed
// edges and prunes constants nothing references anymore. The result must
// validate or RewireError carries the report.
Graph rewire_replace(const Graph& g, const std::vector<std::string>& remove,
                     const std::vector<Node>& add,
                     const std::map<std::string, Tensor>& add_constants,
                     const std::map<std::string, std::string>& edge_renames);

}  // namespace gsurg
