//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsurg/graph.hpp"
#include "testutil.hpp"

using namespace gsurg;

namespace {

Node make_node(std::string name, OpKind op, std::vector<std::string> inputs,
               std::vector<std::string> outputs, NodeAttrs attrs = {}) {
  Node n;
  n.name = std::move(name);
  n.op = op;
  n.inputs = std::move(inputs);
  n.outputs = std::move(outputs);
  n.attrs = std::move(attrs);
  return n;
}

}  // namespace

TEST_CASE("empty pass-through graph validates") {
  Graph g;
  g.name = "passthrough";
  g.inputs = {{"x", DType::kF32, {2, 2}}};
  g.outputs = {"x"};
  CHECK(validate(g).ok());
}

TEST_CASE("self-loop is reported as a cycle") {
  Graph g;
  g.inputs = {{"x", DType::kF32, {2}}};
  g.outputs = {"y"};
  g.nodes.push_back(make_node("a", OpKind::kAdd, {"x", "y"}, {"y"}));
  const auto report = validate(g);
  CHECK_FALSE(report.ok());
  bool found_cycle = false;
  for (const auto& v : report.violations) {
    if (v.message.find("cycle") != std::string::npos) found_cycle = true;
  }
  CHECK(found_cycle);
}

TEST_CASE("concat arity violation") {
  Graph g;
  g.inputs = {{"x", DType::kF32, {1, 2}}};
  g.outputs = {"y"};
  g.nodes.push_back(
      make_node("cat", OpKind::kConcat, {"x"}, {"y"}, ConcatAttrs{1}));
  const auto report = validate(g);
  CHECK_FALSE(report.ok());
  CHECK(report.to_string().find("arity") != std::string::npos);
}

TEST_CASE("duplicate names and unknown edges are all reported") {
  Graph g;
  g.inputs = {{"x", DType::kF32, {2}}};
  g.outputs = {"out"};
  g.nodes.push_back(make_node("n", OpKind::kRelu, {"x"}, {"out"}));
  g.nodes.push_back(make_node("n", OpKind::kRelu, {"ghost"}, {"other"}));
  const auto report = validate(g);
  REQUIRE_FALSE(report.ok());
  const std::string text = report.to_string();
  CHECK(text.find("duplicate node name") != std::string::npos);
  CHECK(text.find("ghost") != std::string::npos);
}

TEST_CASE("edge produced twice is reported") {
  Graph g;
  g.inputs = {{"x", DType::kF32, {2}}};
  g.outputs = {"x"};
  g.constants.emplace("x", Tensor::f32({2}, {1.f, 2.f}));
  const auto report = validate(g);
  CHECK_FALSE(report.ok());
  CHECK(report.to_string().find("produced more than once") != std::string::npos);
}

TEST_CASE("shape inference: matmul") {
  Graph g;
  g.inputs = {{"a", DType::kF32, {3, 3}}, {"b", DType::kF32, {3, 7}}};
  g.outputs = {"out"};
  g.nodes.push_back(make_node("mm", OpKind::kMatMul, {"a", "b"}, {"out"}));
  const auto infos = infer_shapes(g);
  CHECK(infos.at("out").shape == std::vector<int64_t>{3, 7});
  CHECK(infos.at("out").dtype == DType::kF32);
}

TEST_CASE("shape inference: channel pad") {
  const Graph g = testutil::channel_pad_graph(2, 2, 3, 0, 4);
  const auto infos = infer_shapes(g);
  CHECK(infos.at("out").shape == std::vector<int64_t>{1, 2, 2, 7});
}

TEST_CASE("shape inference: conv2d VALID and SAME") {
  Graph g;
  g.inputs = {{"in", DType::kF32, {1, 5, 5, 3}}};
  g.outputs = {"out"};
  g.constants.emplace("w", Tensor::zeros(DType::kF32, {1, 1, 3, 7}));
  g.nodes.push_back(make_node("conv", OpKind::kConv2D, {"in", "w"}, {"out"},
                              Conv2DAttrs{1, 1, PaddingScheme::kValid}));
  CHECK(infer_shapes(g).at("out").shape == std::vector<int64_t>{1, 5, 5, 7});

  std::get<Conv2DAttrs>(g.nodes[0].attrs) = {2, 2, PaddingScheme::kSame};
  CHECK(infer_shapes(g).at("out").shape == std::vector<int64_t>{1, 3, 3, 7});

  // 3x3 filter VALID on 5x5: floor((5-3)/1)+1 = 3
  g.constants.clear();
  g.constants.emplace("w", Tensor::zeros(DType::kF32, {3, 3, 3, 2}));
  std::get<Conv2DAttrs>(g.nodes[0].attrs) = {1, 1, PaddingScheme::kValid};
  CHECK(infer_shapes(g).at("out").shape == std::vector<int64_t>{1, 3, 3, 2});
}

TEST_CASE("shape inference failures name the node") {
  Graph g;
  g.inputs = {{"a", DType::kF32, {3, 3}}, {"b", DType::kF32, {4, 7}}};
  g.outputs = {"out"};
  g.nodes.push_back(make_node("badmm", OpKind::kMatMul, {"a", "b"}, {"out"}));
  CHECK_THROWS_WITH_AS(infer_shapes(g),
                       doctest::Contains("badmm"), ShapeError);

  // dtype violation: arithmetic on F16 is rejected
  Graph h;
  h.inputs = {{"x", DType::kF16, {2}}};
  h.outputs = {"y"};
  h.nodes.push_back(make_node("r", OpKind::kRelu, {"x"}, {"y"}));
  CHECK_THROWS_AS(infer_shapes(h), ShapeError);
  CHECK_FALSE(validate(h).ok());
}

TEST_CASE("reshape requires equal element counts") {
  Graph g;
  g.inputs = {{"x", DType::kF32, {2, 3}}};
  g.outputs = {"y"};
  g.nodes.push_back(
      make_node("r", OpKind::kReshape, {"x"}, {"y"}, ReshapeAttrs{{3, 2}}));
  CHECK(infer_shapes(g).at("y").shape == std::vector<int64_t>{3, 2});
  std::get<ReshapeAttrs>(g.nodes[0].attrs).new_shape = {4, 2};
  CHECK_THROWS_AS(infer_shapes(g), ShapeError);
}

TEST_CASE("topo order is deterministic with insertion-order ties") {
  Graph g;
  g.inputs = {{"x", DType::kF32, {2}}};
  g.outputs = {"d_out"};
  // diamond with insertion order A, C, B, D
  g.nodes.push_back(make_node("A", OpKind::kRelu, {"x"}, {"a_out"}));
  g.nodes.push_back(make_node("C", OpKind::kSigmoid, {"a_out"}, {"c_out"}));
  g.nodes.push_back(make_node("B", OpKind::kRelu, {"a_out"}, {"b_out"}));
  g.nodes.push_back(make_node("D", OpKind::kAdd, {"c_out", "b_out"}, {"d_out"}));
  CHECK(topo_order(g) == std::vector<std::string>{"A", "C", "B", "D"});

  Graph chain;
  chain.inputs = {{"x", DType::kF32, {2}}};
  chain.outputs = {"c"};
  chain.nodes.push_back(make_node("A", OpKind::kRelu, {"x"}, {"a"}));
  chain.nodes.push_back(make_node("B", OpKind::kRelu, {"a"}, {"b"}));
  chain.nodes.push_back(make_node("C", OpKind::kRelu, {"b"}, {"c"}));
  CHECK(topo_order(chain) == std::vector<std::string>{"A", "B", "C"});

  Graph single;
  single.inputs = {{"x", DType::kF32, {2}}};
  single.outputs = {"y"};
  single.nodes.push_back(make_node("only", OpKind::kRelu, {"x"}, {"y"}));
  CHECK(topo_order(single) == std::vector<std::string>{"only"});
}

TEST_CASE("nodes listed out of dependency order still sort correctly") {
  Graph g;
  g.inputs = {{"x", DType::kF32, {2}}};
  g.outputs = {"z"};
  g.nodes.push_back(make_node("second", OpKind::kRelu, {"y"}, {"z"}));
  g.nodes.push_back(make_node("first", OpKind::kRelu, {"x"}, {"y"}));
  CHECK(validate(g).ok());
  CHECK(topo_order(g) == std::vector<std::string>{"first", "second"});
}

TEST_CASE("rewire_replace: identity rewrite leaves the graph value-equal") {
  const Graph g = testutil::channel_pad_graph(2, 2, 3, 0, 4);
  const Graph g2 = rewire_replace(g, {}, {}, {}, {});
  CHECK(g2.name == g.name);
  CHECK(g2.outputs == g.outputs);
  CHECK(g2.nodes.size() == g.nodes.size());
  CHECK(validate(g2).ok());
}

TEST_CASE("rewire_replace: dequantize removal by rename") {
  Graph g;
  g.inputs = {{"in", DType::kF32, {1, 1, 1, 2}}};
  g.outputs = {"out"};
  g.constants.emplace("w16", Tensor::f16({1, 1, 2, 2}, {0x3c00, 0, 0, 0x3c00}));
  g.nodes.push_back(make_node("dq", OpKind::kDequantize, {"w16"}, {"w"}));
  g.nodes.push_back(make_node("conv", OpKind::kConv2D, {"in", "w"}, {"out"},
                              Conv2DAttrs{1, 1, PaddingScheme::kValid}));
  REQUIRE(validate(g).ok());

  // consumers of 'w' read the new F32 constant directly
  const Tensor w32 = cast_f16_to_f32(g.constants.at("w16"));
  const Graph g2 = rewire_replace(g, {"dq"}, {}, {{"w", w32}}, {});
  CHECK(g2.nodes.size() == 1);
  CHECK(g2.constants.count("w") == 1);
  CHECK(g2.constants.count("w16") == 0);  // unreferenced constants are pruned
  CHECK(validate(g2).ok());
}

TEST_CASE("rewire_replace: invalid result carries the validation report") {
  Graph g = testutil::channel_pad_graph(2, 2, 3, 0, 4);
  try {
    rewire_replace(g, {"pad"}, {}, {}, {});  // output edge loses its producer
    FAIL("expected RewireError");
  } catch (const RewireError& e) {
    CHECK_FALSE(e.report.ok());
  }
  CHECK_THROWS_AS(rewire_replace(g, {"nosuch"}, {}, {}, {}), DomainError);
}

TEST_CASE("graphs are value types: passes do not mutate their input") {
  const Graph g = testutil::channel_pad_graph(2, 2, 3, 0, 4);
  const size_t nodes_before = g.nodes.size();
  const Graph g2 = rewire_replace(
      g, {"pad"},
      {make_node("relu", OpKind::kRelu, {"in"}, {"r_out"})},
      {}, {{"out", "r_out"}});
  CHECK(g.nodes.size() == nodes_before);
  CHECK(g.find_node("pad") != nullptr);
  CHECK(g2.find_node("pad") == nullptr);
}
