//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "gsurg/feedgen.hpp"
#include "gsurg/float16.hpp"
#include "gsurg/graph.hpp"
#include "gsurg/surgery.hpp"

namespace gsurg::testutil {

// Single MatMul of a [3,3] input against the [3,7] identity-plus-zero-columns
// filter; multiplying an all-ones input gives ones in the first three output
// columns and zeros in the padded four.
inline Graph identity_pad_matmul_graph() {
  Graph g;
  g.name = "identity_pad_matmul";
  g.inputs = {{"in", DType::kF32, {3, 3}}};
  g.outputs = {"out"};
  g.constants.emplace("filter",
                      build_identity_pad_filter(3, 0, 4).with_shape({3, 7}));
  Node mm;
  mm.name = "mm";
  mm.op = OpKind::kMatMul;
  mm.inputs = {"in", "filter"};
  mm.outputs = {"out"};
  g.nodes.push_back(mm);
  return g;
}

// in [1,H,W,C] -> Pad(channel before/after) -> out
inline Graph channel_pad_graph(int64_t h, int64_t w, int64_t c,
                               int64_t pad_before, int64_t pad_after) {
  Graph g;
  g.name = "channel_pad";
  g.inputs = {{"in", DType::kF32, {1, h, w, c}}};
  g.outputs = {"out"};
  Node pad;
  pad.name = "pad";
  pad.op = OpKind::kPad;
  pad.inputs = {"in"};
  pad.outputs = {"out"};
  pad.attrs = PadAttrs{{{0, 0}, {0, 0}, {0, 0}, {pad_before, pad_after}}, 0.0f};
  g.nodes.push_back(pad);
  return g;
}

// Camera-model-like toy: F16 weights behind a Dequantize feeding a 1x1
// Conv2D, then a channel Pad, then Relu.
inline Graph toy_f16_conv_pad_graph() {
  Graph g;
  g.name = "toy_f16_conv_pad";
  g.inputs = {{"in", DType::kF32, {1, 4, 4, 2}}};
  g.outputs = {"out"};

  std::vector<uint16_t> wbits;
  for (int i = 0; i < 2 * 3; ++i) {
    wbits.push_back(f32_to_f16(0.25f * static_cast<float>(i + 1) - 0.5f));
  }
  g.constants.emplace("w_f16", Tensor::f16({1, 1, 2, 3}, std::move(wbits)));

  Node dq;
  dq.name = "dq_w";
  dq.op = OpKind::kDequantize;
  dq.inputs = {"w_f16"};
  dq.outputs = {"w"};
  g.nodes.push_back(dq);

  Node conv;
  conv.name = "conv";
  conv.op = OpKind::kConv2D;
  conv.inputs = {"in", "w"};
  conv.outputs = {"conv_out"};
  conv.attrs = Conv2DAttrs{1, 1, PaddingScheme::kValid};
  g.nodes.push_back(conv);

  Node pad;
  pad.name = "pad";
  pad.op = OpKind::kPad;
  pad.inputs = {"conv_out"};
  pad.outputs = {"pad_out"};
  pad.attrs = PadAttrs{{{0, 0}, {0, 0}, {0, 0}, {0, 5}}, 0.0f};
  g.nodes.push_back(pad);

  Node relu;
  relu.name = "relu";
  relu.op = OpKind::kRelu;
  relu.inputs = {"pad_out"};
  relu.outputs = {"out"};
  g.nodes.push_back(relu);
  return g;
}

// Two graph inputs with very different dynamic ranges concatenated straight
// into the output; the narrow branch loses resolution once both share the
// output tensor's quantization scale.
inline Graph two_branch_concat_graph(int64_t elems = 8) {
  Graph g;
  g.name = "two_branch_concat";
  g.inputs = {{"narrow", DType::kF32, {1, elems}},
              {"wide", DType::kF32, {1, elems}}};
  g.outputs = {"out"};
  Node cat;
  cat.name = "cat";
  cat.op = OpKind::kConcat;
  cat.inputs = {"narrow", "wide"};
  cat.outputs = {"out"};
  cat.attrs = ConcatAttrs{1};
  g.nodes.push_back(cat);
  return g;
}

// Feeds for two_branch_concat_graph: narrow uniform in [0,1], wide uniform
// in [0, wide_max].
inline std::vector<FeedMap> two_branch_feeds(const Graph& g, int n_samples,
                                             uint64_t seed, double wide_max) {
  Rng rng(seed);
  std::vector<FeedMap> feeds;
  for (int s = 0; s < n_samples; ++s) {
    FeedMap fm;
    for (const ValueInfo& vi : g.inputs) {
      const double hi = vi.name == "wide" ? wide_max : 1.0;
      std::vector<float> data(static_cast<size_t>(shape_num_elements(vi.shape)));
      for (auto& v : data) v = static_cast<float>(rng.uniform_in(0.0, hi));
      fm.emplace(vi.name, Tensor::f32(vi.shape, std::move(data)));
    }
    feeds.push_back(std::move(fm));
  }
  return feeds;
}

// Random chain graph with a channel-Pad site somewhere in the middle:
// in -> [0..2 pre ops] -> Pad -> [0..2 post ops] -> out. Cin in [1,16],
// pads in [0,8], spatial dims <= 8.
inline Graph random_channel_pad_graph(Rng& rng) {
  const int64_t h = 1 + static_cast<int64_t>(rng.below(8));
  const int64_t w = 1 + static_cast<int64_t>(rng.below(8));
  const int64_t c = 1 + static_cast<int64_t>(rng.below(16));
  const int64_t pad_before = static_cast<int64_t>(rng.below(9));
  const int64_t pad_after = static_cast<int64_t>(rng.below(9));

  Graph g;
  g.name = "random_pad";
  g.inputs = {{"in", DType::kF32, {1, h, w, c}}};
  std::string edge = "in";
  int node_id = 0;
  auto next_edge = [&] { return "e" + std::to_string(node_id); };

  auto append_unary = [&](OpKind op) {
    Node n;
    n.name = "n" + std::to_string(node_id);
    n.op = op;
    n.inputs = {edge};
    n.outputs = {next_edge()};
    edge = n.outputs[0];
    ++node_id;
    g.nodes.push_back(std::move(n));
  };
  auto append_binary_const = [&](OpKind op, const std::vector<int64_t>& shape) {
    const std::string cname = "c" + std::to_string(node_id);
    ValueInfo vi{cname, DType::kF32, shape};
    Rng crng(rng.next_u64());
    g.constants.emplace(cname, random_tensor(vi, crng));
    Node n;
    n.name = "n" + std::to_string(node_id);
    n.op = op;
    n.inputs = {edge, cname};
    n.outputs = {next_edge()};
    edge = n.outputs[0];
    ++node_id;
    g.nodes.push_back(std::move(n));
  };

  const int pre_ops = static_cast<int>(rng.below(3));
  for (int i = 0; i < pre_ops; ++i) {
    switch (rng.below(4)) {
      case 0: append_unary(OpKind::kRelu); break;
      case 1: append_unary(OpKind::kSigmoid); break;
      case 2: append_binary_const(OpKind::kAdd, {1, h, w, c}); break;
      default: append_binary_const(OpKind::kMul, {1, h, w, c}); break;
    }
  }

  Node pad;
  pad.name = "pad" + std::to_string(node_id);
  pad.op = OpKind::kPad;
  pad.inputs = {edge};
  pad.outputs = {next_edge()};
  pad.attrs = PadAttrs{{{0, 0}, {0, 0}, {0, 0}, {pad_before, pad_after}}, 0.0f};
  edge = pad.outputs[0];
  ++node_id;
  g.nodes.push_back(std::move(pad));

  const int post_ops = static_cast<int>(rng.below(3));
  for (int i = 0; i < post_ops; ++i) {
    append_unary(rng.below(2) == 0 ? OpKind::kRelu : OpKind::kSigmoid);
  }
  g.outputs = {edge};
  return g;
}

class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      auto candidate = base / ("gsurg_test_" + std::to_string(::getpid()) +
                               "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        break;
      }
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace gsurg::testutil
