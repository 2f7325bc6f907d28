//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gsurg/graph.hpp"
#include "gsurg/tensor.hpp"

namespace gsurg {

using FeedMap = std::map<std::string, Tensor>;
using OutputMap = std::map<std::string, Tensor>;

// Observed per-edge value extrema plus per-node operation counts
// (multiply-accumulates for Conv2D/MatMul, output elements otherwise).
struct ExecutionTrace {
  std::map<std::string, std::pair<double, double>> edge_ranges;
  std::map<std::string, int64_t> node_op_counts;
};

// Reference executor. Nodes run in topological order with a fixed
// accumulation order inside Conv2D/MatMul, so identical graph + feeds give
// bit-identical outputs on every run.
OutputMap run(const Graph& g, const FeedMap& feeds);

// Tap applied to every graph-input edge and every node-output edge as it
// materializes (constants are exempt). Lets callers rewrite values in
// flight; the quantizer uses this for fake quantization.
using EdgeHook = std::function<Tensor(const std::string&, Tensor)>;

OutputMap run_with_hook(const Graph& g, const FeedMap& feeds,
                        const EdgeHook& hook);

struct RecordingResult {
  std::vector<OutputMap> outputs;  // one entry per feed map
  ExecutionTrace trace;
};

RecordingResult run_recording(const Graph& g,
                              const std::vector<FeedMap>& feed_set);

// MAC / element counts from shapes alone:
//   Conv2D: N*H'*W'*Cout*kh*kw*Cin, MatMul: m*n*k, otherwise output elements.
std::map<std::string, int64_t> analytic_op_counts(const Graph& g);

}  // namespace gsurg
