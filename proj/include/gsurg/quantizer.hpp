//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gsurg/graph.hpp"
#include "gsurg/interpreter.hpp"
#include "gsurg/tensor.hpp"

namespace gsurg {

// Per-edge observed value bounds, always widened to include zero so that an
// exact zero quantizes exactly.
struct CalibrationResult {
  std::map<std::string, std::pair<double, double>> ranges;
  int samples = 0;
};

CalibrationResult calibrate(const Graph& g, const std::vector<FeedMap>& feeds);

struct QuantErrorReport {
  int samples = 0;
  std::map<std::string, double> max_abs_error;  // per graph output
  std::map<std::string, double> sqnr_db;        // per graph output
  std::map<std::string, QuantParams> qparams;   // per fake-quantized edge
};

// Simulates int8 inference by fake quantization: each graph input and each
// node output is passed through quantize/dequantize with per-tensor
// asymmetric parameters from its calibrated range, all in F32 arithmetic.
// Errors are measured against the plain interpreter on the same feeds.
QuantErrorReport simulate_quantized(const Graph& g,
                                    const CalibrationResult& calib,
                                    const std::vector<FeedMap>& eval_feeds);

// One Concat whose branches span wildly different ranges shares a single
// quantization scale across all of them; the narrow branch then loses most
// of its resolution.
struct RangeFinding {
  std::string node;                // Concat node
  std::string output_edge;         // its output
  double ratio = 0.0;              // widest branch range / narrowest
  bool recommend_split = false;    // true when the Concat feeds a graph output
  std::vector<std::pair<std::string, std::pair<double, double>>> branch_ranges;
  std::string to_string() const;
};

std::vector<RangeFinding> diagnose_range_disparity(const Graph& g,
                                                   const CalibrationResult& calib,
                                                   double ratio_threshold = 10.0);

}  // namespace gsurg
