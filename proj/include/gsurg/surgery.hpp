//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsurg/graph.hpp"
#include "gsurg/tensor.hpp"

namespace gsurg {

struct SkippedSite {
  std::string node;
  std::string reason;
};

// Audit record for one pass application. Matched sites were rewritten;
// skipped sites are reported with the reason, never silently ignored.
struct PassReport {
  std::string pass;
  std::vector<std::string> nodes_removed;
  std::vector<std::string> nodes_added;
  std::vector<std::string> constants_added;
  std::vector<std::string> inputs_added;
  int sites_matched = 0;
  std::vector<SkippedSite> skipped;

  int sites_skipped() const { return static_cast<int>(skipped.size()); }
  std::string to_string() const;
};

struct PassResult {
  Graph graph;
  PassReport report;
};

// 1x1 filter of shape [1,1,c_in, pad_before+c_in+pad_after] that copies each
// input channel to its shifted output slot and writes zeros elsewhere:
// filter[0,0,i, pad_before+i] = 1. Convolving with it reproduces channel-wise
// zero padding exactly.
Tensor build_identity_pad_filter(int64_t c_in, int64_t pad_before,
                                 int64_t pad_after);

// Replaces channel-only constant-zero Pad nodes on rank-4 NHWC edges with a
// stride-1 VALID Conv2D over an identity-pad filter.
PassResult pad_to_conv2d(const Graph& g);

enum class ZerosAs { kConstant, kGraphInput };

// Replaces the same Pad sites with a channel-axis Concat against zero
// tensors. kConstant embeds the zeros in the graph; kGraphInput adds them as
// new model inputs, which the latency planner then charges as extra uploads.
PassResult pad_to_concat(const Graph& g, ZerosAs zeros_as);

// Folds constant-parameter Dequantize nodes away: the F16 constant is cast
// to F32 once and wired in under the old output edge name. Dequantize of
// non-constant values is reported as skipped.
PassResult eliminate_dequantize(const Graph& g);

// Records how split outputs reassemble into the original tensor.
struct OutputMapping {
  std::string output;  // original output name
  int64_t axis = 0;
  std::vector<std::pair<std::string, int64_t>> parts;  // (new name, extent)
};

struct SplitResult {
  Graph graph;
  PassReport report;
  OutputMapping mapping;
};

// Breaks a Concat-produced graph output into one output per concatenated
// branch, named "<output>#k". Use when branches with very different dynamic
// ranges share one output tensor (and hence one quantization scale).
SplitResult split_output_branches(const Graph& g, const std::string& output_name);

struct PassSpec {
  std::string name;
  std::map<std::string, std::string> options;
};

struct PipelineResult {
  Graph graph;  // last successfully produced graph
  std::vector<PassReport> reports;
  std::vector<OutputMapping> mappings;
  std::optional<std::string> error;  // set if the pipeline aborted

  bool ok() const { return !error.has_value(); }
};

// Runs passes in order, each on the previous result. The first failing pass
// aborts the pipeline; reports collected so far are returned alongside the
// error.
PipelineResult apply_passes(const Graph& g, const std::vector<PassSpec>& passes);

struct EquivalenceReport {
  struct PerOutput {
    std::string name;
    double max_abs_diff = 0.0;
    bool bit_exact = true;
  };
  int samples = 0;
  uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<PerOutput> outputs;

  bool bit_exact_all() const;
  double max_abs_diff_all() const;
  bool passed() const;  // every output within tolerance
  std::string to_string() const;
};

// Feeds both graphs the same seeded pseudo-random samples (uniform [-1,1))
// and compares outputs elementwise. Inputs present only in `after` (e.g.
// zeros added by pad_to_concat's graph-input mode) are fed zero tensors.
// Outputs listed in `mappings` are reconstructed by concatenation before
// comparison.
EquivalenceReport verify_equivalence(const Graph& before, const Graph& after,
                                     int n_samples, uint64_t seed,
                                     double tolerance,
                                     const std::vector<OutputMapping>& mappings = {});

}  // namespace gsurg
