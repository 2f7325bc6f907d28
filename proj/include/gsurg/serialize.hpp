//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gsurg/graph.hpp"
#include "gsurg/interpreter.hpp"
#include "gsurg/planner.hpp"
#include "gsurg/quantizer.hpp"
#include "gsurg/surgery.hpp"

namespace gsurg {

// Graph exchange documents are JSON with a fixed key order and version 1:
//   {version, name, inputs:[{name,dtype,shape}], outputs:[...],
//    constants:[{name,dtype,shape,data}], nodes:[{name,op,inputs,outputs,attrs}]}
// Constant data is a flat row-major array: decimal numbers for F32/I8/I32,
// unsigned 16-bit bit patterns for F16. Nodes are written in topological
// order and constants sorted by name, so output bytes are deterministic.
std::string graph_to_text(const Graph& g);
Graph graph_from_text(const std::string& text, const std::string& source_name);

Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);

// Feeds: {version, samples:[[{name,dtype,shape,data}, ...], ...]}
std::vector<FeedMap> load_feeds(const std::string& path);
void save_feeds(const std::vector<FeedMap>& samples, const std::string& path);

// Pass pipeline: {version, passes:[{pass, options:{k:v}}]}
std::vector<PassSpec> load_pass_specs(const std::string& path);

// Device profile: {version, name, supported:{op:rule}, accel_throughput_...}
DeviceProfile load_profile(const std::string& path);
void save_profile(const DeviceProfile& p, const std::string& path);

// Calibration: {version, samples, ranges:{edge:[min,max]}}
void save_calibration(const CalibrationResult& c, const std::string& path);
CalibrationResult load_calibration(const std::string& path);

// Output mappings: {version, mappings:[{output, axis, parts:[{name,extent}]}]}
void save_mappings(const std::vector<OutputMapping>& ms, const std::string& path);
std::vector<OutputMapping> load_mappings(const std::string& path);

// Stage times: plain text, one "name: ms" per line; '#' starts a comment.
std::vector<std::pair<std::string, double>> load_stage_times(const std::string& path);

// The exchange-format data array for one tensor, e.g. "[0.5,-1.0]".
// Numbers print as the shortest decimal that parses back to the same value,
// so the text is deterministic.
std::string tensor_data_text(const Tensor& t);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace gsurg
