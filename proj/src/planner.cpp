//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/planner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

namespace gsurg {

const char* support_rule_name(SupportRule rule) {
  switch (rule) {
    case SupportRule::kAlways: return "always";
    case SupportRule::kNever: return "never";
    case SupportRule::kNoChannelPad: return "no_channel_pad";
  }
  return "?";
}

std::optional<SupportRule> support_rule_from_name(std::string_view name) {
  if (name == "always") return SupportRule::kAlways;
  if (name == "never") return SupportRule::kNever;
  if (name == "no_channel_pad") return SupportRule::kNoChannelPad;
  return std::nullopt;
}

const char* placement_name(Placement p) {
  return p == Placement::kAccel ? "accel" : "cpu";
}

const char* transfer_dir_name(TransferDir d) {
  switch (d) {
    case TransferDir::kInputUpload: return "input_upload";
    case TransferDir::kOutputDownload: return "output_download";
    case TransferDir::kAccelToCpu: return "accel_to_cpu";
    case TransferDir::kCpuToAccel: return "cpu_to_accel";
  }
  return "?";
}

void DeviceProfile::check() const {
  if (!(accel_throughput > 0.0) || !(cpu_throughput > 0.0)) {
    throw DomainError("device profile throughputs must be > 0");
  }
  if (!(transfer_bandwidth > 0.0)) {
    throw DomainError("device profile transfer bandwidth must be > 0");
  }
  if (transfer_overhead < 0.0) {
    throw DomainError("device profile transfer overhead must be >= 0");
  }
}

DeviceProfile DeviceProfile::tda4vm_like() {
  DeviceProfile p;
  p.name = "tda4vm-like";
  for (OpKind op :
       {OpKind::kConv2D, OpKind::kConcat, OpKind::kMatMul, OpKind::kAdd,
        OpKind::kMul, OpKind::kRelu, OpKind::kSigmoid, OpKind::kReshape}) {
    p.rules[op] = SupportRule::kAlways;
  }
  p.rules[OpKind::kPad] = SupportRule::kNoChannelPad;
  p.rules[OpKind::kDequantize] = SupportRule::kNever;
  // synthetic numbers, deliberately not calibrated to hardware
  p.accel_throughput = 1.0e7;
  p.cpu_throughput = 1.0e5;
  p.transfer_bandwidth = 1.0e6;
  p.transfer_overhead = 0.05;
  return p;
}

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::pair<bool, std::string> check_support(
    const Node& node, const std::map<std::string, ValueInfo>& shapes,
    const DeviceProfile& profile) {
  auto it = profile.rules.find(node.op);
  if (it == profile.rules.end()) return {false, "no rule"};
  switch (it->second) {
    case SupportRule::kAlways: return {true, ""};
    case SupportRule::kNever:
      return {false, lowercase(op_name(node.op)) + " unsupported"};
    case SupportRule::kNoChannelPad: {
      if (node.op != OpKind::kPad) return {true, ""};
      const auto& attrs = std::get<PadAttrs>(node.attrs);
      const size_t rank = shapes.at(node.inputs[0]).shape.size();
      if (rank > 0 && attrs.paddings.size() == rank &&
          (attrs.paddings[rank - 1][0] != 0 ||
           attrs.paddings[rank - 1][1] != 0)) {
        return {false, "channel-wise constant padding unsupported"};
      }
      return {true, ""};
    }
  }
  return {false, "no rule"};
}

Partition partition(const Graph& g, const DeviceProfile& profile) {
  profile.check();
  const auto infos = infer_shapes(g);
  const auto order = topo_order(g);

  Partition part;
  std::map<std::string, size_t> segment_of_node;
  for (const std::string& name : order) {
    const Node* n = g.find_node(name);
    auto [supported, reason] = check_support(*n, infos, profile);
    const Placement placement = supported ? Placement::kAccel : Placement::kCpu;
    part.placements[name] = placement;
    if (!supported) part.why_cpu[name] = reason;
    if (part.segments.empty() || part.segments.back().placement != placement) {
      part.segments.push_back({placement, {}});
    }
    part.segments.back().nodes.push_back(name);
    segment_of_node[name] = part.segments.size() - 1;
  }

  auto edge_bytes = [&](const std::string& edge) {
    const ValueInfo& vi = infos.at(edge);
    return static_cast<int64_t>(shape_num_elements(vi.shape)) *
           static_cast<int64_t>(dtype_size(vi.dtype));
  };

  // host-resident endpoints: one upload per input, one download per output
  for (const ValueInfo& vi : g.inputs) {
    part.boundaries.push_back(
        {vi.name, edge_bytes(vi.name), TransferDir::kInputUpload});
  }
  for (const std::string& out : g.outputs) {
    part.boundaries.push_back(
        {out, edge_bytes(out), TransferDir::kOutputDownload});
  }

  // node-to-node edges crossing placements, charged once per consuming segment
  std::map<std::string, const Node*> producer_node;
  for (const Node& n : g.nodes) {
    for (const std::string& out : n.outputs) producer_node[out] = &n;
  }
  std::set<std::string> charged;
  for (const std::string& name : order) {
    const Node* consumer = g.find_node(name);
    const Placement to = part.placements.at(name);
    const size_t seg = segment_of_node.at(name);
    for (const std::string& in : consumer->inputs) {
      auto it = producer_node.find(in);
      if (it == producer_node.end()) continue;  // graph input or constant
      const Placement from = part.placements.at(it->second->name);
      if (from == to) continue;
      if (!charged.insert(in + "#" + std::to_string(seg)).second) continue;
      part.boundaries.push_back({in, edge_bytes(in),
                                 from == Placement::kAccel
                                     ? TransferDir::kAccelToCpu
                                     : TransferDir::kCpuToAccel});
    }
  }
  return part;
}

LatencyEstimate estimate_latency(const Graph& g, const Partition& p,
                                 const DeviceProfile& profile,
                                 const std::map<std::string, int64_t>& op_counts) {
  profile.check();
  LatencyEstimate est;
  for (const Segment& seg : p.segments) {
    const double throughput = seg.placement == Placement::kAccel
                                  ? profile.accel_throughput
                                  : profile.cpu_throughput;
    double ms = 0.0;
    for (const std::string& node : seg.nodes) {
      auto it = op_counts.find(node);
      if (it == op_counts.end()) {
        throw DomainError("estimate_latency: no op count for node '" + node +
                          "'");
      }
      ms += static_cast<double>(it->second) / throughput;
    }
    est.segment_compute_ms.push_back(ms);
    est.compute_total_ms += ms;
  }
  for (const BoundaryTensor& b : p.boundaries) {
    const double ms = profile.transfer_overhead +
                      static_cast<double>(b.bytes) / profile.transfer_bandwidth;
    est.transfer_ms.push_back(ms);
    est.transfer_total_ms += ms;
  }
  est.total_ms = est.compute_total_ms + est.transfer_total_ms;
  est.fps = est.total_ms > 0.0 ? 1000.0 / est.total_ms
                               : std::numeric_limits<double>::infinity();
  (void)g;
  return est;
}

bool LatencyEstimate::unbounded() const { return std::isinf(fps); }

double compare_reports(const LatencyEstimate& before,
                       const LatencyEstimate& after) {
  if (!(before.fps > 0.0)) {
    throw DomainError("compare_reports: baseline fps must be > 0");
  }
  return 100.0 * (after.fps - before.fps) / before.fps;
}

PipelineBudget pipeline_budget(
    const std::vector<std::pair<std::string, double>>& stages) {
  PipelineBudget budget;
  budget.stages = stages;
  for (const auto& [name, ms] : stages) {
    if (ms < 0.0 || std::isnan(ms)) {
      throw DomainError("pipeline_budget: stage '" + name +
                        "' has a negative time");
    }
    budget.total_ms += ms;
  }
  budget.fps = budget.total_ms > 0.0
                   ? 1000.0 / budget.total_ms
                   : std::numeric_limits<double>::infinity();
  return budget;
}

}  // namespace gsurg
