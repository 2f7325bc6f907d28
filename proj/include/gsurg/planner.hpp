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

namespace gsurg {

// Per-op support rules. kNoChannelPad models an accelerator SDK that handles
// spatial padding but not constant padding along the channel axis.
enum class SupportRule { kAlways, kNever, kNoChannelPad };

const char* support_rule_name(SupportRule rule);
std::optional<SupportRule> support_rule_from_name(std::string_view name);

// Declarative accelerator description. Cost model: a node costs
// op_count / throughput ms on its placement; a transfer costs
// transfer_overhead + bytes / transfer_bandwidth ms. The shipped defaults are
// synthetic, not calibrated to any hardware.
struct DeviceProfile {
  std::string name;
  std::map<OpKind, SupportRule> rules;
  double accel_throughput = 1.0;    // MACs per ms
  double cpu_throughput = 1.0;      // MACs per ms
  double transfer_bandwidth = 1.0;  // bytes per ms
  double transfer_overhead = 0.0;   // ms per transfer event

  void check() const;  // throws DomainError on nonsense values

  // Accelerator-style profile: Dequantize unsupported, channel-wise constant
  // Pad unsupported, every other op in the op set supported.
  static DeviceProfile tda4vm_like();
};

enum class Placement { kAccel, kCpu };
const char* placement_name(Placement p);

std::pair<bool, std::string> check_support(
    const Node& node, const std::map<std::string, ValueInfo>& shapes,
    const DeviceProfile& profile);

struct Segment {
  Placement placement = Placement::kAccel;
  std::vector<std::string> nodes;  // topo order
};

enum class TransferDir { kInputUpload, kOutputDownload, kAccelToCpu, kCpuToAccel };
const char* transfer_dir_name(TransferDir d);

struct BoundaryTensor {
  std::string edge;
  int64_t bytes = 0;
  TransferDir direction = TransferDir::kInputUpload;
};

// Maximal runs of same-placement nodes in topo order. Graph inputs and
// outputs live in host memory: every input is charged one upload and every
// output one download regardless of placement; node-to-node edges crossing
// placements are charged per consuming segment. Constants ship with the
// deployed model and cost nothing per inference.
struct Partition {
  std::vector<Segment> segments;
  std::vector<BoundaryTensor> boundaries;
  std::map<std::string, Placement> placements;     // per node
  std::map<std::string, std::string> why_cpu;      // unsupported-reason per node
};

Partition partition(const Graph& g, const DeviceProfile& profile);

struct LatencyEstimate {
  std::vector<double> segment_compute_ms;  // parallel to partition.segments
  std::vector<double> transfer_ms;         // parallel to partition.boundaries
  double compute_total_ms = 0.0;
  double transfer_total_ms = 0.0;
  double total_ms = 0.0;
  double fps = 0.0;  // +inf when total_ms == 0 ("unbounded")

  bool unbounded() const;
};

LatencyEstimate estimate_latency(const Graph& g, const Partition& p,
                                 const DeviceProfile& profile,
                                 const std::map<std::string, int64_t>& op_counts);

// Relative FPS improvement in percent: 100 * (after - before) / before.
double compare_reports(const LatencyEstimate& before, const LatencyEstimate& after);

struct PipelineBudget {
  std::vector<std::pair<std::string, double>> stages;
  double total_ms = 0.0;
  double fps = 0.0;
};

PipelineBudget pipeline_budget(const std::vector<std::pair<std::string, double>>& stages);

}  // namespace gsurg
