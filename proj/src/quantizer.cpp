//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gsurg {

CalibrationResult calibrate(const Graph& g, const std::vector<FeedMap>& feeds) {
  if (feeds.empty()) {
    throw DomainError("calibrate: feed list must not be empty");
  }
  const RecordingResult rec = run_recording(g, feeds);
  CalibrationResult result;
  result.samples = static_cast<int>(feeds.size());
  for (const auto& [edge, range] : rec.trace.edge_ranges) {
    result.ranges[edge] = {std::min(range.first, 0.0),
                           std::max(range.second, 0.0)};
  }
  return result;
}

QuantErrorReport simulate_quantized(const Graph& g,
                                    const CalibrationResult& calib,
                                    const std::vector<FeedMap>& eval_feeds) {
  if (eval_feeds.empty()) {
    throw DomainError("simulate_quantized: eval feed list must not be empty");
  }

  // every edge the run will touch needs a calibrated range up front
  const auto infos = infer_shapes(g);
  for (const auto& [edge, vi] : infos) {
    if (!calib.ranges.count(edge)) {
      throw DomainError("simulate_quantized: no calibrated range for edge '" +
                        edge + "'");
    }
  }

  QuantErrorReport report;
  report.samples = static_cast<int>(eval_feeds.size());

  // F16 edges stay raw bit patterns until their Dequantize; everything else
  // flowing through the graph is F32 and gets the fake-quant treatment.
  auto fake_quant = [&](const std::string& edge, Tensor t) -> Tensor {
    if (t.dtype() != DType::kF32) return t;
    const auto& range = calib.ranges.at(edge);
    const QuantParams qp =
        compute_qparams(range.first, range.second, QuantMode::kAsymmetric);
    report.qparams.emplace(edge, qp);
    return dequantize_affine(quantize_affine(t, qp), qp);
  };

  std::map<std::string, double> noise_power, signal_power;
  for (const FeedMap& feeds : eval_feeds) {
    const OutputMap ref = run(g, feeds);
    const OutputMap quant = run_with_hook(g, feeds, fake_quant);
    for (const std::string& out : g.outputs) {
      const auto rv = ref.at(out).f32_data();
      const auto qv = quant.at(out).f32_data();
      double& max_err = report.max_abs_error[out];
      double& noise = noise_power[out];
      double& signal = signal_power[out];
      for (size_t i = 0; i < rv.size(); ++i) {
        const double e = static_cast<double>(rv[i]) - qv[i];
        max_err = std::max(max_err, std::abs(e));
        noise += e * e;
        signal += static_cast<double>(rv[i]) * rv[i];
      }
    }
  }
  for (const std::string& out : g.outputs) {
    const double noise = noise_power[out];
    const double signal = signal_power[out];
    report.sqnr_db[out] = noise == 0.0
                              ? std::numeric_limits<double>::infinity()
                              : 10.0 * std::log10(signal / noise);
  }
  return report;
}

std::string RangeFinding::to_string() const {
  std::ostringstream os;
  os << "concat '" << node << "' mixes branch ranges (ratio "
     << ratio << "):";
  for (const auto& [edge, range] : branch_ranges) {
    os << "\n  " << edge << ": [" << range.first << ", " << range.second << "]";
  }
  if (recommend_split) {
    os << "\nrecommendation: split_output_branches on output '" << output_edge
       << "'";
  }
  return os.str();
}

std::vector<RangeFinding> diagnose_range_disparity(const Graph& g,
                                                   const CalibrationResult& calib,
                                                   double ratio_threshold) {
  constexpr double kMinWidth = 1e-12;  // guards the ratio against zero ranges
  std::vector<RangeFinding> findings;
  for (const Node& n : g.nodes) {
    if (n.op != OpKind::kConcat) continue;
    RangeFinding f;
    f.node = n.name;
    f.output_edge = n.outputs[0];
    double min_width = std::numeric_limits<double>::infinity();
    double max_width = 0.0;
    for (const std::string& in : n.inputs) {
      auto it = calib.ranges.find(in);
      if (it == calib.ranges.end()) {
        throw DomainError("diagnose_range_disparity: no range for edge '" + in +
                          "'");
      }
      const double width =
          std::max(it->second.second - it->second.first, kMinWidth);
      min_width = std::min(min_width, width);
      max_width = std::max(max_width, width);
      f.branch_ranges.emplace_back(in, it->second);
    }
    f.ratio = max_width / min_width;
    if (f.ratio >= ratio_threshold) {
      f.recommend_split = std::find(g.outputs.begin(), g.outputs.end(),
                                    f.output_edge) != g.outputs.end();
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

}  // namespace gsurg
