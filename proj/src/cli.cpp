//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/cli.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsurg/feedgen.hpp"
#include "gsurg/interpreter.hpp"
#include "gsurg/kernels.hpp"
#include "gsurg/planner.hpp"
#include "gsurg/quantizer.hpp"
#include "gsurg/serialize.hpp"
#include "gsurg/surgery.hpp"

namespace gsurg::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kOpError = 1;
constexpr int kUsageError = 2;

std::string fmt_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", ms);
  return buf;
}

std::string fmt_fps(double fps) {
  if (std::isinf(fps)) return "unbounded";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", fps);
  return buf;
}

std::string fmt_val(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

json fps_json(double fps) {
  if (std::isinf(fps)) return "unbounded";
  return fps;
}

void write_report(const std::string& path, const json& j) {
  if (!path.empty()) write_file(path, j.dump(2) + "\n");
}

json pass_report_json(const PassReport& r) {
  json j;
  j["pass"] = r.pass;
  j["sites_matched"] = r.sites_matched;
  json skipped = json::array();
  for (const SkippedSite& s : r.skipped) {
    skipped.push_back({{"node", s.node}, {"reason", s.reason}});
  }
  j["sites_skipped"] = std::move(skipped);
  j["nodes_removed"] = r.nodes_removed;
  j["nodes_added"] = r.nodes_added;
  j["constants_added"] = r.constants_added;
  j["inputs_added"] = r.inputs_added;
  return j;
}

struct CommonOpts {
  std::string report_path;
};

int cmd_validate(const std::string& graph_path, const CommonOpts& common,
                 std::ostream& out) {
  const Graph g = load_graph(graph_path);  // load already validates
  json j;
  j["command"] = "validate";
  j["graph"] = graph_path;
  j["ok"] = true;
  write_report(common.report_path, j);
  out << "ok\n";
  return kOk;
}

int cmd_run(const std::string& graph_path, const std::string& feeds_path,
            uint64_t seed, const CommonOpts& common, std::ostream& out) {
  const Graph g = load_graph(graph_path);
  std::vector<FeedMap> samples;
  if (feeds_path.empty()) {
    samples = random_feed_set(g.inputs, seed, 1);
  } else {
    samples = load_feeds(feeds_path);
  }
  json j;
  j["command"] = "run";
  j["graph"] = graph_path;
  json jsamples = json::array();
  for (size_t s = 0; s < samples.size(); ++s) {
    const OutputMap outputs = run(g, samples[s]);
    out << "sample " << s << "\n";
    json joutputs = json::array();
    for (const std::string& name : g.outputs) {
      const Tensor& t = outputs.at(name);
      out << "  " << name << " " << dtype_name(t.dtype()) << " "
          << shape_to_string(t.shape()) << " = " << tensor_data_text(t) << "\n";
      json e;
      e["name"] = name;
      e["dtype"] = dtype_name(t.dtype());
      e["shape"] = t.shape();
      e["data"] = json::parse(tensor_data_text(t));
      joutputs.push_back(std::move(e));
    }
    jsamples.push_back({{"outputs", std::move(joutputs)}});
  }
  j["samples"] = std::move(jsamples);
  write_report(common.report_path, j);
  return kOk;
}

int cmd_surgery(const std::string& graph_path, const std::string& passes_path,
                const std::string& out_path, const std::string& mapping_path,
                const CommonOpts& common, std::ostream& out, std::ostream& err) {
  const Graph g = load_graph(graph_path);
  const auto specs = load_pass_specs(passes_path);
  const PipelineResult result = apply_passes(g, specs);

  json j;
  j["command"] = "surgery";
  j["graph"] = graph_path;
  json jreports = json::array();
  for (const PassReport& r : result.reports) {
    out << r.to_string() << "\n";
    jreports.push_back(pass_report_json(r));
  }
  j["passes"] = std::move(jreports);
  if (!result.ok()) {
    j["error"] = *result.error;
    write_report(common.report_path, j);
    err << "error: " << *result.error << "\n";
    return kOpError;
  }
  save_graph(result.graph, out_path);
  j["output"] = out_path;
  out << "wrote " << out_path << "\n";
  if (!mapping_path.empty()) {
    save_mappings(result.mappings, mapping_path);
    j["mappings"] = mapping_path;
    out << "wrote " << mapping_path << "\n";
  } else if (!result.mappings.empty()) {
    err << "note: split_output_branches ran but --mapping was not given; "
           "the output mapping was discarded\n";
  }
  write_report(common.report_path, j);
  return kOk;
}

int cmd_verify(const std::string& before_path, const std::string& after_path,
               int samples, uint64_t seed, double tolerance,
               const std::string& mapping_path, const CommonOpts& common,
               std::ostream& out) {
  const Graph before = load_graph(before_path);
  const Graph after = load_graph(after_path);
  std::vector<OutputMapping> mappings;
  if (!mapping_path.empty()) mappings = load_mappings(mapping_path);
  const EquivalenceReport report =
      verify_equivalence(before, after, samples, seed, tolerance, mappings);

  json j;
  j["command"] = "verify";
  j["before"] = before_path;
  j["after"] = after_path;
  j["samples"] = report.samples;
  j["seed"] = report.seed;
  j["tolerance"] = report.tolerance;
  json joutputs = json::array();
  for (const auto& o : report.outputs) {
    out << o.name << ": max_abs_diff " << fmt_val(o.max_abs_diff)
        << (o.bit_exact ? " bit_exact" : "") << "\n";
    json e;
    e["name"] = o.name;
    e["max_abs_diff"] = std::isinf(o.max_abs_diff)
                            ? json("inf")
                            : json(o.max_abs_diff);
    e["bit_exact"] = o.bit_exact;
    joutputs.push_back(std::move(e));
  }
  j["outputs"] = std::move(joutputs);
  const bool passed = report.passed();
  j["passed"] = passed;
  write_report(common.report_path, j);
  out << (passed ? "PASS" : "FAIL") << "\n";
  return passed ? kOk : kOpError;
}

int cmd_quantize(const std::string& graph_path, const std::string& calib_path,
                 bool diagnose, double threshold,
                 const std::string& calib_out_path, const CommonOpts& common,
                 std::ostream& out) {
  const Graph g = load_graph(graph_path);
  const auto calib_feeds = load_feeds(calib_path);
  const CalibrationResult calib = calibrate(g, calib_feeds);
  if (!calib_out_path.empty()) save_calibration(calib, calib_out_path);

  const QuantErrorReport report = simulate_quantized(g, calib, calib_feeds);
  json j;
  j["command"] = "quantize";
  j["graph"] = graph_path;
  j["calib_samples"] = calib.samples;
  json joutputs = json::object();
  for (const std::string& name : g.outputs) {
    const double err = report.max_abs_error.at(name);
    const double sqnr = report.sqnr_db.at(name);
    out << name << ": max_abs_error " << fmt_val(err) << ", sqnr "
        << fmt_val(sqnr) << " dB\n";
    json e;
    e["max_abs_error"] = err;
    e["sqnr_db"] = std::isinf(sqnr) ? json("inf") : json(sqnr);
    joutputs[name] = std::move(e);
  }
  j["outputs"] = std::move(joutputs);
  if (diagnose) {
    const auto findings = diagnose_range_disparity(g, calib, threshold);
    json jfindings = json::array();
    if (findings.empty()) {
      out << "no range disparity above ratio " << fmt_val(threshold) << "\n";
    }
    for (const RangeFinding& f : findings) {
      out << f.to_string() << "\n";
      json e;
      e["node"] = f.node;
      e["output_edge"] = f.output_edge;
      e["ratio"] = f.ratio;
      e["recommend_split"] = f.recommend_split;
      json branches = json::array();
      for (const auto& [edge, range] : f.branch_ranges) {
        branches.push_back(
            {{"edge", edge}, {"min", range.first}, {"max", range.second}});
      }
      e["branches"] = std::move(branches);
      jfindings.push_back(std::move(e));
    }
    j["findings"] = std::move(jfindings);
  }
  write_report(common.report_path, j);
  return kOk;
}

json plan_json(const Graph& g, const DeviceProfile& profile,
               const Partition& part, const LatencyEstimate& est) {
  json j;
  json segments = json::array();
  for (size_t i = 0; i < part.segments.size(); ++i) {
    const Segment& s = part.segments[i];
    json e;
    e["placement"] = placement_name(s.placement);
    e["nodes"] = s.nodes;
    e["compute_ms"] = est.segment_compute_ms[i];
    segments.push_back(std::move(e));
  }
  j["segments"] = std::move(segments);
  json transfers = json::array();
  for (size_t i = 0; i < part.boundaries.size(); ++i) {
    const BoundaryTensor& b = part.boundaries[i];
    json e;
    e["edge"] = b.edge;
    e["bytes"] = b.bytes;
    e["direction"] = transfer_dir_name(b.direction);
    e["ms"] = est.transfer_ms[i];
    transfers.push_back(std::move(e));
  }
  j["transfers"] = std::move(transfers);
  json unsupported = json::array();
  for (const auto& [node, reason] : part.why_cpu) {
    unsupported.push_back({{"node", node}, {"reason", reason}});
  }
  j["unsupported"] = std::move(unsupported);
  j["compute_ms"] = est.compute_total_ms;
  j["transfer_ms"] = est.transfer_total_ms;
  j["total_ms"] = est.total_ms;
  j["fps"] = fps_json(est.fps);
  (void)g;
  (void)profile;
  return j;
}

void print_plan(const Graph& g, const Partition& part,
                const LatencyEstimate& est, std::ostream& out) {
  for (size_t i = 0; i < part.segments.size(); ++i) {
    const Segment& s = part.segments[i];
    out << "segment " << i << " [" << placement_name(s.placement) << "]";
    for (const std::string& n : s.nodes) out << " " << n;
    out << "  (" << fmt_ms(est.segment_compute_ms[i]) << " ms)\n";
  }
  for (const auto& [node, reason] : part.why_cpu) {
    out << "on cpu: " << node << " (" << reason << ")\n";
  }
  for (size_t i = 0; i < part.boundaries.size(); ++i) {
    const BoundaryTensor& b = part.boundaries[i];
    out << "transfer " << transfer_dir_name(b.direction) << " " << b.edge << " ("
        << b.bytes << " B, " << fmt_ms(est.transfer_ms[i]) << " ms)\n";
  }
  out << "compute " << fmt_ms(est.compute_total_ms) << " ms, transfer "
      << fmt_ms(est.transfer_total_ms) << " ms\n";
  out << "total " << fmt_ms(est.total_ms) << " ms, " << fmt_fps(est.fps)
      << " FPS\n";
  (void)g;
}

int cmd_plan(const std::string& graph_path, const std::string& profile_path,
             const std::string& compare_path, const CommonOpts& common,
             std::ostream& out) {
  const Graph g = load_graph(graph_path);
  const DeviceProfile profile = load_profile(profile_path);
  const Partition part = partition(g, profile);
  const LatencyEstimate est =
      estimate_latency(g, part, profile, analytic_op_counts(g));

  json j;
  j["command"] = "plan";
  j["graph"] = graph_path;
  j["profile"] = profile.name;
  j["plan"] = plan_json(g, profile, part, est);
  out << "graph " << graph_path << " under profile '" << profile.name << "'\n";
  print_plan(g, part, est, out);

  if (!compare_path.empty()) {
    const Graph other = load_graph(compare_path);
    const Partition other_part = partition(other, profile);
    const LatencyEstimate other_est =
        estimate_latency(other, other_part, profile, analytic_op_counts(other));
    out << "\ngraph " << compare_path << " under profile '" << profile.name
        << "'\n";
    print_plan(other, other_part, other_est, out);
    const double improvement = compare_reports(est, other_est);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", improvement);
    out << "\nrelative FPS improvement: " << buf << "%\n";
    j["compare"] = plan_json(other, profile, other_part, other_est);
    j["relative_fps_improvement_percent"] = improvement;
  }
  write_report(common.report_path, j);
  return kOk;
}

int cmd_budget(const std::string& stages_path, const CommonOpts& common,
               std::ostream& out) {
  const auto stages = load_stage_times(stages_path);
  const PipelineBudget budget = pipeline_budget(stages);
  json j;
  j["command"] = "budget";
  json jstages = json::array();
  for (const auto& [name, ms] : budget.stages) {
    out << name << ": " << fmt_ms(ms) << " ms\n";
    jstages.push_back({{"name", name}, {"ms", ms}});
  }
  j["stages"] = std::move(jstages);
  j["total_ms"] = budget.total_ms;
  j["fps"] = fps_json(budget.fps);
  write_report(common.report_path, j);
  out << "total " << fmt_ms(budget.total_ms) << " ms, " << fmt_fps(budget.fps)
      << " FPS\n";
  return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"model graph surgery toolkit"};
  app.require_subcommand(1);
  bool serial = false;
  app.add_flag("--serial", serial, "use the serial reference kernels");

  CommonOpts common;

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "check a graph file");
  std::string validate_graph;
  validate_cmd->add_option("graph", validate_graph, "graph file")->required();
  validate_cmd->add_option("--report", common.report_path, "machine report path");

  // run
  auto* run_cmd = app.add_subcommand("run", "execute a graph");
  std::string run_graph, run_feeds;
  uint64_t run_seed = 42;
  run_cmd->add_option("graph", run_graph, "graph file")->required();
  run_cmd->add_option("--feeds", run_feeds, "feeds file");
  run_cmd->add_option("--seed", run_seed, "seed for generated feeds");
  run_cmd->add_option("--report", common.report_path, "machine report path");

  // surgery
  auto* surgery_cmd = app.add_subcommand("surgery", "apply rewrite passes");
  std::string surgery_graph, surgery_passes, surgery_out, surgery_mapping;
  surgery_cmd->add_option("graph", surgery_graph, "graph file")->required();
  surgery_cmd->add_option("--passes", surgery_passes, "pass pipeline file")
      ->required();
  surgery_cmd->add_option("-o,--output", surgery_out, "output graph file")
      ->required();
  surgery_cmd->add_option("--mapping", surgery_mapping,
                          "where to write output mappings from split passes");
  surgery_cmd->add_option("--report", common.report_path, "machine report path");

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "check two graphs compute the same function");
  std::string verify_before, verify_after, verify_mapping;
  int verify_samples = 100;
  uint64_t verify_seed = 42;
  double verify_tol = 0.0;
  verify_cmd->add_option("before", verify_before, "graph file")->required();
  verify_cmd->add_option("after", verify_after, "graph file")->required();
  verify_cmd->add_option("--samples", verify_samples, "random samples");
  verify_cmd->add_option("--seed", verify_seed, "feed generator seed");
  verify_cmd->add_option("--tol", verify_tol, "max allowed |diff|");
  verify_cmd->add_option("--mapping", verify_mapping, "output mapping file");
  verify_cmd->add_option("--report", common.report_path, "machine report path");

  // quantize
  auto* quant_cmd =
      app.add_subcommand("quantize", "simulate int8 inference error");
  std::string quant_graph, quant_calib, quant_calib_out;
  bool quant_diagnose = false;
  double quant_threshold = 10.0;
  quant_cmd->add_option("graph", quant_graph, "graph file")->required();
  quant_cmd->add_option("--calib", quant_calib, "calibration feeds file")
      ->required();
  quant_cmd->add_flag("--diagnose", quant_diagnose,
                      "report dynamic-range disparity at Concat nodes");
  quant_cmd->add_option("--threshold", quant_threshold,
                        "range ratio that triggers a finding");
  quant_cmd->add_option("--calib-out", quant_calib_out,
                        "write the calibration result here");
  quant_cmd->add_option("--report", common.report_path, "machine report path");

  // plan
  auto* plan_cmd =
      app.add_subcommand("plan", "partition a graph and estimate latency");
  std::string plan_graph, plan_profile, plan_compare;
  plan_cmd->add_option("graph", plan_graph, "graph file")->required();
  plan_cmd->add_option("--profile", plan_profile, "device profile file")
      ->required();
  plan_cmd->add_option("--compare", plan_compare,
                       "second graph to plan and compare against");
  plan_cmd->add_option("--report", common.report_path, "machine report path");

  // budget
  auto* budget_cmd =
      app.add_subcommand("budget", "sum per-stage times into a frame budget");
  std::string budget_stages;
  budget_cmd->add_option("stages", budget_stages, "stage times file")->required();
  budget_cmd->add_option("--report", common.report_path, "machine report path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  }

  kernels::set_exec_mode(serial ? kernels::ExecMode::kSerial
                                : kernels::ExecMode::kParallel);
  try {
    if (validate_cmd->parsed()) {
      return cmd_validate(validate_graph, common, out);
    }
    if (run_cmd->parsed()) {
      return cmd_run(run_graph, run_feeds, run_seed, common, out);
    }
    if (surgery_cmd->parsed()) {
      return cmd_surgery(surgery_graph, surgery_passes, surgery_out,
                         surgery_mapping, common, out, err);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(verify_before, verify_after, verify_samples,
                        verify_seed, verify_tol, verify_mapping, common, out);
    }
    if (quant_cmd->parsed()) {
      return cmd_quantize(quant_graph, quant_calib, quant_diagnose,
                          quant_threshold, quant_calib_out, common, out);
    }
    if (plan_cmd->parsed()) {
      return cmd_plan(plan_graph, plan_profile, plan_compare, common, out);
    }
    if (budget_cmd->parsed()) {
      return cmd_budget(budget_stages, common, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kOpError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kOpError;
  }
  err << "usage error: no subcommand\n";
  return kUsageError;
}

}  // namespace gsurg::cli
