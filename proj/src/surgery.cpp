//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <sstream>

#include "gsurg/feedgen.hpp"
#include "gsurg/float16.hpp"
#include "gsurg/interpreter.hpp"
#include "gsurg/kernels.hpp"

namespace gsurg {

std::string PassReport::to_string() const {
  std::ostringstream os;
  os << "pass " << pass << ": matched " << sites_matched << ", skipped "
     << sites_skipped();
  for (const SkippedSite& s : skipped) {
    os << "\n  skipped " << s.node << ": " << s.reason;
  }
  if (!nodes_removed.empty()) {
    os << "\n  removed:";
    for (const auto& n : nodes_removed) os << ' ' << n;
  }
  if (!nodes_added.empty()) {
    os << "\n  added:";
    for (const auto& n : nodes_added) os << ' ' << n;
  }
  if (!constants_added.empty()) {
    os << "\n  constants:";
    for (const auto& n : constants_added) os << ' ' << n;
  }
  if (!inputs_added.empty()) {
    os << "\n  new inputs:";
    for (const auto& n : inputs_added) os << ' ' << n;
  }
  return os.str();
}

Tensor build_identity_pad_filter(int64_t c_in, int64_t pad_before,
                                 int64_t pad_after) {
  if (c_in < 1) throw DomainError("identity pad filter needs c_in >= 1");
  if (pad_before < 0 || pad_after < 0) {
    throw DomainError("identity pad filter needs non-negative padding");
  }
  const int64_t c_out = pad_before + c_in + pad_after;
  Tensor filter = Tensor::zeros(DType::kF32, {1, 1, c_in, c_out});
  auto data = filter.f32_data();
  for (int64_t i = 0; i < c_in; ++i) {
    data[static_cast<size_t>(i * c_out + pad_before + i)] = 1.0f;
  }
  return filter;
}

namespace {

// Collision-free name in the union of edge and node namespaces.
class NameAllocator {
 public:
  explicit NameAllocator(const Graph& g) {
    for (const ValueInfo& vi : g.inputs) used_.insert(vi.name);
    for (const auto& [name, t] : g.constants) used_.insert(name);
    for (const Node& n : g.nodes) {
      used_.insert(n.name);
      used_.insert(n.outputs.begin(), n.outputs.end());
    }
  }

  std::string fresh(const std::string& base) {
    std::string name = base;
    for (int i = 2; !used_.insert(name).second; ++i) {
      name = base + "_" + std::to_string(i);
    }
    return name;
  }

 private:
  std::set<std::string> used_;
};

struct PadSite {
  const Node* node = nullptr;
  std::string data_edge;
  std::string out_edge;
  int64_t pad_before = 0;
  int64_t pad_after = 0;
  std::vector<int64_t> in_shape;
};

// Applicability rule shared by both pad rewrites: CONSTANT zero padding on
// the channel (last) axis of a rank-4 NHWC F32 edge, nothing on other axes.
std::optional<std::string> classify_pad_site(
    const Node& n, const std::map<std::string, ValueInfo>& infos,
    PadSite* site) {
  const auto& attrs = std::get<PadAttrs>(n.attrs);
  const ValueInfo& in = infos.at(n.inputs[0]);
  const size_t rank = in.shape.size();
  for (size_t i = 0; i + 1 < rank; ++i) {
    if (attrs.paddings[i][0] != 0 || attrs.paddings[i][1] != 0) {
      return "non-channel padding";
    }
  }
  if (attrs.constant_value != 0.0f) return "nonzero constant value";
  if (rank != 4) return "input not rank-4 NHWC";
  if (in.dtype != DType::kF32) return "non-F32 input";
  site->node = &n;
  site->data_edge = n.inputs[0];
  site->out_edge = n.outputs[0];
  site->pad_before = attrs.paddings[rank - 1][0];
  site->pad_after = attrs.paddings[rank - 1][1];
  site->in_shape = in.shape;
  return std::nullopt;
}

std::vector<PadSite> collect_pad_sites(const Graph& g, PassReport& report) {
  const auto infos = infer_shapes(g);
  std::vector<PadSite> sites;
  for (const Node& n : g.nodes) {
    if (n.op != OpKind::kPad) continue;
    PadSite site;
    if (auto reason = classify_pad_site(n, infos, &site)) {
      report.skipped.push_back({n.name, *reason});
    } else {
      sites.push_back(std::move(site));
    }
  }
  return sites;
}

bool is_graph_output(const Graph& g, const std::string& edge) {
  return std::find(g.outputs.begin(), g.outputs.end(), edge) != g.outputs.end();
}

// Chained no-op pads produce rename chains (z->y, y->x); rewire applies
// renames in a single step, so collapse them here.
void compress_renames(std::map<std::string, std::string>& renames) {
  for (auto& [from, to] : renames) {
    auto it = renames.find(to);
    while (it != renames.end()) {
      to = it->second;
      it = renames.find(to);
    }
  }
}

// Removes a no-op Pad. Consumers are re-pointed at the pad input; if the pad
// output is itself a graph output its name must survive, so a Reshape alias
// keeps the edge alive instead.
void plan_empty_pad_removal(const Graph& g, const PadSite& site,
                            NameAllocator& names, PassReport& report,
                            std::vector<std::string>& remove,
                            std::vector<Node>& add,
                            std::map<std::string, std::string>& renames) {
  remove.push_back(site.node->name);
  report.nodes_removed.push_back(site.node->name);
  if (is_graph_output(g, site.out_edge)) {
    Node alias;
    alias.name = names.fresh(site.node->name + "/alias");
    alias.op = OpKind::kReshape;
    alias.inputs = {site.data_edge};
    alias.outputs = {site.out_edge};
    alias.attrs = ReshapeAttrs{site.in_shape};
    add.push_back(alias);
    report.nodes_added.push_back(alias.name);
  } else {
    renames[site.out_edge] = site.data_edge;
  }
}

}  // namespace

PassResult pad_to_conv2d(const Graph& g) {
  PassReport report;
  report.pass = "pad_to_conv2d";
  const auto sites = collect_pad_sites(g, report);

  NameAllocator names(g);
  std::vector<std::string> remove;
  std::vector<Node> add;
  std::map<std::string, Tensor> constants;
  std::map<std::string, std::string> renames;
  for (const PadSite& site : sites) {
    const int64_t c_in = site.in_shape[3];
    const std::string filter_name =
        names.fresh(site.node->name + "/pad_filter");
    constants.emplace(filter_name, build_identity_pad_filter(
                                       c_in, site.pad_before, site.pad_after));
    Node conv;
    conv.name = names.fresh(site.node->name + "/as_conv");
    conv.op = OpKind::kConv2D;
    conv.inputs = {site.data_edge, filter_name};
    conv.outputs = {site.out_edge};
    conv.attrs = Conv2DAttrs{1, 1, PaddingScheme::kValid};
    add.push_back(conv);
    remove.push_back(site.node->name);
    report.nodes_removed.push_back(site.node->name);
    report.nodes_added.push_back(conv.name);
    report.constants_added.push_back(filter_name);
    ++report.sites_matched;
  }
  Graph out = remove.empty() ? g : rewire_replace(g, remove, add, constants, renames);
  return {std::move(out), std::move(report)};
}

PassResult pad_to_concat(const Graph& g, ZerosAs zeros_as) {
  PassReport report;
  report.pass = "pad_to_concat";
  const auto sites = collect_pad_sites(g, report);

  Graph working = g;  // graph-input mode appends to the signature first
  NameAllocator names(g);
  std::vector<std::string> remove;
  std::vector<Node> add;
  std::map<std::string, Tensor> constants;
  std::map<std::string, std::string> renames;

  for (const PadSite& site : sites) {
    ++report.sites_matched;
    if (site.pad_before == 0 && site.pad_after == 0) {
      plan_empty_pad_removal(g, site, names, report, remove, add, renames);
      continue;
    }
    auto zero_edge = [&](int64_t channels, const char* tag) {
      std::vector<int64_t> shape = site.in_shape;
      shape[3] = channels;
      const std::string name = names.fresh(site.node->name + "/zeros_" + tag);
      if (zeros_as == ZerosAs::kConstant) {
        constants.emplace(name, Tensor::zeros(DType::kF32, shape));
        report.constants_added.push_back(name);
      } else {
        working.inputs.push_back(ValueInfo{name, DType::kF32, shape});
        report.inputs_added.push_back(name);
      }
      return name;
    };
    Node cat;
    cat.name = names.fresh(site.node->name + "/as_concat");
    cat.op = OpKind::kConcat;
    if (site.pad_before > 0) {
      cat.inputs.push_back(zero_edge(site.pad_before, "before"));
    }
    cat.inputs.push_back(site.data_edge);
    if (site.pad_after > 0) {
      cat.inputs.push_back(zero_edge(site.pad_after, "after"));
    }
    cat.outputs = {site.out_edge};
    cat.attrs = ConcatAttrs{3};
    // a one-sided pad leaves a single zero tensor; Concat still needs two
    // inputs, which it has (zeros + data)
    add.push_back(cat);
    remove.push_back(site.node->name);
    report.nodes_removed.push_back(site.node->name);
    report.nodes_added.push_back(cat.name);
  }
  compress_renames(renames);
  Graph out = remove.empty()
                  ? g
                  : rewire_replace(working, remove, add, constants, renames);
  return {std::move(out), std::move(report)};
}

PassResult eliminate_dequantize(const Graph& g) {
  PassReport report;
  report.pass = "eliminate_dequantize";

  std::vector<std::string> remove;
  std::map<std::string, Tensor> constants;
  for (const Node& n : g.nodes) {
    if (n.op != OpKind::kDequantize) continue;
    auto it = g.constants.find(n.inputs[0]);
    if (it == g.constants.end()) {
      report.skipped.push_back({n.name, "activation dequantize"});
      continue;
    }
    Tensor cast = cast_f16_to_f32(it->second);
    const auto vals = cast.f32_data();
    if (std::any_of(vals.begin(), vals.end(),
                    [](float v) { return std::isnan(v); })) {
      report.skipped.push_back({n.name, "constant contains NaN"});
      continue;
    }
    // the cast constant takes over the Dequantize output's edge name, so
    // consumers need no rewiring; the F16 original is pruned automatically
    constants.emplace(n.outputs[0], std::move(cast));
    remove.push_back(n.name);
    report.nodes_removed.push_back(n.name);
    report.constants_added.push_back(n.outputs[0]);
    ++report.sites_matched;
  }
  Graph out = remove.empty() ? g : rewire_replace(g, remove, {}, constants, {});
  return {std::move(out), std::move(report)};
}

SplitResult split_output_branches(const Graph& g,
                                  const std::string& output_name) {
  if (!is_graph_output(g, output_name)) {
    throw ApplicabilityError("'" + output_name + "' is not a graph output");
  }
  const Node* producer = g.producer_of(output_name);
  if (!producer || producer->op != OpKind::kConcat) {
    throw ApplicabilityError("output '" + output_name +
                             "' is not produced by a Concat node");
  }
  const auto infos = infer_shapes(g);
  const int64_t axis = std::get<ConcatAttrs>(producer->attrs).axis;

  PassReport report;
  report.pass = "split_output_branches";
  OutputMapping mapping;
  mapping.output = output_name;
  mapping.axis = axis;

  NameAllocator names(g);
  std::vector<Node> add;
  // Each branch goes out through a Reshape alias: that gives the new output
  // its "<name>#k" edge without renaming the branch edge, which may have
  // other consumers, be a graph input, or appear twice in the Concat.
  for (size_t k = 0; k < producer->inputs.size(); ++k) {
    const std::string& branch = producer->inputs[k];
    const ValueInfo& vi = infos.at(branch);
    const std::string out_name = output_name + "#" + std::to_string(k);
    Node alias;
    alias.name = names.fresh(out_name + "/alias");
    alias.op = OpKind::kReshape;
    alias.inputs = {branch};
    alias.outputs = {names.fresh(out_name)};
    alias.attrs = ReshapeAttrs{vi.shape};
    mapping.parts.emplace_back(alias.outputs[0], vi.shape[axis]);
    report.nodes_added.push_back(alias.name);
    add.push_back(std::move(alias));
  }
  report.nodes_removed.push_back(producer->name);
  report.sites_matched = 1;

  Graph working = g;
  std::vector<std::string> new_outputs;
  for (const std::string& out : working.outputs) {
    if (out == output_name) {
      // the split output's slot expands into the per-branch outputs, in order
      for (const auto& [name, extent] : mapping.parts) {
        new_outputs.push_back(name);
      }
    } else {
      new_outputs.push_back(out);
    }
  }
  working.outputs = std::move(new_outputs);
  Graph result = rewire_replace(working, {producer->name}, add, {}, {});
  return {std::move(result), std::move(report), std::move(mapping)};
}

PipelineResult apply_passes(const Graph& g, const std::vector<PassSpec>& passes) {
  PipelineResult result;
  result.graph = g;
  const ValidationReport initial = validate(g);
  if (!initial.ok()) {
    result.error = "input graph does not validate:\n" + initial.to_string();
    return result;
  }
  for (const PassSpec& spec : passes) {
    try {
      if (spec.name == "pad_to_conv2d") {
        PassResult r = pad_to_conv2d(result.graph);
        result.graph = std::move(r.graph);
        result.reports.push_back(std::move(r.report));
      } else if (spec.name == "pad_to_concat") {
        ZerosAs mode = ZerosAs::kConstant;
        auto it = spec.options.find("zeros_as");
        if (it != spec.options.end()) {
          if (it->second == "graph_input") {
            mode = ZerosAs::kGraphInput;
          } else if (it->second != "constant") {
            throw DomainError("pad_to_concat: unknown zeros_as '" + it->second +
                              "'");
          }
        }
        PassResult r = pad_to_concat(result.graph, mode);
        result.graph = std::move(r.graph);
        result.reports.push_back(std::move(r.report));
      } else if (spec.name == "eliminate_dequantize") {
        PassResult r = eliminate_dequantize(result.graph);
        result.graph = std::move(r.graph);
        result.reports.push_back(std::move(r.report));
      } else if (spec.name == "split_output_branches") {
        auto it = spec.options.find("output");
        if (it == spec.options.end()) {
          throw DomainError("split_output_branches: missing 'output' option");
        }
        SplitResult r = split_output_branches(result.graph, it->second);
        result.graph = std::move(r.graph);
        result.reports.push_back(std::move(r.report));
        result.mappings.push_back(std::move(r.mapping));
      } else {
        throw DomainError("unknown pass '" + spec.name + "'");
      }
    } catch (const Error& e) {
      result.error = std::string("pass ") + spec.name + " failed: " + e.what();
      return result;
    }
  }
  return result;
}

bool EquivalenceReport::bit_exact_all() const {
  return std::all_of(outputs.begin(), outputs.end(),
                     [](const PerOutput& o) { return o.bit_exact; });
}

double EquivalenceReport::max_abs_diff_all() const {
  double m = 0.0;
  for (const PerOutput& o : outputs) m = std::max(m, o.max_abs_diff);
  return m;
}

bool EquivalenceReport::passed() const {
  return std::all_of(outputs.begin(), outputs.end(), [&](const PerOutput& o) {
    return o.max_abs_diff <= tolerance;
  });
}

std::string EquivalenceReport::to_string() const {
  std::ostringstream os;
  os << "samples " << samples << ", seed " << seed;
  for (const PerOutput& o : outputs) {
    os << "\n  " << o.name << ": max_abs_diff " << o.max_abs_diff
       << (o.bit_exact ? " (bit-exact)" : "");
  }
  return os.str();
}

namespace {

double tensor_max_abs_diff(const Tensor& a, const Tensor& b) {
  const auto av = a.f32_data();
  const auto bv = b.f32_data();
  double m = 0.0;
  for (size_t i = 0; i < av.size(); ++i) {
    const double x = av[i], y = bv[i];
    if (std::isnan(x) && std::isnan(y)) continue;
    if (std::isnan(x) || std::isnan(y)) {
      return std::numeric_limits<double>::infinity();
    }
    m = std::max(m, std::abs(x - y));
  }
  return m;
}

bool tensor_bits_equal(const Tensor& a, const Tensor& b) {
  return a.dtype() == b.dtype() && a.shape() == b.shape() &&
         (a.byte_size() == 0 ||
          std::memcmp(a.raw(), b.raw(), a.byte_size()) == 0);
}

}  // namespace

EquivalenceReport verify_equivalence(const Graph& before, const Graph& after,
                                     int n_samples, uint64_t seed,
                                     double tolerance,
                                     const std::vector<OutputMapping>& mappings) {
  if (n_samples < 1) throw DomainError("verify_equivalence: n_samples < 1");

  // every before-input must exist unchanged in after
  std::map<std::string, const ValueInfo*> after_inputs;
  for (const ValueInfo& vi : after.inputs) after_inputs[vi.name] = &vi;
  for (const ValueInfo& vi : before.inputs) {
    auto it = after_inputs.find(vi.name);
    if (it == after_inputs.end() || it->second->dtype != vi.dtype ||
        it->second->shape != vi.shape) {
      throw VerificationError("graphs disagree on input '" + vi.name + "'");
    }
    after_inputs.erase(it);
  }
  // surplus after-inputs are auto-fed zeros (pad_to_concat graph-input mode)
  std::vector<ValueInfo> zero_inputs;
  for (const auto& [name, vi] : after_inputs) zero_inputs.push_back(*vi);

  std::map<std::string, const OutputMapping*> mapped;
  for (const OutputMapping& m : mappings) mapped[m.output] = &m;

  std::set<std::string> after_outputs(after.outputs.begin(), after.outputs.end());
  for (const std::string& out : before.outputs) {
    auto it = mapped.find(out);
    if (it != mapped.end()) {
      for (const auto& [part, extent] : it->second->parts) {
        if (!after_outputs.erase(part)) {
          throw VerificationError("mapping part '" + part +
                                  "' is not an output of the second graph");
        }
      }
    } else if (!after_outputs.erase(out)) {
      throw VerificationError("output '" + out +
                              "' is missing from the second graph");
    }
  }
  if (!after_outputs.empty()) {
    throw VerificationError("second graph has unmatched output '" +
                            *after_outputs.begin() + "'");
  }

  EquivalenceReport report;
  report.samples = n_samples;
  report.seed = seed;
  report.tolerance = tolerance;
  std::map<std::string, EquivalenceReport::PerOutput> acc;
  for (const std::string& out : before.outputs) {
    acc[out] = {out, 0.0, true};
  }

  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    FeedMap feeds = random_feeds(before.inputs, rng);
    FeedMap after_feeds = feeds;
    for (const ValueInfo& vi : zero_inputs) {
      after_feeds.emplace(vi.name, Tensor::zeros(vi.dtype, vi.shape));
    }
    const OutputMap ref = run(before, feeds);
    const OutputMap got = run(after, after_feeds);
    for (const std::string& out : before.outputs) {
      const Tensor& expected = ref.at(out);
      Tensor actual;
      auto it = mapped.find(out);
      if (it != mapped.end()) {
        std::vector<Tensor> parts;
        std::vector<const Tensor*> part_ptrs;
        for (const auto& [part, extent] : it->second->parts) {
          parts.push_back(got.at(part));
        }
        for (const Tensor& t : parts) part_ptrs.push_back(&t);
        actual = kernels::concat(part_ptrs, it->second->axis);
      } else {
        actual = got.at(out);
      }
      if (expected.shape() != actual.shape() ||
          expected.dtype() != actual.dtype()) {
        throw VerificationError("output '" + out + "' shape/dtype mismatch: " +
                                shape_to_string(expected.shape()) + " vs " +
                                shape_to_string(actual.shape()));
      }
      auto& entry = acc[out];
      entry.max_abs_diff =
          std::max(entry.max_abs_diff, tensor_max_abs_diff(expected, actual));
      entry.bit_exact = entry.bit_exact && tensor_bits_equal(expected, actual);
    }
  }
  for (const std::string& out : before.outputs) {
    report.outputs.push_back(acc[out]);
  }
  return report;
}

}  // namespace gsurg
