//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gsurg {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

json parse_json(const std::string& text, const std::string& where) {
  if (text.empty()) parse_fail(where, "empty document");
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(where, e.what());
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) parse_fail(where, std::string("missing field '") + key + "'");
  return *it;
}

void check_version(const json& j, const std::string& where) {
  const json& v = require(j, "version", where);
  if (!v.is_number_integer() || v.get<int>() != 1) {
    parse_fail(where, "unsupported version (expected 1)");
  }
}

std::vector<int64_t> read_shape(const json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where, "shape must be an array");
  std::vector<int64_t> shape;
  for (const auto& d : j) {
    if (!d.is_number_integer() || d.get<int64_t>() < 0) {
      parse_fail(where, "shape dims must be non-negative integers");
    }
    shape.push_back(d.get<int64_t>());
  }
  return shape;
}

DType read_dtype(const json& j, const std::string& where) {
  if (!j.is_string()) parse_fail(where, "dtype must be a string");
  auto dt = dtype_from_name(j.get<std::string>());
  if (!dt) parse_fail(where, "unknown dtype '" + j.get<std::string>() + "'");
  return *dt;
}

json tensor_data_to_json(const Tensor& t, const std::string& where) {
  json data = json::array();
  switch (t.dtype()) {
    case DType::kF32:
      for (float v : t.f32_data()) {
        if (!std::isfinite(v)) {
          parse_fail(where, "non-finite F32 value cannot be serialized");
        }
        data.push_back(v);
      }
      break;
    case DType::kF16:
      for (uint16_t v : t.f16_data()) data.push_back(v);
      break;
    case DType::kI8:
      for (int8_t v : t.i8_data()) data.push_back(static_cast<int>(v));
      break;
    case DType::kI32:
      for (int32_t v : t.i32_data()) data.push_back(v);
      break;
  }
  return data;
}

Tensor tensor_from_json(DType dtype, std::vector<int64_t> shape,
                        const json& data, const std::string& where) {
  if (!data.is_array()) parse_fail(where, "data must be an array");
  const size_t n = data.size();
  switch (dtype) {
    case DType::kF32: {
      std::vector<float> v;
      v.reserve(n);
      for (const auto& e : data) {
        if (!e.is_number()) parse_fail(where, "F32 data must be numbers");
        v.push_back(static_cast<float>(e.get<double>()));
      }
      return Tensor::f32(std::move(shape), std::move(v));
    }
    case DType::kF16: {
      std::vector<uint16_t> v;
      v.reserve(n);
      for (const auto& e : data) {
        if (!e.is_number_unsigned() && !e.is_number_integer()) {
          parse_fail(where, "F16 data must be 16-bit unsigned bit patterns");
        }
        const int64_t b = e.get<int64_t>();
        if (b < 0 || b > 0xffff) {
          parse_fail(where, "F16 bit pattern out of range");
        }
        v.push_back(static_cast<uint16_t>(b));
      }
      return Tensor::f16(std::move(shape), std::move(v));
    }
    case DType::kI8: {
      std::vector<int8_t> v;
      v.reserve(n);
      for (const auto& e : data) {
        if (!e.is_number_integer()) parse_fail(where, "I8 data must be integers");
        const int64_t b = e.get<int64_t>();
        if (b < -128 || b > 127) parse_fail(where, "I8 value out of range");
        v.push_back(static_cast<int8_t>(b));
      }
      return Tensor::i8(std::move(shape), std::move(v));
    }
    case DType::kI32: {
      std::vector<int32_t> v;
      v.reserve(n);
      for (const auto& e : data) {
        if (!e.is_number_integer()) parse_fail(where, "I32 data must be integers");
        v.push_back(static_cast<int32_t>(e.get<int64_t>()));
      }
      return Tensor::i32(std::move(shape), std::move(v));
    }
  }
  parse_fail(where, "unknown dtype");
}

json tensor_to_json(const std::string& name, const Tensor& t,
                    const std::string& where) {
  json j;
  j["name"] = name;
  j["dtype"] = dtype_name(t.dtype());
  j["shape"] = t.shape();
  j["data"] = tensor_data_to_json(t, where);
  return j;
}

std::pair<std::string, Tensor> tensor_from_json_entry(const json& j,
                                                      const std::string& where) {
  const std::string name = require(j, "name", where).get<std::string>();
  const DType dtype = read_dtype(require(j, "dtype", where), where);
  auto shape = read_shape(require(j, "shape", where), where + " '" + name + "'");
  try {
    Tensor t = tensor_from_json(dtype, std::move(shape),
                                require(j, "data", where),
                                where + " '" + name + "'");
    return {name, std::move(t)};
  } catch (const DomainError& e) {
    parse_fail(where + " '" + name + "'", e.what());
  }
}

json attrs_to_json(const Node& n) {
  json j = json::object();
  switch (n.op) {
    case OpKind::kConv2D: {
      const auto& a = std::get<Conv2DAttrs>(n.attrs);
      j["strides"] = {a.stride_h, a.stride_w};
      j["padding"] = a.padding == PaddingScheme::kValid ? "VALID" : "SAME";
      break;
    }
    case OpKind::kPad: {
      const auto& a = std::get<PadAttrs>(n.attrs);
      json pads = json::array();
      for (const auto& p : a.paddings) pads.push_back({p[0], p[1]});
      j["paddings"] = pads;
      j["mode"] = "CONSTANT";
      j["constant_value"] = a.constant_value;
      break;
    }
    case OpKind::kConcat:
      j["axis"] = std::get<ConcatAttrs>(n.attrs).axis;
      break;
    case OpKind::kReshape:
      j["new_shape"] = std::get<ReshapeAttrs>(n.attrs).new_shape;
      break;
    default: break;
  }
  return j;
}

NodeAttrs attrs_from_json(OpKind op, const json& j, const std::string& where) {
  switch (op) {
    case OpKind::kConv2D: {
      Conv2DAttrs a;
      const json& strides = require(j, "strides", where);
      if (!strides.is_array() || strides.size() != 2) {
        parse_fail(where, "strides must be [sh, sw]");
      }
      a.stride_h = strides[0].get<int64_t>();
      a.stride_w = strides[1].get<int64_t>();
      const std::string padding = require(j, "padding", where).get<std::string>();
      if (padding == "VALID") {
        a.padding = PaddingScheme::kValid;
      } else if (padding == "SAME") {
        a.padding = PaddingScheme::kSame;
      } else {
        parse_fail(where, "padding must be VALID or SAME");
      }
      return a;
    }
    case OpKind::kPad: {
      PadAttrs a;
      const json& pads = require(j, "paddings", where);
      if (!pads.is_array()) parse_fail(where, "paddings must be an array");
      for (const auto& p : pads) {
        if (!p.is_array() || p.size() != 2) {
          parse_fail(where, "padding entries must be [before, after]");
        }
        a.paddings.push_back({p[0].get<int64_t>(), p[1].get<int64_t>()});
      }
      if (j.contains("mode") && j["mode"].get<std::string>() != "CONSTANT") {
        parse_fail(where, "only CONSTANT pad mode exists");
      }
      if (j.contains("constant_value")) {
        a.constant_value = static_cast<float>(j["constant_value"].get<double>());
      }
      return a;
    }
    case OpKind::kConcat: {
      ConcatAttrs a;
      a.axis = require(j, "axis", where).get<int64_t>();
      return a;
    }
    case OpKind::kReshape: {
      ReshapeAttrs a;
      a.new_shape = read_shape(require(j, "new_shape", where), where);
      return a;
    }
    default:
      return std::monostate{};
  }
}

}  // namespace

std::string graph_to_text(const Graph& g) {
  const ValidationReport report = validate(g);
  if (!report.ok()) {
    throw DomainError("cannot serialize an invalid graph:\n" + report.to_string());
  }
  json j;
  j["version"] = 1;
  j["name"] = g.name;
  json inputs = json::array();
  for (const ValueInfo& vi : g.inputs) {
    json e;
    e["name"] = vi.name;
    e["dtype"] = dtype_name(vi.dtype);
    e["shape"] = vi.shape;
    inputs.push_back(std::move(e));
  }
  j["inputs"] = std::move(inputs);
  j["outputs"] = g.outputs;
  json constants = json::array();
  for (const auto& [name, t] : g.constants) {  // std::map: sorted by name
    constants.push_back(tensor_to_json(name, t, "constant"));
  }
  j["constants"] = std::move(constants);
  json nodes = json::array();
  for (const std::string& name : topo_order(g)) {
    const Node* n = g.find_node(name);
    json e;
    e["name"] = n->name;
    e["op"] = op_name(n->op);
    e["inputs"] = n->inputs;
    e["outputs"] = n->outputs;
    e["attrs"] = attrs_to_json(*n);
    nodes.push_back(std::move(e));
  }
  j["nodes"] = std::move(nodes);
  return j.dump(2) + "\n";
}

Graph graph_from_text(const std::string& text, const std::string& source_name) {
  const json j = parse_json(text, source_name);
  check_version(j, source_name);
  Graph g;
  g.name = require(j, "name", source_name).get<std::string>();
  for (const auto& e : require(j, "inputs", source_name)) {
    const std::string where = source_name + ": inputs";
    ValueInfo vi;
    vi.name = require(e, "name", where).get<std::string>();
    vi.dtype = read_dtype(require(e, "dtype", where), where);
    vi.shape = read_shape(require(e, "shape", where), where + " '" + vi.name + "'");
    g.inputs.push_back(std::move(vi));
  }
  for (const auto& e : require(j, "outputs", source_name)) {
    g.outputs.push_back(e.get<std::string>());
  }
  for (const auto& e : require(j, "constants", source_name)) {
    auto [name, t] = tensor_from_json_entry(e, source_name + ": constant");
    g.constants.emplace(std::move(name), std::move(t));
  }
  for (const auto& e : require(j, "nodes", source_name)) {
    const std::string where = source_name + ": node";
    Node n;
    n.name = require(e, "name", where).get<std::string>();
    const std::string opname = require(e, "op", where).get<std::string>();
    auto op = op_from_name(opname);
    if (!op) parse_fail(where + " '" + n.name + "'", "unknown op '" + opname + "'");
    n.op = *op;
    for (const auto& in : require(e, "inputs", where)) {
      n.inputs.push_back(in.get<std::string>());
    }
    for (const auto& out : require(e, "outputs", where)) {
      n.outputs.push_back(out.get<std::string>());
    }
    n.attrs = attrs_from_json(n.op, require(e, "attrs", where),
                              where + " '" + n.name + "'");
    g.nodes.push_back(std::move(n));
  }
  const ValidationReport report = validate(g);
  if (!report.ok()) {
    parse_fail(source_name, "graph does not validate:\n" + report.to_string());
  }
  return g;
}

std::string tensor_data_text(const Tensor& t) {
  return tensor_data_to_json(t, "tensor").dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << content;
  if (!out) throw Error(path + ": write failed");
}

Graph load_graph(const std::string& path) {
  return graph_from_text(read_file(path), path);
}

void save_graph(const Graph& g, const std::string& path) {
  write_file(path, graph_to_text(g));
}

std::vector<FeedMap> load_feeds(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  check_version(j, path);
  std::vector<FeedMap> samples;
  for (const auto& sample : require(j, "samples", path)) {
    FeedMap feeds;
    for (const auto& e : sample) {
      auto [name, t] = tensor_from_json_entry(e, path + ": feed");
      feeds.emplace(std::move(name), std::move(t));
    }
    samples.push_back(std::move(feeds));
  }
  if (samples.empty()) parse_fail(path, "no samples");
  return samples;
}

void save_feeds(const std::vector<FeedMap>& samples, const std::string& path) {
  json j;
  j["version"] = 1;
  json out = json::array();
  for (const FeedMap& feeds : samples) {
    json sample = json::array();
    for (const auto& [name, t] : feeds) {
      sample.push_back(tensor_to_json(name, t, "feed"));
    }
    out.push_back(std::move(sample));
  }
  j["samples"] = std::move(out);
  write_file(path, j.dump(2) + "\n");
}

std::vector<PassSpec> load_pass_specs(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  check_version(j, path);
  std::vector<PassSpec> specs;
  for (const auto& e : require(j, "passes", path)) {
    PassSpec spec;
    spec.name = require(e, "pass", path + ": passes").get<std::string>();
    if (e.contains("options")) {
      for (const auto& [k, v] : e["options"].items()) {
        spec.options[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

DeviceProfile load_profile(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  check_version(j, path);
  DeviceProfile p;
  p.name = require(j, "name", path).get<std::string>();
  for (const auto& [opname, rule] : require(j, "supported", path).items()) {
    auto op = op_from_name(opname);
    if (!op) parse_fail(path, "unknown op '" + opname + "' in supported rules");
    auto r = support_rule_from_name(rule.get<std::string>());
    if (!r) {
      parse_fail(path, "unknown support rule '" + rule.get<std::string>() + "'");
    }
    p.rules[*op] = *r;
  }
  p.accel_throughput =
      require(j, "accel_throughput_macs_per_ms", path).get<double>();
  p.cpu_throughput = require(j, "cpu_throughput_macs_per_ms", path).get<double>();
  p.transfer_bandwidth =
      require(j, "transfer_bandwidth_bytes_per_ms", path).get<double>();
  p.transfer_overhead = require(j, "transfer_overhead_ms", path).get<double>();
  try {
    p.check();
  } catch (const DomainError& e) {
    parse_fail(path, e.what());
  }
  return p;
}

void save_profile(const DeviceProfile& p, const std::string& path) {
  json j;
  j["version"] = 1;
  j["name"] = p.name;
  json rules = json::object();
  for (const auto& [op, rule] : p.rules) {  // OpKind order is fixed
    rules[op_name(op)] = support_rule_name(rule);
  }
  j["supported"] = std::move(rules);
  j["accel_throughput_macs_per_ms"] = p.accel_throughput;
  j["cpu_throughput_macs_per_ms"] = p.cpu_throughput;
  j["transfer_bandwidth_bytes_per_ms"] = p.transfer_bandwidth;
  j["transfer_overhead_ms"] = p.transfer_overhead;
  write_file(path, j.dump(2) + "\n");
}

void save_calibration(const CalibrationResult& c, const std::string& path) {
  json j;
  j["version"] = 1;
  j["samples"] = c.samples;
  json ranges = json::object();
  for (const auto& [edge, range] : c.ranges) {  // std::map: sorted keys
    ranges[edge] = {range.first, range.second};
  }
  j["ranges"] = std::move(ranges);
  write_file(path, j.dump(2) + "\n");
}

CalibrationResult load_calibration(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  check_version(j, path);
  CalibrationResult c;
  c.samples = require(j, "samples", path).get<int>();
  for (const auto& [edge, range] : require(j, "ranges", path).items()) {
    if (!range.is_array() || range.size() != 2) {
      parse_fail(path, "range for '" + edge + "' must be [min, max]");
    }
    c.ranges[edge] = {range[0].get<double>(), range[1].get<double>()};
  }
  return c;
}

void save_mappings(const std::vector<OutputMapping>& ms, const std::string& path) {
  json j;
  j["version"] = 1;
  json mappings = json::array();
  for (const OutputMapping& m : ms) {
    json e;
    e["output"] = m.output;
    e["axis"] = m.axis;
    json parts = json::array();
    for (const auto& [name, extent] : m.parts) {
      json p;
      p["name"] = name;
      p["extent"] = extent;
      parts.push_back(std::move(p));
    }
    e["parts"] = std::move(parts);
    mappings.push_back(std::move(e));
  }
  j["mappings"] = std::move(mappings);
  write_file(path, j.dump(2) + "\n");
}

std::vector<OutputMapping> load_mappings(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  check_version(j, path);
  std::vector<OutputMapping> ms;
  for (const auto& e : require(j, "mappings", path)) {
    OutputMapping m;
    m.output = require(e, "output", path).get<std::string>();
    m.axis = require(e, "axis", path).get<int64_t>();
    for (const auto& p : require(e, "parts", path)) {
      m.parts.emplace_back(require(p, "name", path).get<std::string>(),
                           require(p, "extent", path).get<int64_t>());
    }
    ms.push_back(std::move(m));
  }
  return ms;
}

std::vector<std::pair<std::string, double>> load_stage_times(
    const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::pair<std::string, double>> stages;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto colon = line.rfind(':');
    if (colon == std::string::npos) {
      parse_fail(path + ":" + std::to_string(lineno),
                 "expected 'name: milliseconds'");
    }
    std::string name = line.substr(0, colon);
    const auto name_end = name.find_last_not_of(" \t");
    name = name.substr(first, name_end - first + 1);
    if (name.empty()) {
      parse_fail(path + ":" + std::to_string(lineno), "empty stage name");
    }
    try {
      size_t used = 0;
      const std::string value = line.substr(colon + 1);
      const double ms = std::stod(value, &used);
      if (value.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw std::invalid_argument("trailing characters");
      }
      stages.emplace_back(name, ms);
    } catch (const std::exception&) {
      parse_fail(path + ":" + std::to_string(lineno),
                 "bad milliseconds value in '" + line + "'");
    }
  }
  if (stages.empty()) parse_fail(path, "no stages found");
  return stages;
}

}  // namespace gsurg
