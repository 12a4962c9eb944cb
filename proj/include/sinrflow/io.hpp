#pragma once

// On-disk formats. Instances and results are JSON documents with a fixed
// schema; unknown keys are rejected and parse errors carry line/column.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "sinrflow/flow.hpp"
#include "sinrflow/model.hpp"
#include "sinrflow/pipeline.hpp"
#include "sinrflow/schedule.hpp"

namespace sinrflow {

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class PowerMode { given, linear, uniform, limited };

inline const char* to_string(PowerMode m) {
  switch (m) {
    case PowerMode::given: return "given";
    case PowerMode::linear: return "linear";
    case PowerMode::uniform: return "uniform";
    case PowerMode::limited: return "limited";
  }
  return "?";
}

inline std::optional<PowerMode> parse_power_mode(const std::string& s) {
  if (s == "given") return PowerMode::given;
  if (s == "linear") return PowerMode::linear;
  if (s == "uniform") return PowerMode::uniform;
  if (s == "limited") return PowerMode::limited;
  return std::nullopt;
}

inline std::optional<Objective> parse_objective(const std::string& s) {
  if (s == "maxth") return Objective::max_throughput;
  if (s == "maxmin") return Objective::max_min;
  return std::nullopt;
}

struct LinkSpec {
  int id;
  int tx;
  int rx;
  std::optional<double> power;  // given mode only

  bool operator==(const LinkSpec&) const = default;
};

struct InstanceFile {
  RadioParams params{2.0, 1.0, 1.0, 0.5};
  PowerMode power_mode = PowerMode::given;
  // linear: P_e = c d_e^alpha; uniform: P_e = c. Defaults to 1.
  std::optional<double> power_constant;
  std::optional<PowerRange> power_range;  // limited only
  std::vector<Node> nodes;
  std::vector<LinkSpec> links;
  std::vector<Request> requests;

  bool operator==(const InstanceFile&) const = default;
};

// Builds the Instance the file describes. In limited mode link powers are
// placeholders (Pmin); the power range drives the expansion.
inline Instance to_instance(const InstanceFile& file) {
  std::map<int, const Node*> by_id;
  for (const Node& v : file.nodes) by_id[v.id] = &v;
  const double c = file.power_constant.value_or(1.0);
  std::vector<Link> links;
  for (const LinkSpec& l : file.links) {
    double power = 0.0;
    switch (file.power_mode) {
      case PowerMode::given: power = *l.power; break;
      case PowerMode::uniform: power = c; break;
      case PowerMode::limited: power = file.power_range->min; break;
      case PowerMode::linear: {
        auto a = by_id.find(l.tx), b = by_id.find(l.rx);
        if (a == by_id.end() || b == by_id.end())
          throw InvalidInstance("link " + std::to_string(l.id) + " references an unknown node");
        power = c * std::pow(distance(*a->second, *b->second), file.params.alpha);
        break;
      }
    }
    links.push_back(Link{l.id, l.tx, l.rx, power});
  }
  return Instance(file.params, file.nodes, std::move(links), file.requests);
}

struct ResultDiagnostics {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double lp_optimum = 0.0;
  double lp_flow = 0.0;
  double pruned_flow = 0.0;
  std::size_t colors = 0;
  std::size_t sigma = 0;
  std::size_t max_parts = 0;
  double scale = 0.0;
  std::size_t emergency_bins = 0;
  std::size_t power_levels = 0;
  std::vector<int> dropped_links;
  std::optional<double> runtime_seconds;

  bool operator==(const ResultDiagnostics&) const = default;
};

struct ResultFile {
  Objective objective = Objective::max_throughput;
  double throughput = 0.0;
  std::size_t period = 0;
  std::vector<std::vector<int>> slots;  // link ids
  std::vector<Link> links;              // scheduled links with their powers
  std::vector<std::map<int, double>> flow;  // per commodity, nonzero entries by link id
  ResultDiagnostics diagnostics;

  bool operator==(const ResultFile&) const = default;
};

inline ResultFile to_result_file(const SolveResult& r) {
  const Instance& inst = r.instance;
  ResultFile out;
  out.objective = r.objective;
  out.throughput = r.throughput;
  out.period = r.schedule.period();
  for (const LinkSet& slot : r.schedule.slots) {
    std::vector<int> ids;
    for (std::size_t e : slot) ids.push_back(inst.link(e).id);
    std::sort(ids.begin(), ids.end());
    out.slots.push_back(std::move(ids));
  }
  out.links = inst.links();
  for (const CommodityFlow& c : r.flow.commodities) {
    std::map<int, double> values;
    for (std::size_t e = 0; e < inst.m(); ++e)
      if (c.values[e] != 0.0) values[inst.link(e).id] = c.values[e];
    out.flow.push_back(std::move(values));
  }
  const Diagnostics& d = r.diagnostics;
  out.diagnostics = ResultDiagnostics{inst.n(),     inst.m(),        inst.k(),         d.lp_optimum,
                                      d.lp_flow,    d.pruned_flow,   d.colors,         d.sigma,
                                      d.max_parts,  d.scale,         d.emergency_bins, d.power_levels,
                                      d.dropped_links, std::nullopt};
  return out;
}

// The scheduled instance: the file's params, nodes and requests with the
// result's links.
inline Instance scheduled_instance(const InstanceFile& file, const ResultFile& result) {
  return Instance(file.params, file.nodes, result.links, file.requests);
}

inline Schedule to_schedule(const Instance& inst, const ResultFile& result) {
  Schedule s;
  for (const auto& slot : result.slots) {
    LinkSet links;
    for (int id : slot) links.push_back(inst.link_index(id));
    s.slots.push_back(std::move(links));
  }
  return s;
}

inline MultiCommodityFlow to_flow(const Instance& inst, const ResultFile& result) {
  if (result.flow.size() != inst.k()) throw FormatError("result flow has the wrong number of commodities");
  MultiCommodityFlow f = MultiCommodityFlow::zero(inst);
  for (std::size_t i = 0; i < inst.k(); ++i)
    for (const auto& [id, v] : result.flow[i]) f.commodities[i].values[inst.link_index(id)] = v;
  return f;
}

namespace detail {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

inline std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("malformed JSON at " + position(text, e.byte) + ": " + e.what());
  }
}

// Strict field access with the JSON path in every message.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [key, _] : node_.items()) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) throw FormatError(path_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return node_.contains(key); }

  const json& at(const char* key) const {
    if (!node_.contains(key)) fail(std::string("missing key '") + key + "'");
    return node_.at(key);
  }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
    return v.get<double>();
  }

  int integer(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
    return v.get<int>();
  }

  std::size_t count(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_unsigned()) fail(std::string("'") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
  }

  std::string text(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }

  const json& array(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(std::string("'") + key + "' must be an array");
    return v;
  }

  Reader object(const char* key) const { return Reader(at(key), path_ + "." + key); }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(path_ + ": " + what); }

 private:
  const json& node_;
  std::string path_;
};

inline std::string element(const std::string& path, const char* key, std::size_t i) {
  return path + "." + key + "[" + std::to_string(i) + "]";
}

}  // namespace detail

inline InstanceFile parse_instance(const std::string& text) {
  using detail::Reader;
  const auto doc = detail::parse_json(text);
  const Reader root(doc, "$");
  root.allow({"params", "power_mode", "power_constant", "power_range", "nodes", "links", "requests"});

  const Reader pr = root.object("params");
  pr.allow({"alpha", "beta", "noise", "epsilon"});
  InstanceFile f;
  try {
    f.params = RadioParams(pr.number("alpha"), pr.number("beta"), pr.number("noise"), pr.number("epsilon"));
  } catch (const InvalidInstance& e) {
    throw FormatError(std::string("$.params: ") + e.what());
  }

  const auto mode = parse_power_mode(root.text("power_mode"));
  if (!mode) root.fail("power_mode must be one of given, linear, uniform, limited");
  f.power_mode = *mode;

  if (root.has("power_constant")) {
    if (f.power_mode != PowerMode::linear && f.power_mode != PowerMode::uniform)
      root.fail("power_constant is only allowed in linear and uniform modes");
    f.power_constant = root.number("power_constant");
    if (!(*f.power_constant > 0.0)) root.fail("power_constant must be positive");
  }
  if (root.has("power_range")) {
    if (f.power_mode != PowerMode::limited) root.fail("power_range is only allowed in limited mode");
    const Reader r = root.object("power_range");
    r.allow({"min", "max"});
    f.power_range = PowerRange{r.number("min"), r.number("max")};
    if (!(f.power_range->min > 0.0) || !(f.power_range->max >= f.power_range->min))
      r.fail("power range needs 0 < min <= max");
  } else if (f.power_mode == PowerMode::limited) {
    root.fail("limited mode needs power_range");
  }

  const auto& nodes = root.array("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Reader r(nodes[i], detail::element("$", "nodes", i));
    r.allow({"id", "x", "y"});
    f.nodes.push_back(Node{r.integer("id"), r.number("x"), r.number("y")});
  }
  const auto& links = root.array("links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Reader r(links[i], detail::element("$", "links", i));
    r.allow({"id", "tx", "rx", "power"});
    LinkSpec l{r.integer("id"), r.integer("tx"), r.integer("rx"), std::nullopt};
    if (f.power_mode == PowerMode::given) {
      l.power = r.number("power");
    } else if (r.has("power")) {
      r.fail(std::string("power is derived in ") + to_string(f.power_mode) + " mode and must be omitted");
    }
    f.links.push_back(l);
  }
  const auto& requests = root.array("requests");
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const Reader r(requests[i], detail::element("$", "requests", i));
    r.allow({"source", "sink", "demand"});
    f.requests.push_back(Request{r.integer("source"), r.integer("sink"), r.number("demand")});
  }

  try {
    to_instance(f);
  } catch (const InvalidInstance& e) {
    throw FormatError(std::string("invalid instance: ") + e.what());
  } catch (const ZeroDistance& e) {
    throw FormatError(std::string("invalid instance: ") + e.what());
  }
  return f;
}

inline std::string serialize(const InstanceFile& f) {
  detail::ordered_json doc;
  doc["params"] = {{"alpha", f.params.alpha}, {"beta", f.params.beta}, {"noise", f.params.noise},
                   {"epsilon", f.params.epsilon}};
  doc["power_mode"] = to_string(f.power_mode);
  if (f.power_constant) doc["power_constant"] = *f.power_constant;
  if (f.power_range) doc["power_range"] = {{"min", f.power_range->min}, {"max", f.power_range->max}};
  doc["nodes"] = detail::ordered_json::array();
  for (const Node& v : f.nodes) doc["nodes"].push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}});
  doc["links"] = detail::ordered_json::array();
  for (const LinkSpec& l : f.links) {
    detail::ordered_json j = {{"id", l.id}, {"tx", l.tx}, {"rx", l.rx}};
    if (l.power) j["power"] = *l.power;
    doc["links"].push_back(std::move(j));
  }
  doc["requests"] = detail::ordered_json::array();
  for (const Request& r : f.requests)
    doc["requests"].push_back({{"source", r.source}, {"sink", r.sink}, {"demand", r.demand}});
  return doc.dump(2) + "\n";
}

inline ResultFile parse_result(const std::string& text) {
  using detail::Reader;
  const auto doc = detail::parse_json(text);
  const Reader root(doc, "$");
  root.allow({"objective", "throughput", "period", "slots", "links", "flow", "diagnostics"});

  ResultFile r;
  const auto objective = parse_objective(root.text("objective"));
  if (!objective) root.fail("objective must be maxth or maxmin");
  r.objective = *objective;
  r.throughput = root.number("throughput");
  r.period = root.count("period");

  const auto& slots = root.array("slots");
  for (std::size_t t = 0; t < slots.size(); ++t) {
    if (!slots[t].is_array()) throw FormatError(detail::element("$", "slots", t) + ": expected an array");
    std::vector<int> ids;
    for (const auto& id : slots[t]) {
      if (!id.is_number_integer())
        throw FormatError(detail::element("$", "slots", t) + ": link ids must be integers");
      ids.push_back(id.get<int>());
    }
    r.slots.push_back(std::move(ids));
  }
  if (r.slots.size() != r.period) root.fail("period does not match the number of slots");

  const auto& links = root.array("links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Reader l(links[i], detail::element("$", "links", i));
    l.allow({"id", "tx", "rx", "power"});
    r.links.push_back(Link{l.integer("id"), l.integer("tx"), l.integer("rx"), l.number("power")});
  }

  const auto& flow = root.array("flow");
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const std::string path = detail::element("$", "flow", i);
    if (!flow[i].is_array()) throw FormatError(path + ": expected an array");
    std::map<int, double> values;
    for (std::size_t j = 0; j < flow[i].size(); ++j) {
      const Reader entry(flow[i][j], path + "[" + std::to_string(j) + "]");
      entry.allow({"link", "value"});
      if (!values.emplace(entry.integer("link"), entry.number("value")).second)
        entry.fail("duplicate link");
    }
    r.flow.push_back(std::move(values));
  }

  const Reader d = root.object("diagnostics");
  d.allow({"n", "m", "k", "lp_optimum", "lp_flow", "pruned_flow", "colors", "sigma", "max_parts", "scale",
           "emergency_bins", "power_levels", "dropped_links", "runtime_seconds"});
  ResultDiagnostics& g = r.diagnostics;
  g.n = d.count("n");
  g.m = d.count("m");
  g.k = d.count("k");
  g.lp_optimum = d.number("lp_optimum");
  g.lp_flow = d.number("lp_flow");
  g.pruned_flow = d.number("pruned_flow");
  g.colors = d.count("colors");
  g.sigma = d.count("sigma");
  g.max_parts = d.count("max_parts");
  g.scale = d.number("scale");
  g.emergency_bins = d.count("emergency_bins");
  g.power_levels = d.count("power_levels");
  for (const auto& id : d.array("dropped_links")) {
    if (!id.is_number_integer()) d.fail("dropped_links must hold integers");
    g.dropped_links.push_back(id.get<int>());
  }
  if (d.has("runtime_seconds")) g.runtime_seconds = d.number("runtime_seconds");
  return r;
}

inline std::string serialize(const ResultFile& r) {
  using detail::ordered_json;
  ordered_json doc;
  doc["objective"] = to_string(r.objective);
  doc["throughput"] = r.throughput;
  doc["period"] = r.period;
  doc["slots"] = ordered_json::array();
  for (const auto& slot : r.slots) doc["slots"].push_back(slot);
  doc["links"] = ordered_json::array();
  for (const Link& l : r.links)
    doc["links"].push_back({{"id", l.id}, {"tx", l.tx}, {"rx", l.rx}, {"power", l.power}});
  doc["flow"] = ordered_json::array();
  for (const auto& values : r.flow) {
    ordered_json entries = ordered_json::array();
    for (const auto& [id, v] : values) entries.push_back({{"link", id}, {"value", v}});
    doc["flow"].push_back(std::move(entries));
  }
  const ResultDiagnostics& g = r.diagnostics;
  ordered_json d;
  d["n"] = g.n;
  d["m"] = g.m;
  d["k"] = g.k;
  d["lp_optimum"] = g.lp_optimum;
  d["lp_flow"] = g.lp_flow;
  d["pruned_flow"] = g.pruned_flow;
  d["colors"] = g.colors;
  d["sigma"] = g.sigma;
  d["max_parts"] = g.max_parts;
  d["scale"] = g.scale;
  d["emergency_bins"] = g.emergency_bins;
  d["power_levels"] = g.power_levels;
  d["dropped_links"] = g.dropped_links;
  if (g.runtime_seconds) d["runtime_seconds"] = *g.runtime_seconds;
  doc["diagnostics"] = std::move(d);
  return doc.dump(2) + "\n";
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

// Writes to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot replace " + path.string());
  }
}

}  // namespace sinrflow
