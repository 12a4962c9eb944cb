#pragma once

// Multi-commodity flows: validity checks, cycle cancelling, path
// decomposition and removal of minuscule flow paths.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sinrflow/model.hpp"

namespace sinrflow {

// Flow values at or below this are treated as zero.
inline constexpr double kZeroFlow = 1e-12;

struct CommodityFlow {
  std::size_t commodity = 0;
  std::vector<double> values;  // per link index

  bool operator==(const CommodityFlow&) const = default;
};

struct MultiCommodityFlow {
  std::vector<CommodityFlow> commodities;

  static MultiCommodityFlow zero(const Instance& inst) {
    MultiCommodityFlow f;
    for (std::size_t i = 0; i < inst.k(); ++i)
      f.commodities.push_back(CommodityFlow{i, std::vector<double>(inst.m(), 0.0)});
    return f;
  }

  // f(e)
  double on_link(std::size_t e) const {
    double sum = 0.0;
    for (const CommodityFlow& c : commodities) sum += c.values[e];
    return sum;
  }

  std::vector<double> link_totals() const {
    std::vector<double> totals(commodities.empty() ? 0 : commodities.front().values.size(), 0.0);
    for (const CommodityFlow& c : commodities)
      for (std::size_t e = 0; e < c.values.size(); ++e) totals[e] += c.values[e];
    return totals;
  }

  MultiCommodityFlow scaled(double factor) const {
    MultiCommodityFlow out = *this;
    for (CommodityFlow& c : out.commodities)
      for (double& v : c.values) v *= factor;
    return out;
  }

  bool operator==(const MultiCommodityFlow&) const = default;
};

struct FlowPath {
  std::size_t commodity = 0;
  LinkSet links;  // ordered source -> sink
  double amount = 0.0;
};

// Net outflow of `node_id` under commodity flow values.
inline double net_outflow(const Instance& inst, std::span<const double> values, int node_id) {
  double net = 0.0;
  for (std::size_t e = 0; e < inst.m(); ++e) {
    if (inst.link(e).tx == node_id) net += values[e];
    if (inst.link(e).rx == node_id) net -= values[e];
  }
  return net;
}

// |f_i|
inline double flow_value(const Instance& inst, const CommodityFlow& c) {
  return net_outflow(inst, c.values, inst.requests().at(c.commodity).source);
}

// |f|
inline double flow_value(const Instance& inst, const MultiCommodityFlow& f) {
  double sum = 0.0;
  for (const CommodityFlow& c : f.commodities) sum += flow_value(inst, c);
  return sum;
}

// min_i |f_i| / b_i
inline double min_ratio(const Instance& inst, const MultiCommodityFlow& f) {
  double rho = std::numeric_limits<double>::infinity();
  for (const CommodityFlow& c : f.commodities)
    rho = std::min(rho, flow_value(inst, c) / inst.requests().at(c.commodity).demand);
  return rho;
}

struct DemandCheck {
  Objective mode = Objective::max_throughput;
  double rho = 0.0;

  static DemandCheck capped() { return {Objective::max_throughput, 0.0}; }
  static DemandCheck at_least(double rho) { return {Objective::max_min, rho}; }
};

struct FlowViolation {
  enum class Kind { negative, conservation, capacity, demand, ratio, shape };
  Kind kind;
  std::size_t commodity = 0;
  std::optional<int> link_id;
  std::optional<int> node_id;
  double amount = 0.0;  // by how much the bound is exceeded

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::negative: os << "negative flow"; break;
      case Kind::conservation: os << "conservation violated"; break;
      case Kind::capacity: os << "capacity exceeded"; break;
      case Kind::demand: os << "demand bound violated"; break;
      case Kind::ratio: os << "ratio below rho"; break;
      case Kind::shape: os << "malformed flow"; break;
    }
    os << " (commodity " << commodity;
    if (link_id) os << ", link " << *link_id;
    if (node_id) os << ", node " << *node_id;
    os << ", by " << amount << ")";
    return os.str();
  }
};

struct FlowReport {
  std::vector<FlowViolation> violations;

  bool valid() const { return violations.empty(); }
};

// Membership in F (capped) or F_rho (at_least). Violations are data.
inline FlowReport check_flow(const Instance& inst, const MultiCommodityFlow& f, DemandCheck demand) {
  using Kind = FlowViolation::Kind;
  FlowReport report;
  if (f.commodities.size() != inst.k()) {
    report.violations.push_back({Kind::shape, 0, std::nullopt, std::nullopt,
                                 static_cast<double>(f.commodities.size())});
    return report;
  }
  for (const CommodityFlow& c : f.commodities) {
    if (c.values.size() != inst.m() || c.commodity >= inst.k()) {
      report.violations.push_back({Kind::shape, c.commodity, std::nullopt, std::nullopt, 0.0});
      return report;
    }
  }
  for (const CommodityFlow& c : f.commodities) {
    const Request& r = inst.requests()[c.commodity];
    for (std::size_t e = 0; e < inst.m(); ++e)
      if (c.values[e] < -kTolerance)
        report.violations.push_back({Kind::negative, c.commodity, inst.link(e).id, std::nullopt, -c.values[e]});
    for (const Node& v : inst.nodes()) {
      if (v.id == r.source || v.id == r.sink) continue;
      const double net = net_outflow(inst, c.values, v.id);
      if (std::abs(net) > kTolerance)
        report.violations.push_back({Kind::conservation, c.commodity, std::nullopt, v.id, std::abs(net)});
    }
    const double value = flow_value(inst, c);
    if (value < -kTolerance)
      report.violations.push_back({Kind::demand, c.commodity, std::nullopt, r.source, -value});
    if (value > r.demand + kTolerance)
      report.violations.push_back({Kind::demand, c.commodity, std::nullopt, r.source, value - r.demand});
    if (demand.mode == Objective::max_min && value / r.demand < demand.rho - kTolerance)
      report.violations.push_back({Kind::ratio, c.commodity, std::nullopt, r.source,
                                   demand.rho - value / r.demand});
  }
  const std::vector<double> totals = f.link_totals();
  for (std::size_t e = 0; e < inst.m(); ++e)
    if (totals[e] > 1.0 + kTolerance)
      report.violations.push_back({Kind::capacity, 0, inst.link(e).id, std::nullopt, totals[e] - 1.0});
  return report;
}

namespace detail {

inline void snap_small(std::vector<double>& values) {
  for (double& v : values)
    if (v <= kZeroFlow) v = 0.0;
}

// Finds a directed cycle among links with positive flow; returns its links.
inline std::optional<LinkSet> find_flow_cycle(const Instance& inst, const std::vector<double>& values) {
  const std::size_t n = inst.n();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t e = 0; e < inst.m(); ++e)
    if (values[e] > 0.0) out[inst.node_index(inst.link(e).tx)].push_back(e);

  enum : char { kWhite, kGray, kBlack };
  std::vector<char> state(n, kWhite);
  std::vector<std::size_t> via(n, 0);  // link used to enter a gray node

  for (std::size_t root = 0; root < n; ++root) {
    if (state[root] != kWhite) continue;
    // Iterative DFS: stack of (node, next out-edge position).
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    state[root] = kGray;
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      if (pos == out[v].size()) {
        state[v] = kBlack;
        stack.pop_back();
        continue;
      }
      const std::size_t e = out[v][pos++];
      const std::size_t w = inst.node_index(inst.link(e).rx);
      if (state[w] == kGray) {
        LinkSet cycle{e};
        for (std::size_t u = v; u != w;) {
          const std::size_t back = via[u];
          cycle.push_back(back);
          u = inst.node_index(inst.link(back).tx);
        }
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (state[w] == kWhite) {
        state[w] = kGray;
        via[w] = e;
        stack.emplace_back(w, 0);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Zeroes flow around directed cycles in the support until it is acyclic.
inline CommodityFlow cancel_cycles(const Instance& inst, CommodityFlow c) {
  detail::snap_small(c.values);
  while (auto cycle = detail::find_flow_cycle(inst, c.values)) {
    double amount = c.values[cycle->front()];
    std::size_t bottleneck = cycle->front();
    for (std::size_t e : *cycle)
      if (c.values[e] < amount) amount = c.values[e], bottleneck = e;
    for (std::size_t e : *cycle) c.values[e] -= amount;
    c.values[bottleneck] = 0.0;
    detail::snap_small(c.values);
  }
  return c;
}

// Splits a commodity flow into source->sink paths, after cancelling cycles.
// Returns at most m paths.
inline std::vector<FlowPath> decompose_paths(const Instance& inst, const CommodityFlow& flow) {
  const Request& r = inst.requests().at(flow.commodity);
  CommodityFlow rest = cancel_cycles(inst, flow);
  std::vector<FlowPath> paths;

  auto next_link = [&](int node_id) -> std::optional<std::size_t> {
    for (std::size_t e = 0; e < inst.m(); ++e)
      if (rest.values[e] > 0.0 && inst.link(e).tx == node_id) return e;
    return std::nullopt;
  };

  while (auto first = next_link(r.source)) {
    FlowPath path{flow.commodity, {*first}, rest.values[*first]};
    int at = inst.link(*first).rx;
    bool stuck = false;
    while (at != r.sink) {
      auto e = next_link(at);
      if (!e) {
        stuck = true;
        break;
      }
      path.links.push_back(*e);
      path.amount = std::min(path.amount, rest.values[*e]);
      at = inst.link(*e).rx;
    }
    if (stuck) {
      // Residue from rounding strands flow at a dead end; drop it.
      rest.values[path.links.back()] = 0.0;
      continue;
    }
    for (std::size_t e : path.links) {
      rest.values[e] -= path.amount;
      if (rest.values[e] <= kZeroFlow) rest.values[e] = 0.0;
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

// Repeatedly zeroes all flow paths through the lowest-id link e with
// 0 < f(e) < threshold. The result is componentwise <= f and cycle-free.
inline MultiCommodityFlow remove_minuscule(const Instance& inst, const MultiCommodityFlow& f,
                                           double threshold) {
  MultiCommodityFlow g = f;
  for (CommodityFlow& c : g.commodities) c = cancel_cycles(inst, c);

  LinkSet by_id = all_links(inst);
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return inst.link(a).id < inst.link(b).id; });

  for (;;) {
    std::optional<std::size_t> target;
    for (std::size_t e : by_id) {
      const double total = g.on_link(e);
      if (total > 0.0 && total < threshold) {
        target = e;
        break;
      }
    }
    if (!target) break;
    for (CommodityFlow& c : g.commodities) {
      if (c.values[*target] <= 0.0) continue;
      for (const FlowPath& p : decompose_paths(inst, c)) {
        if (std::find(p.links.begin(), p.links.end(), *target) == p.links.end()) continue;
        for (std::size_t e : p.links) c.values[e] = std::max(0.0, c.values[e] - p.amount);
      }
      c.values[*target] = 0.0;
      detail::snap_small(c.values);
    }
  }
  return g;
}

// 1/(2nm) for max throughput, 1/(2 n^2 k m) for max-min.
inline double minuscule_threshold(const Instance& inst, Objective objective) {
  const double n = static_cast<double>(inst.n());
  const double m = static_cast<double>(inst.m());
  const double k = static_cast<double>(inst.k());
  return objective == Objective::max_throughput ? 1.0 / (2.0 * n * m)
                                                : 1.0 / (2.0 * n * n * k * m);
}

// Whether a directed path of links joins the request's endpoints.
inline bool is_routable(const Instance& inst, const Request& r) {
  std::vector<bool> seen(inst.n(), false);
  std::vector<int> frontier{r.source};
  seen[inst.node_index(r.source)] = true;
  while (!frontier.empty()) {
    const int v = frontier.back();
    frontier.pop_back();
    if (v == r.sink) return true;
    for (const Link& e : inst.links()) {
      if (e.tx != v) continue;
      const std::size_t w = inst.node_index(e.rx);
      if (!seen[w]) {
        seen[w] = true;
        frontier.push_back(e.rx);
      }
    }
  }
  return false;
}

}  // namespace sinrflow
