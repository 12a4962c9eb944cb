#pragma once

// LP relaxations for max throughput and max-min throughput: flow polytope
// rows plus, per bucket, the symmetric interference rows
//   f(e) + sum_{e' in B, e' longer than e} (abar_e'(e) + abar_e(e')) f(e') <= 1.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sinrflow/flow.hpp"
#include "sinrflow/lp.hpp"
#include "sinrflow/model.hpp"

namespace sinrflow {

struct FlowLp {
  LinearProgram lp;
  Objective objective = Objective::max_throughput;
  std::vector<std::vector<std::size_t>> flow_var;  // [commodity][link]
  std::optional<std::size_t> rho_var;
};

namespace detail {

// Flow variables, conservation, demand and (for max-min) ratio rows, plus the
// objective. Shared with the configuration LP of the oracle.
inline FlowLp flow_polytope_lp(const Instance& inst, Objective objective) {
  FlowLp out;
  out.objective = objective;
  LinearProgram& lp = out.lp;
  const std::size_t k = inst.k(), m = inst.m();

  out.flow_var.assign(k, std::vector<std::size_t>(m));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t e = 0; e < m; ++e)
      out.flow_var[i][e] =
          lp.add_variable("f_r" + std::to_string(i) + "_l" + std::to_string(inst.link(e).id));
  if (objective == Objective::max_min) out.rho_var = lp.add_variable("rho", 1.0);

  for (std::size_t i = 0; i < k; ++i) {
    const Request& r = inst.requests()[i];
    const std::string tag = "r" + std::to_string(i);

    // |f_i| is the net outflow at the source.
    std::vector<Term> value;
    for (std::size_t e = 0; e < m; ++e) {
      if (inst.link(e).tx == r.source) value.push_back({out.flow_var[i][e], 1.0});
      if (inst.link(e).rx == r.source) value.push_back({out.flow_var[i][e], -1.0});
    }
    if (objective == Objective::max_throughput)
      for (const Term& t : value) lp.set_objective(t.var, lp.objective()[t.var] + t.coef);

    for (const Node& v : inst.nodes()) {
      if (v.id == r.source || v.id == r.sink) continue;
      std::vector<Term> terms;
      for (std::size_t e = 0; e < m; ++e) {
        if (inst.link(e).tx == v.id) terms.push_back({out.flow_var[i][e], 1.0});
        if (inst.link(e).rx == v.id) terms.push_back({out.flow_var[i][e], -1.0});
      }
      if (!terms.empty())
        lp.add_constraint("conserve_" + tag + "_n" + std::to_string(v.id), std::move(terms),
                          Sense::equal, 0.0);
    }
    lp.add_constraint("demand_" + tag, value, Sense::less_equal, r.demand);
    lp.add_constraint("nonneg_" + tag, value, Sense::greater_equal, 0.0);
    if (objective == Objective::max_min) {
      std::vector<Term> ratio = value;
      ratio.push_back({*out.rho_var, -r.demand});
      lp.add_constraint("ratio_" + tag, std::move(ratio), Sense::greater_equal, 0.0);
    }
  }
  return out;
}

inline FlowLp relaxation_lp(const Instance& inst, const BucketPartition& buckets,
                            const AffectanceTable& table, Objective objective) {
  FlowLp out = flow_polytope_lp(inst, objective);
  LinearProgram& lp = out.lp;
  const std::size_t k = inst.k(), m = inst.m();

  for (std::size_t e = 0; e < m; ++e) {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back({out.flow_var[i][e], 1.0});
    lp.add_constraint("capacity_l" + std::to_string(inst.link(e).id), std::move(terms),
                      Sense::less_equal, 1.0);
  }

  for (const auto& [index, members] : buckets.buckets) {
    for (std::size_t e : members) {
      std::vector<Term> terms;
      for (std::size_t i = 0; i < k; ++i) terms.push_back({out.flow_var[i][e], 1.0});
      for (std::size_t other : members) {
        if (other == e || !table.precedes(other, e)) continue;
        const double w = table.weight(e, other);
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < k; ++i) terms.push_back({out.flow_var[i][other], w});
      }
      lp.add_constraint("interference_b" + std::to_string(index) + "_l" +
                            std::to_string(inst.link(e).id),
                        std::move(terms), Sense::less_equal, 1.0);
    }
  }
  return out;
}

}  // namespace detail

inline FlowLp build_maxth_lp(const Instance& inst, const BucketPartition& buckets,
                             const AffectanceTable& table) {
  return detail::relaxation_lp(inst, buckets, table, Objective::max_throughput);
}

inline FlowLp build_maxth_lp(const Instance& inst, const BucketPartition& buckets) {
  return build_maxth_lp(inst, buckets, AffectanceTable::from_instance(inst));
}

inline FlowLp build_maxminth_lp(const Instance& inst, const BucketPartition& buckets,
                                const AffectanceTable& table) {
  return detail::relaxation_lp(inst, buckets, table, Objective::max_min);
}

inline FlowLp build_maxminth_lp(const Instance& inst, const BucketPartition& buckets) {
  return build_maxminth_lp(inst, buckets, AffectanceTable::from_instance(inst));
}

inline FlowLp build_flow_lp(const Instance& inst, const BucketPartition& buckets,
                            const AffectanceTable& table, Objective objective) {
  return detail::relaxation_lp(inst, buckets, table, objective);
}

inline MultiCommodityFlow extract_flow(const Instance& inst, const FlowLp& flp, const LpSolution& sol) {
  MultiCommodityFlow f = MultiCommodityFlow::zero(inst);
  for (std::size_t i = 0; i < inst.k(); ++i)
    for (std::size_t e = 0; e < inst.m(); ++e)
      f.commodities[i].values[e] = std::max(0.0, sol.values.at(flp.flow_var[i][e]));
  return f;
}

}  // namespace sinrflow
