#pragma once

// Exact optimum over periodic schedules for tiny instances. Enumerates every
// link subset, keeps the SINR-feasible ones and solves the configuration LP
//   sum_S x_S = 1,  f(e) <= sum_{S contains e} x_S,  f in the flow polytope.
// Only maximal feasible sets get a variable: feasibility is closed under
// taking subsets, so this loses nothing.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sinrflow/lp.hpp"
#include "sinrflow/model.hpp"
#include "sinrflow/relaxation.hpp"
#include "sinrflow/verify.hpp"

namespace sinrflow {

class TooLarge : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kOracleMaxLinks = 16;

struct Configuration {
  LinkSet links;
  double weight;  // x_S
};

struct OracleResult {
  double optimum = 0.0;                // F* or R* over periodic schedules
  std::size_t feasible_set_count = 0;  // includes the empty set
  std::size_t maximal_set_count = 0;
  std::vector<Configuration> support;  // x_S > 0
  MultiCommodityFlow flow;
};

namespace detail {

inline LinkSet mask_links(std::uint32_t mask, std::size_t m) {
  LinkSet out;
  for (std::size_t e = 0; e < m; ++e)
    if (mask & (std::uint32_t{1} << e)) out.push_back(e);
  return out;
}

}  // namespace detail

inline OracleResult oracle_optimum(const Instance& inst, Objective objective) {
  const std::size_t m = inst.m();
  if (m > kOracleMaxLinks)
    throw TooLarge("oracle enumerates at most " + std::to_string(kOracleMaxLinks) + " links, got " +
                   std::to_string(m));

  const std::uint32_t full = std::uint32_t{1} << m;
  std::vector<bool> feasible(full, false);
  OracleResult out{0.0, 0, 0, {}, MultiCommodityFlow::zero(inst)};
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    feasible[mask] = is_sinr_feasible(inst, detail::mask_links(mask, m)).feasible;
    if (feasible[mask]) ++out.feasible_set_count;
  }

  std::vector<std::uint32_t> maximal;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    if (!feasible[mask]) continue;
    bool extendable = false;
    for (std::size_t e = 0; e < m && !extendable; ++e) {
      const std::uint32_t bit = std::uint32_t{1} << e;
      if (!(mask & bit) && feasible[mask | bit]) extendable = true;
    }
    if (!extendable) maximal.push_back(mask);
  }
  out.maximal_set_count = maximal.size();

  FlowLp flp = detail::flow_polytope_lp(inst, objective);
  LinearProgram& lp = flp.lp;
  std::vector<std::size_t> x(maximal.size());
  std::vector<Term> convex;
  for (std::size_t s = 0; s < maximal.size(); ++s) {
    x[s] = lp.add_variable("x_" + std::to_string(maximal[s]));
    convex.push_back({x[s], 1.0});
  }
  lp.add_constraint("convex", std::move(convex), Sense::equal, 1.0);
  for (std::size_t e = 0; e < m; ++e) {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < inst.k(); ++i) terms.push_back({flp.flow_var[i][e], 1.0});
    for (std::size_t s = 0; s < maximal.size(); ++s)
      if (maximal[s] & (std::uint32_t{1} << e)) terms.push_back({x[s], -1.0});
    lp.add_constraint("active_l" + std::to_string(inst.link(e).id), std::move(terms), Sense::less_equal, 0.0);
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw NumericalFailure(std::string("configuration LP ended ") + to_string(sol.status));
  out.optimum = sol.objective_value;
  out.flow = extract_flow(inst, flp, sol);
  for (std::size_t s = 0; s < maximal.size(); ++s)
    if (sol.values[x[s]] > kTolerance)
      out.support.push_back({detail::mask_links(maximal[s], m), sol.values[x[s]]});
  return out;
}

}  // namespace sinrflow
