#pragma once

// End-to-end solve: LP relaxation, minuscule-path removal, greedy
// multi-coloring, dispersion of every color class into SINR-feasible parts,
// and a final uniform rescale so the schedule supports the returned flow.
//
// Signal buckets are scheduled independently (optionally in parallel) and
// concatenated in bucket-index order. For a power range, each candidate link
// is replaced by parallel copies at powers Pmin, 2 Pmin, ..., capped at Pmax.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sinrflow/coloring.hpp"
#include "sinrflow/dispersion.hpp"
#include "sinrflow/flow.hpp"
#include "sinrflow/lp.hpp"
#include "sinrflow/model.hpp"
#include "sinrflow/relaxation.hpp"
#include "sinrflow/schedule.hpp"

namespace sinrflow {

class Infeasible : public Error {
 public:
  using Error::Error;
};

class EmptyAfterFiltering : public Error {
 public:
  using Error::Error;
};

struct BucketDiagnostics {
  int bucket = 0;
  std::size_t links = 0;
  std::size_t period = 0;                  // sum_t l(t) for this bucket
  std::vector<std::size_t> parts;          // l(t) per color t
  std::vector<std::size_t> class_sizes;    // |pi^{-1}(t)| per color t
  double hypothesis_lhs = 0.0;             // coloring hypothesis, should be <= 1
  DispersionStats dispersion;
};

struct Diagnostics {
  double lp_optimum = 0.0;    // F* or R*
  double lp_flow = 0.0;       // |f*|
  double pruned_flow = 0.0;   // |f^|
  double pruned_ratio = 0.0;  // min_i |f^_i| / b_i
  std::size_t colors = 0;     // T
  std::size_t sigma = 0;
  std::size_t max_parts = 0;  // max_t l(t) over all buckets
  double scale = 0.0;         // s
  std::size_t emergency_bins = 0;
  std::size_t lp_iterations = 0;
  std::vector<BucketDiagnostics> buckets;
  // Power-range expansion only.
  std::size_t power_levels = 0;    // l = ceil(log2(Pmax/Pmin))
  std::vector<int> dropped_links;  // candidate ids below the SNR floor
};

struct SolveResult {
  Instance instance;  // the instance actually scheduled (boosted / expanded)
  Objective objective;
  Schedule schedule;
  MultiCommodityFlow flow;
  double throughput = 0.0;  // |f| or min_i |f_i|/b_i
  Diagnostics diagnostics;
};

struct PipelineOptions {
  // 0: SINRFLOW_THREADS if set, else hardware concurrency.
  std::size_t threads = 0;
};

struct RescaledFlow {
  MultiCommodityFlow flow;
  double scale = 1.0;
};

// s = min over links with f^(e) > 0 of count(e) / (T_total f^(e)).
inline RescaledFlow rescale_flow(const MultiCommodityFlow& pruned, const Schedule& schedule,
                                 std::size_t num_links) {
  const std::vector<std::size_t> counts = schedule.counts(num_links);
  const std::vector<double> total = pruned.link_totals();
  const double period = static_cast<double>(schedule.period());
  double s = 1.0;
  bool any = false;
  for (std::size_t e = 0; e < num_links; ++e) {
    if (total[e] <= 0.0) continue;
    const double r = static_cast<double>(counts[e]) / (period * total[e]);
    s = any ? std::min(s, r) : r;
    any = true;
  }
  return {pruned.scaled(s), s};
}

inline std::size_t color_count(const Instance& inst, Objective objective) {
  const std::size_t n = inst.n(), m = inst.m(), k = inst.k();
  return objective == Objective::max_throughput ? 2 * n * m : 2 * n * n * k * m;
}

inline std::size_t thread_limit(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SINRFLOW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

struct BucketSchedule {
  Schedule schedule;
  BucketDiagnostics diagnostics;
};

// Steps 3-5 for one bucket: color its links with demand f^, disperse every
// class, and replace slot t by its l(t) parts (an empty class keeps one
// empty slot). Identical classes are dispersed once.
inline BucketSchedule schedule_bucket(int index, const LinkSet& members, const AffectanceTable& table,
                                      const std::vector<double>& demand, std::size_t colors) {
  BucketSchedule out;
  BucketDiagnostics& diag = out.diagnostics;
  diag.bucket = index;
  diag.links = members.size();

  const WeightedConflictInput input = WeightedConflictInput::from_table(table, members, demand, colors);
  diag.hypothesis_lhs = input.hypothesis_lhs();
  const MultiColoring coloring = greedy_coloring(input);

  std::map<LinkSet, std::vector<SignalSet>> memo;
  for (const LinkSet& cls : coloring.classes()) {
    diag.class_sizes.push_back(cls.size());
    if (cls.empty()) {
      out.schedule.slots.emplace_back();
      diag.parts.push_back(1);
      continue;
    }
    auto it = memo.find(cls);
    if (it == memo.end()) it = memo.emplace(cls, disperse(cls, table, &diag.dispersion)).first;
    for (const SignalSet& part : it->second) out.schedule.slots.push_back(part.links);
    diag.parts.push_back(it->second.size());
  }
  diag.period = out.schedule.period();
  return out;
}

inline std::vector<BucketSchedule> schedule_buckets(const BucketPartition& buckets, const AffectanceTable& table,
                                                    const std::vector<double>& demand, std::size_t colors,
                                                    std::size_t threads) {
  std::vector<std::pair<int, const LinkSet*>> jobs;
  for (const auto& [index, members] : buckets.buckets) jobs.emplace_back(index, &members);
  std::vector<std::optional<BucketSchedule>> done(jobs.size());

  const std::size_t workers = std::min(threads, jobs.size());
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j)
      done[j] = schedule_bucket(jobs[j].first, *jobs[j].second, table, demand, colors);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
          try {
            done[j] = schedule_bucket(jobs[j].first, *jobs[j].second, table, demand, colors);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<BucketSchedule> out;
  for (auto& d : done) out.push_back(std::move(*d));
  return out;
}

inline SolveResult solve_boosted(const Instance& inst, Objective objective, const PipelineOptions& options) {
  bool any_routable = false;
  for (const Request& r : inst.requests()) any_routable = any_routable || is_routable(inst, r);
  if (!any_routable) throw Infeasible("no request is routable");

  const BucketPartition buckets = partition_buckets(inst);
  const AffectanceTable table = AffectanceTable::from_instance(inst);
  const FlowLp flp = build_flow_lp(inst, buckets, table, objective);
  const LpSolution sol = solve_lp(flp.lp);
  if (sol.status != LpStatus::optimal)
    throw NumericalFailure(std::string("relaxation ended ") + to_string(sol.status));

  Diagnostics diag;
  diag.lp_optimum = sol.objective_value;
  diag.lp_iterations = sol.iterations;
  diag.sigma = buckets.sigma();

  const MultiCommodityFlow lp_flow = extract_flow(inst, flp, sol);
  diag.lp_flow = flow_value(inst, lp_flow);
  const MultiCommodityFlow pruned = remove_minuscule(inst, lp_flow, minuscule_threshold(inst, objective));
  diag.pruned_flow = flow_value(inst, pruned);
  diag.pruned_ratio = min_ratio(inst, pruned);

  diag.colors = color_count(inst, objective);
  std::vector<BucketSchedule> parts =
      schedule_buckets(buckets, table, pruned.link_totals(), diag.colors, thread_limit(options.threads));

  std::vector<Schedule> schedules;
  for (BucketSchedule& b : parts) {
    for (std::size_t l : b.diagnostics.parts) diag.max_parts = std::max(diag.max_parts, l);
    diag.emergency_bins += b.diagnostics.dispersion.emergency_bins;
    schedules.push_back(std::move(b.schedule));
    diag.buckets.push_back(std::move(b.diagnostics));
  }
  Schedule schedule = concatenate_schedules(schedules);

  RescaledFlow scaled = rescale_flow(pruned, schedule, inst.m());
  diag.scale = scaled.scale;
  const double throughput = objective == Objective::max_throughput ? flow_value(inst, scaled.flow)
                                                                   : min_ratio(inst, scaled.flow);
  return SolveResult{inst, objective, std::move(schedule), std::move(scaled.flow), throughput, std::move(diag)};
}

}  // namespace detail

// Every link must share one bucket after the SNR boost.
inline SolveResult solve_single_bucket(const Instance& raw, Objective objective, const PipelineOptions& options = {}) {
  const Instance inst = enforce_snr_assumption(raw);
  if (partition_buckets(inst).sigma() != 1)
    throw PreconditionViolated("solve_single_bucket: links span more than one bucket");
  return detail::solve_boosted(inst, objective, options);
}

inline SolveResult solve_arbitrary_powers(const Instance& raw, Objective objective,
                                          const PipelineOptions& options = {}) {
  return detail::solve_boosted(enforce_snr_assumption(raw), objective, options);
}

struct PowerRange {
  double min;
  double max;

  bool operator==(const PowerRange&) const = default;
};

// ceil(log2(max/min)), robust to rounding at exact powers of two.
inline std::size_t power_levels(const PowerRange& range) {
  std::size_t l = 0;
  while (range.min * std::ldexp(1.0, static_cast<int>(l)) < range.max * (1.0 - 1e-12)) ++l;
  return l;
}

struct ExpandedInstance {
  std::optional<Instance> instance;  // empty when every candidate was dropped
  std::size_t levels = 0;
  std::vector<int> dropped;  // candidate link ids
};

// One copy per level i = 0..l at power min(2^i Pmin, Pmax) for each distinct
// (tx, rx) candidate that meets (Pmin / d^alpha) / N >= (1+eps) beta. Copies
// get sequential ids in candidate order. Candidate powers are ignored.
inline ExpandedInstance expand_power_levels(const Instance& candidates, const PowerRange& range) {
  if (!(range.min > 0.0) || !(range.max >= range.min))
    throw InvalidInstance("power range needs 0 < min <= max");
  const RadioParams& p = candidates.params();
  ExpandedInstance out;
  out.levels = power_levels(range);

  std::vector<Link> links;
  std::vector<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < candidates.m(); ++e) {
    const Link& c = candidates.link(e);
    const double snr = range.min / std::pow(candidates.length(e), p.alpha) / p.noise;
    if (snr < (1.0 + p.epsilon) * p.beta * (1.0 - 1e-12)) {
      out.dropped.push_back(c.id);
      continue;
    }
    if (std::find(seen.begin(), seen.end(), std::pair{c.tx, c.rx}) != seen.end()) continue;
    seen.emplace_back(c.tx, c.rx);
    for (std::size_t i = 0; i <= out.levels; ++i) {
      const double power = std::min(range.min * std::ldexp(1.0, static_cast<int>(i)), range.max);
      links.push_back(Link{static_cast<int>(links.size()), c.tx, c.rx, power});
    }
  }
  if (!links.empty()) out.instance.emplace(p, candidates.nodes(), std::move(links), candidates.requests());
  return out;
}

inline SolveResult solve_limited_powers(const Instance& candidates, const PowerRange& range, Objective objective,
                                        const PipelineOptions& options = {}) {
  ExpandedInstance expanded = expand_power_levels(candidates, range);
  if (!expanded.instance) throw EmptyAfterFiltering("every candidate link is below the SNR floor at Pmin");
  SolveResult result = solve_arbitrary_powers(*expanded.instance, objective, options);
  result.diagnostics.power_levels = expanded.levels;
  result.diagnostics.dropped_links = std::move(expanded.dropped);
  return result;
}

}  // namespace sinrflow
