#pragma once

// Ground-truth checks: direct SINR feasibility, signal levels, schedule
// support, the six-sector guard construction, degree sums and residuals of
// the symmetric interference rows.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "sinrflow/flow.hpp"
#include "sinrflow/model.hpp"
#include "sinrflow/schedule.hpp"

namespace sinrflow {

struct FeasibilityReport {
  bool feasible = true;
  std::optional<int> worst_link;  // link id with the smallest SINR / beta
  double worst_affectance = 0.0;  // max a_L(e)
  double worst_bar_affectance = 0.0;
  std::vector<double> sinr;        // parallel to the checked set
  std::vector<double> affectance;  // a_L(e); +inf where undefined
  // Links where the direct test and a_L(e) <= 1 disagree beyond tolerance.
  std::size_t equivalence_mismatches = 0;
};

// Checks S_e / (N + sum S_{e'e}) >= beta for every e in L. The comparison is
// done in the form S_e - beta*(N + I) >= -tol * (S_e - beta*N), which is the
// same acceptance region as a_L(e) <= 1 + tol.
inline FeasibilityReport is_sinr_feasible(const Instance& inst, std::span<const std::size_t> links) {
  const RadioParams& p = inst.params();
  constexpr double inf = std::numeric_limits<double>::infinity();
  FeasibilityReport rep;
  double worst_ratio = inf;

  for (std::size_t e : links) {
    const double s = received_power(inst, e);
    double interference = 0.0;
    double bar = 0.0;
    for (std::size_t other : links) {
      if (other == e) continue;
      const double d = distance(inst.tx(other), inst.rx(e));
      interference += d > 0.0 ? inst.link(other).power / std::pow(d, p.alpha) : inf;
      bar += affectance(inst, other, e, Affectance::bar);
    }
    const double sinr = s / (p.noise + interference);
    const double margin = s - p.beta * p.noise;
    const bool ok = margin > 0.0 ? s - p.beta * (p.noise + interference) >= -kTolerance * margin
                                 : interference == 0.0 && sinr >= p.beta;
    const double plain = margin > 0.0 ? p.beta * interference / margin : inf;

    rep.sinr.push_back(sinr);
    rep.affectance.push_back(plain);
    rep.worst_affectance = std::max(rep.worst_affectance, plain);
    rep.worst_bar_affectance = std::max(rep.worst_bar_affectance, bar);
    if (!ok) rep.feasible = false;
    if (margin > 0.0 && std::isfinite(plain) && ok != (plain <= 1.0 + kTolerance) &&
        std::abs(plain - 1.0) > 1e-6)
      ++rep.equivalence_mismatches;
    if (sinr / p.beta < worst_ratio) {
      worst_ratio = sinr / p.beta;
      rep.worst_link = inst.link(e).id;
    }
  }
  return rep;
}

// p = 1 / max_{e in L} a_L(e); +inf when nothing interferes.
inline double signal_level(const Instance& inst, std::span<const std::size_t> links, Affectance variant) {
  double worst = 0.0;
  for (std::size_t e : links) worst = std::max(worst, set_affectance(inst, links, e, variant));
  return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

struct SupportEntry {
  int link_id;
  double demand;      // T * f(e)
  std::size_t count;  // |{t : e in L_t}|
  double slack;       // count - T * f(e)
};

struct SupportReport {
  bool supported = true;
  std::vector<SupportEntry> entries;  // per link, instance order
  double min_slack = std::numeric_limits<double>::infinity();
};

// T * f(e) <= |{t : e in L_t}| + 1e-9 for every link.
inline SupportReport supports(const Instance& inst, const Schedule& schedule, const MultiCommodityFlow& f) {
  SupportReport rep;
  const std::vector<std::size_t> counts = schedule.counts(inst.m());
  const double period = static_cast<double>(schedule.period());
  for (std::size_t e = 0; e < inst.m(); ++e) {
    const double need = period * f.on_link(e);
    const double slack = static_cast<double>(counts[e]) - need;
    rep.entries.push_back({inst.link(e).id, need, counts[e], slack});
    rep.min_slack = std::min(rep.min_slack, slack);
    if (slack < -kTolerance) rep.supported = false;
  }
  return rep;
}

// d(s_{e'}, r_e)
inline double cross_distance(const Instance& inst, std::size_t from, std::size_t to) {
  return distance(inst.tx(from), inst.rx(to));
}

// L^l = {e' in L : d_{e'} <= d_{e'e}}
inline LinkSet near_links(const Instance& inst, std::span<const std::size_t> links, std::size_t e) {
  LinkSet out;
  for (std::size_t other : links)
    if (inst.length(other) <= cross_distance(inst, other, e)) out.push_back(other);
  return out;
}

// Six 60-degree sectors around r_e. In each, take the L^l link whose
// transmitter is closest to r_e, then the L^l receiver closest to that
// transmitter. Returns the distinct receiver node ids (at most six).
inline std::vector<int> guard_set(const Instance& inst, std::span<const std::size_t> links, std::size_t e) {
  const LinkSet near = near_links(inst, links, e);
  const Node& center = inst.rx(e);
  std::array<std::optional<std::size_t>, 6> closest;
  for (std::size_t other : near) {
    const Node& s = inst.tx(other);
    double angle = std::atan2(s.y - center.y, s.x - center.x);
    if (angle < 0.0) angle += 2.0 * std::numbers::pi;
    const auto sector =
        std::min<std::size_t>(5, static_cast<std::size_t>(angle / (std::numbers::pi / 3.0)));
    std::optional<std::size_t>& best = closest[sector];
    if (!best || distance(s, center) < distance(inst.tx(*best), center)) best = other;
  }

  std::vector<int> guards;
  for (const auto& pick : closest) {
    if (!pick) continue;
    const Node& s = inst.tx(*pick);
    std::size_t g = *pick;
    for (std::size_t other : near)
      if (distance(s, inst.rx(other)) < distance(s, inst.rx(g))) g = other;
    const int id = inst.link(g).rx;
    if (std::find(guards.begin(), guards.end(), id) == guards.end()) guards.push_back(id);
  }
  return guards;
}

// Every e' in L^l has a guard g with d(s_{e'}, g) <= 2 d_{e'e}.
inline bool guard_property_holds(const Instance& inst, std::span<const std::size_t> links, std::size_t e,
                                 std::span<const int> guards) {
  for (std::size_t other : near_links(inst, links, e)) {
    const double limit = 2.0 * cross_distance(inst, other, e) * (1.0 + kTolerance);
    bool covered = false;
    for (int g : guards)
      if (distance(inst.tx(other), inst.node(g)) <= limit) covered = true;
    if (!covered) return false;
  }
  return true;
}

struct DegreeSums {
  double in_sum = 0.0;   // sum abar_{e'}(e)
  double out_sum = 0.0;  // sum abar_e(e')
};

// Both sums over {e' in L \ {e} : d_{e'} >= d_e}.
inline DegreeSums check_degree_theorems(const Instance& inst, std::span<const std::size_t> links, std::size_t e) {
  DegreeSums sums;
  for (std::size_t other : links) {
    if (other == e || inst.length(other) < inst.length(e)) continue;
    sums.in_sum += affectance(inst, other, e, Affectance::bar);
    sums.out_sum += affectance(inst, e, other, Affectance::bar);
  }
  return sums;
}

// 6((1+eps) 2^{alpha+2} / eps + 1) + 2 * 3^alpha / beta + 2
inline double degree_constant(const RadioParams& p) {
  return 6.0 * ((1.0 + p.epsilon) * std::pow(2.0, p.alpha + 2.0) / p.epsilon + 1.0) +
         2.0 * std::pow(3.0, p.alpha) / p.beta + 2.0;
}

struct SymmetricResidual {
  std::vector<double> lhs;  // per link
  double max_lhs = 0.0;
  std::optional<int> worst_link;

  bool satisfied(double tol = 1e-7) const { return max_lhs <= 1.0 + tol; }
};

// Evaluates f(e) + sum_{e' in B(e), e' longer than e} (abar_e'(e) + abar_e(e')) f(e')
// for every link, computing affectances from the instance directly.
inline SymmetricResidual check_symmetric_constraints(const Instance& inst, const BucketPartition& buckets,
                                                     const MultiCommodityFlow& f) {
  SymmetricResidual rep;
  const std::vector<double> total = f.link_totals();
  rep.lhs.assign(inst.m(), 0.0);
  for (const auto& [index, members] : buckets.buckets) {
    for (std::size_t e : members) {
      double lhs = total[e];
      for (std::size_t other : members) {
        if (other == e || !longer(inst, other, e) || total[other] == 0.0) continue;
        lhs += (affectance(inst, other, e, Affectance::bar) + affectance(inst, e, other, Affectance::bar)) *
               total[other];
      }
      rep.lhs[e] = lhs;
      if (!rep.worst_link || lhs > rep.max_lhs) {
        rep.max_lhs = lhs;
        rep.worst_link = inst.link(e).id;
      }
    }
  }
  return rep;
}

}  // namespace sinrflow
