#pragma once

// Refinement of a color class into SINR-feasible sets.
//
// Phase 1 repeatedly extracts at least half of the remaining links as a set
// with abar_J(e) <= 3. Phase 2 packs each such set with two first-fit passes
// over 7 bins (longest first, then shortest first within each bin), admitting
// a link when the in-affectance of the bin's members is at most 3/7. Every
// final set then has abar_S(e) <= 6/7 and is SINR-feasible.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "sinrflow/model.hpp"

namespace sinrflow {

struct SignalSet {
  LinkSet links;
  // p such that the set is asserted to be a bar p-signal: abar_L(e) <= 1/p.
  double claimed_level = 0.0;
};

inline constexpr double kHalfRowBound = 2.0;
inline constexpr double kHalfSetBound = 3.0;
inline constexpr double kBinAdmission = 3.0 / 7.0;
inline constexpr double kFinalSetBound = 6.0 / 7.0;
inline constexpr std::size_t kBins = 7;

// Observability for the pipeline's dispersion stage.
struct DispersionStats {
  std::size_t emergency_bins = 0;
  std::size_t half_calls = 0;
  std::size_t half_size_shortfalls = 0;  // |J| < ceil(|L|/2)
  double max_half_affectance = 0.0;      // max abar_J(e) over phase-1 sets
  double max_part_affectance = 0.0;      // max abar_S(e) over final sets
};

namespace detail {

// max_{e in L} sum_{e' in L, e' longer than e} w(e,e') - the column bound
// that a color class satisfies.
inline double longer_weight_max(std::span<const std::size_t> ordered, const AffectanceTable& table) {
  double worst = 0.0;
  for (std::size_t j = 0; j < ordered.size(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < j; ++i) col += table.weight(ordered[i], ordered[j]);
    worst = std::max(worst, col);
  }
  return worst;
}

inline double max_in_affectance(std::span<const std::size_t> set, const AffectanceTable& table) {
  double worst = 0.0;
  for (std::size_t e : set) worst = std::max(worst, table.in_affectance(set, e));
  return worst;
}

}  // namespace detail

// Orders L longest first, forms A(e,e') = w(e,e') and keeps the rows whose
// upper-triangular weight (towards shorter links) is at most 2.
// Requires sum_{e' longer than e} A(e',e) <= 1 + 1e-7 for every e in L.
inline SignalSet find_half_subset(std::span<const std::size_t> links, const AffectanceTable& table,
                                  DispersionStats* stats = nullptr) {
  const LinkSet ordered = table.sorted_longest_first(links);
  if (detail::longer_weight_max(ordered, table) > 1.0 + 1e-7)
    throw PreconditionViolated("find_half_subset: longer-link weight exceeds 1");

  SignalSet out{{}, 1.0 / kHalfSetBound};
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < ordered.size(); ++j) row += table.weight(ordered[i], ordered[j]);
    if (row <= kHalfRowBound) out.links.push_back(ordered[i]);
  }
  if (stats) {
    ++stats->half_calls;
    if (2 * out.links.size() < ordered.size()) ++stats->half_size_shortfalls;
    stats->max_half_affectance =
        std::max(stats->max_half_affectance, detail::max_in_affectance(out.links, table));
  }
  return out;
}

inline SignalSet find_half_subset(std::span<const std::size_t> links, const Instance& inst) {
  return find_half_subset(links, AffectanceTable::from_instance(inst));
}

// Peels half-subsets until L is exhausted: at most floor(log2|L|)+1 sets.
inline std::vector<SignalSet> disperse_third(std::span<const std::size_t> links, const AffectanceTable& table,
                                             DispersionStats* stats = nullptr) {
  std::vector<SignalSet> parts;
  LinkSet rest = table.sorted_longest_first(links);
  while (!rest.empty()) {
    SignalSet part = find_half_subset(rest, table, stats);
    if (part.links.empty()) throw PreconditionViolated("find_half_subset made no progress");
    LinkSet next;
    for (std::size_t e : rest)
      if (std::find(part.links.begin(), part.links.end(), e) == part.links.end()) next.push_back(e);
    rest = std::move(next);
    parts.push_back(std::move(part));
  }
  return parts;
}

inline std::vector<SignalSet> disperse_third(std::span<const std::size_t> links, const Instance& inst) {
  return disperse_third(links, AffectanceTable::from_instance(inst));
}

namespace detail {

// First-fit into kBins bins over `sequence`; overflowing links open extra
// bins and are counted.
inline std::vector<LinkSet> first_fit(std::span<const std::size_t> sequence, const AffectanceTable& table,
                                      std::size_t& emergency) {
  std::vector<LinkSet> bins(kBins);
  for (std::size_t e : sequence) {
    bool placed = false;
    for (LinkSet& bin : bins) {
      if (table.in_affectance(bin, e) <= kBinAdmission + kTolerance) {
        bin.push_back(e);
        placed = true;
        break;
      }
    }
    if (!placed) {
      ++emergency;
      bins.push_back(LinkSet{e});
    }
  }
  return bins;
}

}  // namespace detail

// Splits a set with abar <= 3 into at most 49 sets with abar <= 6/7.
inline std::vector<SignalSet> bin_pack_refine(const SignalSet& input, const AffectanceTable& table,
                                              DispersionStats* stats = nullptr) {
  std::size_t emergency = 0;
  const LinkSet longest_first = table.sorted_longest_first(input.links);
  std::vector<SignalSet> out;
  for (const LinkSet& bin : detail::first_fit(longest_first, table, emergency)) {
    if (bin.empty()) continue;
    LinkSet shortest_first = bin;
    std::reverse(shortest_first.begin(), shortest_first.end());
    for (LinkSet& sub : detail::first_fit(shortest_first, table, emergency)) {
      if (sub.empty()) continue;
      out.push_back(SignalSet{table.sorted_longest_first(sub), 1.0 / kFinalSetBound});
    }
  }
  if (stats) {
    stats->emergency_bins += emergency;
    for (const SignalSet& s : out)
      stats->max_part_affectance =
          std::max(stats->max_part_affectance, detail::max_in_affectance(s.links, table));
  }
  return out;
}

inline std::vector<SignalSet> bin_pack_refine(const SignalSet& input, const Instance& inst) {
  return bin_pack_refine(input, AffectanceTable::from_instance(inst));
}

// Phase 1 followed by phase 2 on each part; at most 49*(floor(log2|L|)+1)
// SINR-feasible parts partitioning L.
inline std::vector<SignalSet> disperse(std::span<const std::size_t> links, const AffectanceTable& table,
                                       DispersionStats* stats = nullptr) {
  std::vector<SignalSet> out;
  for (const SignalSet& third : disperse_third(links, table, stats))
    for (SignalSet& part : bin_pack_refine(third, table, stats)) out.push_back(std::move(part));
  return out;
}

inline std::vector<SignalSet> disperse(std::span<const std::size_t> links, const Instance& inst) {
  return disperse(links, AffectanceTable::from_instance(inst));
}

inline std::size_t dispersion_part_bound(std::size_t class_size) {
  if (class_size == 0) return 0;
  std::size_t log = 0;
  while ((std::size_t{2} << log) <= class_size) ++log;
  return 49 * (log + 1);
}

}  // namespace sinrflow
