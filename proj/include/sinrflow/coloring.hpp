#pragma once

// First-fit greedy multi-coloring of links. Vertices are scanned longest
// first; each takes the first floor(x*T) colors whose accumulated weight from
// already-colored (longer) vertices does not exceed 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sinrflow/model.hpp"
#include "sinrflow/schedule.hpp"

namespace sinrflow {

class ColoringFail : public Error {
 public:
  using Error::Error;
};

struct WeightedConflictInput {
  LinkSet vertices;            // scan order, longest first
  std::vector<double> demand;  // x, parallel to vertices
  std::vector<double> weight;  // |V| x |V| symmetric, by position in `vertices`
  std::size_t colors = 0;      // T

  std::size_t size() const { return vertices.size(); }
  double w(std::size_t a, std::size_t b) const { return weight[a * vertices.size() + b]; }

  // Builds the input for `links` with demand x[e] (indexed by link) and
  // w(e,e') = abar_e(e') + abar_e'(e).
  static WeightedConflictInput from_table(const AffectanceTable& table, std::span<const std::size_t> links,
                                          std::span<const double> x, std::size_t colors) {
    WeightedConflictInput in;
    in.vertices = table.sorted_longest_first(links);
    in.colors = colors;
    const std::size_t n = in.vertices.size();
    in.demand.resize(n);
    in.weight.assign(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      in.demand[a] = std::clamp(x[in.vertices[a]], 0.0, 1.0);
      for (std::size_t b = 0; b < n; ++b)
        if (a != b) in.weight[a * n + b] = table.weight(in.vertices[a], in.vertices[b]);
    }
    return in;
  }

  // max_u x(u) + sum_{v before u} w(v,u) x(v); the coloring needs this <= 1.
  double hypothesis_lhs() const {
    double worst = 0.0;
    for (std::size_t u = 0; u < size(); ++u) {
      double lhs = demand[u];
      for (std::size_t v = 0; v < u; ++v) lhs += w(v, u) * demand[v];
      worst = std::max(worst, lhs);
    }
    return worst;
  }
};

struct MultiColoring {
  std::size_t period = 0;                     // T
  LinkSet vertices;                           // as in the input
  std::vector<std::vector<std::size_t>> colors;  // ascending, parallel to vertices

  LinkSet color_class(std::size_t c) const {
    LinkSet out;
    for (std::size_t v = 0; v < vertices.size(); ++v)
      if (std::binary_search(colors[v].begin(), colors[v].end(), c)) out.push_back(vertices[v]);
    return out;
  }

  // All T color classes, each listing links in scan order.
  std::vector<LinkSet> classes() const {
    std::vector<LinkSet> out(period);
    for (std::size_t v = 0; v < vertices.size(); ++v)
      for (std::size_t c : colors[v]) out[c].push_back(vertices[v]);
    return out;
  }

  bool operator==(const MultiColoring&) const = default;
};

inline constexpr double kBadColorThreshold = 1.0 + kTolerance;

inline MultiColoring greedy_coloring(const WeightedConflictInput& in) {
  const std::size_t n = in.size(), T = in.colors;
  MultiColoring out{T, in.vertices, std::vector<std::vector<std::size_t>>(n)};
  std::vector<double> load(T);

  for (std::size_t u = 0; u < n; ++u) {
    std::fill(load.begin(), load.end(), 0.0);
    for (std::size_t v = 0; v < u; ++v) {
      const double w = in.w(v, u);
      if (w == 0.0) continue;
      for (std::size_t c : out.colors[v]) load[c] += w;
    }
    // The slack keeps x = 1/T from rounding down to zero colors.
    const auto want = static_cast<std::size_t>(
        std::floor(std::clamp(in.demand[u], 0.0, 1.0) * static_cast<double>(T) + kTolerance));
    const auto bad = static_cast<std::size_t>(
        std::count_if(load.begin(), load.end(), [](double l) { return l > kBadColorThreshold; }));
    if (bad > T - want)
      throw ColoringFail("greedy coloring failed at vertex " + std::to_string(in.vertices[u]) + ": " +
                         std::to_string(bad) + " bad colors, " + std::to_string(want) + " needed of " +
                         std::to_string(T));
    std::vector<std::size_t>& mine = out.colors[u];
    mine.reserve(want);
    for (std::size_t c = 0; c < T && mine.size() < want; ++c)
      if (load[c] <= kBadColorThreshold) mine.push_back(c);
  }
  return out;
}

// Slot t holds exactly the links colored t.
inline Schedule coloring_to_schedule(const MultiColoring& coloring) {
  return Schedule{coloring.classes()};
}

}  // namespace sinrflow
