#pragma once

// Seeded random instances. Nodes are uniform in [0, W]^2; each link joins a
// random transmitter to one of its three nearest nodes; requests join pairs
// connected by a directed path, with demand drawn from [1, min(n, c)] where c
// is the unit-capacity max flow between them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "sinrflow/io.hpp"
#include "sinrflow/model.hpp"

namespace sinrflow {

struct GenerateOptions {
  std::size_t nodes = 8;
  std::size_t links = 10;
  std::size_t requests = 1;
  std::uint64_t seed = 1;
  PowerMode mode = PowerMode::given;
  double area = 100.0;
  double alpha = 2.0;
  double beta = 1.0;
  double noise = 1e-6;
  double epsilon = 0.5;
  std::optional<double> power_constant;  // linear / uniform
  double power_min = 1.0;                // limited
  double power_max = 8.0;                // limited
};

namespace detail {

// Portable draws from mt19937_64 (the std distributions are not specified
// bit-for-bit across standard libraries).
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

 private:
  std::mt19937_64 rng_;
};

// Unit-capacity max flow between two nodes over the directed link multigraph.
inline std::size_t unit_max_flow(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& arcs,
                                 std::size_t s, std::size_t t) {
  std::vector<std::vector<int>> cap(n, std::vector<int>(n, 0));
  for (auto [a, b] : arcs) ++cap[a][b];
  std::size_t total = 0;
  for (;;) {
    std::vector<std::size_t> parent(n, n);
    parent[s] = s;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty() && parent[t] == n) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n; ++v)
        if (parent[v] == n && cap[u][v] > 0) {
          parent[v] = u;
          q.push(v);
        }
    }
    if (parent[t] == n) return total;
    for (std::size_t v = t; v != s; v = parent[v]) {
      --cap[parent[v]][v];
      ++cap[v][parent[v]];
    }
    ++total;
  }
}

inline std::vector<bool> reachable_from(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& arcs,
                                        std::size_t s) {
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (auto [a, b] : arcs)
      if (a == u && !seen[b]) {
        seen[b] = true;
        stack.push_back(b);
      }
  }
  return seen;
}

}  // namespace detail

inline InstanceFile generate_instance(const GenerateOptions& opt) {
  if (opt.nodes < 2) throw InvalidInstance("generate: need at least 2 nodes");
  if (opt.links < 1) throw InvalidInstance("generate: need at least 1 link");
  if (opt.requests < 1) throw InvalidInstance("generate: need at least 1 request");
  if (!(opt.area > 0.0)) throw InvalidInstance("generate: area must be positive");

  InstanceFile f;
  f.params = RadioParams(opt.alpha, opt.beta, opt.noise, opt.epsilon);
  f.power_mode = opt.mode;
  const double floor_snr = (1.0 + opt.epsilon) * opt.beta;  // required S_e / N
  detail::Draw draw(opt.seed);

  const std::size_t n = opt.nodes;
  for (std::size_t i = 0; i < n; ++i)
    f.nodes.push_back(Node{static_cast<int>(i), draw.unit() * opt.area, draw.unit() * opt.area});

  // Neighbours of every node by distance, ties by id.
  std::vector<std::vector<std::size_t>> nearest(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v)
      if (v != u && distance(f.nodes[u], f.nodes[v]) > 0.0) nearest[u].push_back(v);
    std::sort(nearest[u].begin(), nearest[u].end(), [&](std::size_t a, std::size_t b) {
      const double da = distance(f.nodes[u], f.nodes[a]), db = distance(f.nodes[u], f.nodes[b]);
      return da != db ? da < db : a < b;
    });
    if (nearest[u].size() > 3) nearest[u].resize(3);
  }

  if (opt.mode == PowerMode::limited) {
    if (!(opt.power_min > 0.0) || !(opt.power_max >= opt.power_min))
      throw InvalidInstance("generate: power range needs 0 < min <= max");
    f.power_range = PowerRange{opt.power_min, opt.power_max};
  }
  double max_len = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : nearest[u]) max_len = std::max(max_len, distance(f.nodes[u], f.nodes[v]));
  if (opt.mode == PowerMode::linear)
    f.power_constant = opt.power_constant.value_or(std::max(1.0, 2.0 * floor_snr * opt.noise));
  if (opt.mode == PowerMode::uniform)
    f.power_constant =
        opt.power_constant.value_or(std::max(1.0, 2.0 * floor_snr * opt.noise * std::pow(max_len, opt.alpha)));

  // Candidate links must meet the SNR floor at the power they will get.
  auto admissible = [&](std::size_t u, std::size_t v) {
    const double len = std::pow(distance(f.nodes[u], f.nodes[v]), opt.alpha);
    switch (opt.mode) {
      case PowerMode::linear: return *f.power_constant / opt.noise >= floor_snr;
      case PowerMode::uniform: return *f.power_constant / len / opt.noise >= floor_snr;
      case PowerMode::limited: return opt.power_min / len / opt.noise >= floor_snr;
      case PowerMode::given: return true;
    }
    return true;
  };

  constexpr int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    f.links.clear();
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (std::size_t j = 0; j < opt.links; ++j) {
      std::optional<std::pair<std::size_t, std::size_t>> pick;
      for (int tries = 0; tries < 64; ++tries) {
        const std::size_t u = draw.index(n);
        if (nearest[u].empty()) continue;
        const std::size_t v = nearest[u][draw.index(nearest[u].size())];
        if (!admissible(u, v)) continue;
        // Prefer fresh pairs; repeats are allowed once tries run low.
        const bool repeat = std::find(arcs.begin(), arcs.end(), std::pair{u, v}) != arcs.end();
        pick = std::pair{u, v};
        if (!repeat || tries >= 48) break;
        pick.reset();
      }
      if (!pick) throw InvalidInstance("generate: no admissible link under the SNR floor");
      arcs.push_back(*pick);
      LinkSpec l{static_cast<int>(j), static_cast<int>(pick->first), static_cast<int>(pick->second), std::nullopt};
      if (opt.mode == PowerMode::given) {
        // Powers spread over four octaves above the SNR floor.
        const double floor_power =
            floor_snr * opt.noise * std::pow(distance(f.nodes[pick->first], f.nodes[pick->second]), opt.alpha);
        l.power = std::max(std::exp2(4.0 * draw.unit()), 2.0 * floor_power);
      }
      f.links.push_back(l);
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t s = 0; s < n; ++s) {
      const std::vector<bool> seen = detail::reachable_from(n, arcs, s);
      for (std::size_t t = 0; t < n; ++t)
        if (t != s && seen[t]) pairs.emplace_back(s, t);
    }
    if (pairs.empty()) continue;

    f.requests.clear();
    for (std::size_t i = 0; i < opt.requests; ++i) {
      const auto [s, t] = pairs[draw.index(pairs.size())];
      const double cap = std::min(static_cast<double>(n), static_cast<double>(detail::unit_max_flow(n, arcs, s, t)));
      const double demand = 1.0 + draw.unit() * (cap - 1.0);
      f.requests.push_back(Request{static_cast<int>(s), static_cast<int>(t), demand});
    }
    return f;
  }
  throw InvalidInstance("generate: could not produce a routable request");
}

}  // namespace sinrflow
