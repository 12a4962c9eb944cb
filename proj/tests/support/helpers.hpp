#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <numbers>
#include <random>
#include <vector>

#include "sinrflow/lp.hpp"
#include "sinrflow/model.hpp"
#include "sinrflow/verify.hpp"

namespace sinrflow::testing {

inline Instance line_instance(std::vector<std::pair<double, double>> points, std::vector<Link> links,
                              std::vector<Request> requests, RadioParams params = {2.0, 1.0, 1e-6, 0.5}) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < points.size(); ++i)
    nodes.push_back(Node{static_cast<int>(i), points[i].first, points[i].second});
  return Instance(params, std::move(nodes), std::move(links), std::move(requests));
}

inline AffectanceTable table_from(std::size_t size, const std::vector<std::vector<double>>& bar) {
  std::vector<double> flat(size * size, 0.0);
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = 0; b < size; ++b) flat[a * size + b] = bar[a][b];
  std::vector<std::size_t> order(size);
  for (std::size_t i = 0; i < size; ++i) order[i] = i;
  return AffectanceTable(std::move(flat), std::move(order));
}

// Symmetric table where w(a,b) = weight[a][b] split evenly over both
// directions; links are ordered 0 (longest) .. size-1.
inline AffectanceTable symmetric_weights(std::size_t size, const std::vector<std::vector<double>>& weight) {
  std::vector<std::vector<double>> bar(size, std::vector<double>(size, 0.0));
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = 0; b < size; ++b)
      if (a != b) bar[a][b] = weight[std::min(a, b)][std::max(a, b)] / 2.0;
  return table_from(size, bar);
}

// Random links whose received powers share one bucket: lengths are drawn
// first, then powers are set so S_e in [S0, 2 S0) with S0 well above the
// noise floor. Nodes are distinct per link (2 per link).
inline Instance random_bucket_links(std::mt19937_64& rng, std::size_t count, double area, double alpha = 2.0,
                                    double beta = 1.0, double epsilon = 0.5) {
  std::uniform_real_distribution<double> pos(0.0, area), len(1.0, 4.0), angle(0.0, 2.0 * std::numbers::pi),
      jitter(0.0, 0.999);
  const double noise = 1e-6;
  const double s0 = 1.0;
  std::vector<Node> nodes;
  std::vector<Link> links;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = pos(rng), y = pos(rng), d = len(rng), a = angle(rng);
    nodes.push_back(Node{static_cast<int>(2 * i), x, y});
    nodes.push_back(Node{static_cast<int>(2 * i + 1), x + d * std::cos(a), y + d * std::sin(a)});
    const double power = s0 * (1.0 + jitter(rng)) * std::pow(d, alpha);
    links.push_back(Link{static_cast<int>(i), static_cast<int>(2 * i), static_cast<int>(2 * i + 1), power});
  }
  return Instance(RadioParams(alpha, beta, noise, epsilon), std::move(nodes), std::move(links),
                  {Request{0, 1, 1.0}});
}

// Greedily keeps links (in index order) while the set stays SINR-feasible.
inline LinkSet greedy_feasible_subset(const Instance& inst, const LinkSet& candidates) {
  LinkSet chosen;
  for (std::size_t e : candidates) {
    chosen.push_back(e);
    if (!is_sinr_feasible(inst, chosen).feasible) chosen.pop_back();
  }
  return chosen;
}

// Brute-force LP optimum by enumerating basic solutions. Every vertex of
// {x >= 0, rows} is the solution of num_vars tight constraints. Only for
// tiny programs. Returns nullopt when infeasible; unbounded programs are not
// detected, so callers must keep the region bounded.
inline std::optional<double> vertex_enumeration_optimum(const LinearProgram& lp) {
  const std::size_t n = lp.num_variables();
  struct Row {
    std::vector<double> a;
    double b;
  };
  std::vector<Row> rows;
  for (std::size_t j = 0; j < n; ++j) {
    Row r{std::vector<double>(n, 0.0), 0.0};
    r.a[j] = 1.0;
    rows.push_back(r);
  }
  for (const Constraint& c : lp.constraints()) {
    Row r{std::vector<double>(n, 0.0), c.rhs};
    for (const Term& t : c.terms) r.a[t.var] += t.coef;
    rows.push_back(r);
  }
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  const std::size_t total = rows.size();
  // Iterate over all n-subsets of rows.
  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(std::min(n, total)), true);
  do {
    std::size_t p = 0;
    for (std::size_t i = 0; i < total; ++i)
      if (mask[i]) pick[p++] = i;
    // Gaussian elimination on the picked rows.
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m[i][j] = rows[pick[i]].a[j];
      m[i][n] = rows[pick[i]].b;
    }
    bool singular = false;
    for (std::size_t col = 0; col < n && !singular; ++col) {
      std::size_t piv = col;
      for (std::size_t i = col; i < n; ++i)
        if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
      if (std::abs(m[piv][col]) < 1e-10) {
        singular = true;
        break;
      }
      std::swap(m[piv], m[col]);
      for (std::size_t i = 0; i < n; ++i) {
        if (i == col) continue;
        const double factor = m[i][col] / m[col][col];
        for (std::size_t j = col; j <= n; ++j) m[i][j] -= factor * m[col][j];
      }
    }
    if (singular) continue;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
    if (lp.max_violation(x) > 1e-8) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective()[j] * x[j];
    if (!best || obj > *best) best = obj;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

}  // namespace sinrflow::testing
