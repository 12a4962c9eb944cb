#pragma once

// Geometry and radio physics of a wireless instance: distances, received
// powers, affectance, the SNR assumption and signal buckets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sinrflow {

// Global absolute tolerance for threshold comparisons.
inline constexpr double kTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class ZeroDistance : public Error {
 public:
  using Error::Error;
};

class SnrTooLow : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class LinkBelowThreshold : public Error {
 public:
  explicit LinkBelowThreshold(std::vector<int> ids)
      : Error(describe(ids)), link_ids_(std::move(ids)) {}

  const std::vector<int>& link_ids() const { return link_ids_; }

 private:
  static std::string describe(const std::vector<int>& ids) {
    std::ostringstream os;
    os << "links with SNR below beta:";
    for (int id : ids) os << ' ' << id;
    return os.str();
  }

  std::vector<int> link_ids_;
};

enum class Objective { max_throughput, max_min };

inline const char* to_string(Objective o) {
  return o == Objective::max_throughput ? "maxth" : "maxmin";
}

struct RadioParams {
  double alpha;
  double beta;
  double noise;
  double epsilon;

  RadioParams(double alpha_, double beta_, double noise_, double epsilon_)
      : alpha(alpha_), beta(beta_), noise(noise_), epsilon(epsilon_) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw InvalidInstance("alpha must be finite and >= 0");
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw InvalidInstance("beta must be finite and > 0");
    if (!(noise > 0.0) || !std::isfinite(noise))
      throw InvalidInstance("noise must be finite and > 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw InvalidInstance("epsilon must be finite and > 0");
  }

  bool operator==(const RadioParams&) const = default;
};

struct Node {
  int id;
  double x;
  double y;

  bool operator==(const Node&) const = default;
};

struct Link {
  int id;
  int tx;
  int rx;
  double power;

  bool operator==(const Link&) const = default;
};

struct Request {
  int source;
  int sink;
  double demand;

  bool operator==(const Request&) const = default;
};

inline double distance(const Node& a, const Node& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Indices into Instance::links().
using LinkSet = std::vector<std::size_t>;

// Immutable problem instance. Links and nodes are addressed by position
// (index) internally; ids are kept for I/O.
class Instance {
 public:
  Instance(RadioParams params, std::vector<Node> nodes, std::vector<Link> links,
           std::vector<Request> requests)
      : params_(params),
        nodes_(std::move(nodes)),
        links_(std::move(links)),
        requests_(std::move(requests)) {
    if (nodes_.size() < 2) throw InvalidInstance("instance needs at least 2 nodes");
    if (links_.empty()) throw InvalidInstance("instance needs at least 1 link");
    if (requests_.empty()) throw InvalidInstance("instance needs at least 1 request");

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& v = nodes_[i];
      if (!std::isfinite(v.x) || !std::isfinite(v.y))
        throw InvalidInstance("node " + std::to_string(v.id) + " has non-finite coordinates");
      if (!node_index_.emplace(v.id, i).second)
        throw InvalidInstance("duplicate node id " + std::to_string(v.id));
    }
    lengths_.reserve(links_.size());
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const Link& e = links_[i];
      if (!link_index_.emplace(e.id, i).second)
        throw InvalidInstance("duplicate link id " + std::to_string(e.id));
      if (!node_index_.contains(e.tx) || !node_index_.contains(e.rx))
        throw InvalidInstance("link " + std::to_string(e.id) + " references an unknown node");
      if (e.tx == e.rx)
        throw InvalidInstance("link " + std::to_string(e.id) + " has tx == rx");
      if (!(e.power > 0.0) || !std::isfinite(e.power))
        throw InvalidInstance("link " + std::to_string(e.id) + " needs a positive power");
      const double d = distance(node(e.tx), node(e.rx));
      if (!(d > 0.0))
        throw ZeroDistance("link " + std::to_string(e.id) + " has co-located endpoints");
      lengths_.push_back(d);
    }
    const double n = static_cast<double>(nodes_.size());
    for (const Request& r : requests_) {
      if (!node_index_.contains(r.source) || !node_index_.contains(r.sink))
        throw InvalidInstance("request references an unknown node");
      if (r.source == r.sink) throw InvalidInstance("request has source == sink");
      if (!(r.demand > 0.0) || r.demand > n)
        throw InvalidInstance("request demand must lie in (0, n]");
    }
  }

  const RadioParams& params() const { return params_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Request>& requests() const { return requests_; }

  std::size_t n() const { return nodes_.size(); }
  std::size_t m() const { return links_.size(); }
  std::size_t k() const { return requests_.size(); }

  std::size_t node_index(int id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) throw InvalidInstance("unknown node id " + std::to_string(id));
    return it->second;
  }
  std::size_t link_index(int id) const {
    auto it = link_index_.find(id);
    if (it == link_index_.end()) throw InvalidInstance("unknown link id " + std::to_string(id));
    return it->second;
  }
  bool has_link(int id) const { return link_index_.contains(id); }

  const Node& node(int id) const { return nodes_[node_index(id)]; }
  const Link& link(std::size_t e) const { return links_.at(e); }
  const Node& tx(std::size_t e) const { return node(links_.at(e).tx); }
  const Node& rx(std::size_t e) const { return node(links_.at(e).rx); }

  // d_e
  double length(std::size_t e) const { return lengths_.at(e); }

  // Copy with every link power replaced (same order as links()).
  Instance with_powers(std::span<const double> powers) const {
    if (powers.size() != links_.size()) throw InvalidInstance("power vector size mismatch");
    std::vector<Link> links = links_;
    for (std::size_t i = 0; i < links.size(); ++i) links[i].power = powers[i];
    return Instance(params_, nodes_, std::move(links), requests_);
  }

 private:
  RadioParams params_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<Request> requests_;
  std::vector<double> lengths_;
  std::unordered_map<int, std::size_t> node_index_;
  std::unordered_map<int, std::size_t> link_index_;
};

// S_e = P_e / d_e^alpha
inline double received_power(const Instance& inst, std::size_t e) {
  const double d = inst.length(e);
  if (!(d > 0.0)) throw ZeroDistance("link has zero length");
  return inst.link(e).power / std::pow(d, inst.params().alpha);
}

// S_{e'e} = P_{e'} / d(s_{e'}, r_e)^alpha. Not symmetric.
inline double cross_power(const Instance& inst, std::size_t interferer, std::size_t victim) {
  const double d = distance(inst.tx(interferer), inst.rx(victim));
  if (!(d > 0.0))
    throw ZeroDistance("transmitter of link " + std::to_string(inst.link(interferer).id) +
                       " is co-located with receiver of link " +
                       std::to_string(inst.link(victim).id));
  return inst.link(interferer).power / std::pow(d, inst.params().alpha);
}

// gamma_e = beta * S_e / (S_e - beta * N)
inline double gamma(const Instance& inst, std::size_t e) {
  const RadioParams& p = inst.params();
  const double s = received_power(inst, e);
  if (!(s > p.beta * p.noise))
    throw SnrTooLow("link " + std::to_string(inst.link(e).id) + " has S_e <= beta * N");
  return p.beta * s / (s - p.beta * p.noise);
}

enum class Affectance { hat, plain, bar };

// Affectance of `interferer` on `victim`. Self-affectance is 0. A transmitter
// sitting on the victim's receiver has unbounded affectance: the bar variant
// clamps it to 1, the others throw ZeroDistance.
inline double affectance(const Instance& inst, std::size_t interferer, std::size_t victim,
                         Affectance variant) {
  if (interferer == victim) return 0.0;
  if (variant == Affectance::bar && !(distance(inst.tx(interferer), inst.rx(victim)) > 0.0))
    return 1.0;
  const double hat = cross_power(inst, interferer, victim) / received_power(inst, victim);
  switch (variant) {
    case Affectance::hat:
      return hat;
    case Affectance::plain:
      return gamma(inst, victim) * hat;
    case Affectance::bar:
      return std::min(1.0, gamma(inst, victim) * hat);
  }
  return hat;
}

// a_L(e): sum over L \ {e}.
inline double set_affectance(const Instance& inst, std::span<const std::size_t> links,
                             std::size_t victim, Affectance variant) {
  double sum = 0.0;
  for (std::size_t e : links)
    if (e != victim) sum += affectance(inst, e, victim, variant);
  return sum;
}

// Boosts links with beta <= S_e/N < (1+eps)*beta by (1+eps), once.
inline Instance enforce_snr_assumption(const Instance& inst) {
  const RadioParams& p = inst.params();
  std::vector<double> powers(inst.m());
  std::vector<int> rejected;
  for (std::size_t e = 0; e < inst.m(); ++e) {
    const double snr = received_power(inst, e) / p.noise;
    powers[e] = inst.link(e).power;
    if (snr >= (1.0 + p.epsilon) * p.beta) continue;
    if (snr >= p.beta - kTolerance)
      powers[e] *= 1.0 + p.epsilon;
    else
      rejected.push_back(inst.link(e).id);
  }
  if (!rejected.empty()) throw LinkBelowThreshold(std::move(rejected));
  return inst.with_powers(powers);
}

inline bool satisfies_snr_assumption(const Instance& inst) {
  const RadioParams& p = inst.params();
  for (std::size_t e = 0; e < inst.m(); ++e)
    if (received_power(inst, e) / p.noise < (1.0 + p.epsilon) * p.beta * (1.0 - 1e-12)) return false;
  return true;
}

struct BucketPartition {
  double s_min = 0.0;
  std::map<int, LinkSet> buckets;  // bucket index -> links (ascending index)
  std::vector<int> bucket_of;      // per link

  std::size_t sigma() const { return buckets.size(); }
};

// floor(log2(ratio)) with exact half-open boundaries [2^i, 2^{i+1}).
inline int bucket_index(double ratio) {
  int i = static_cast<int>(std::floor(std::log2(ratio)));
  while (std::ldexp(1.0, i + 1) <= ratio) ++i;
  while (i > 0 && std::ldexp(1.0, i) > ratio) --i;
  return std::max(i, 0);
}

inline BucketPartition partition_buckets(const Instance& inst) {
  BucketPartition part;
  std::vector<double> s(inst.m());
  for (std::size_t e = 0; e < inst.m(); ++e) s[e] = received_power(inst, e);
  part.s_min = *std::min_element(s.begin(), s.end());
  part.bucket_of.resize(inst.m());
  for (std::size_t e = 0; e < inst.m(); ++e) {
    const int b = bucket_index(s[e] / part.s_min);
    part.bucket_of[e] = b;
    part.buckets[b].push_back(e);
  }
  return part;
}

// ceil(alpha * log2(Delta) + log2(Gamma)), the signal-diversity bound.
inline int diversity_bound(const Instance& inst) {
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
  for (std::size_t e = 0; e < inst.m(); ++e) {
    dmin = std::min(dmin, inst.length(e));
    dmax = std::max(dmax, inst.length(e));
    pmin = std::min(pmin, inst.link(e).power);
    pmax = std::max(pmax, inst.link(e).power);
  }
  return static_cast<int>(
      std::ceil(inst.params().alpha * std::log2(dmax / dmin) + std::log2(pmax / pmin)));
}

// Strict total order "a is longer than b": length descending, ties by
// ascending link id.
inline bool longer(const Instance& inst, std::size_t a, std::size_t b) {
  const double da = inst.length(a), db = inst.length(b);
  if (da != db) return da > db;
  return inst.link(a).id < inst.link(b).id;
}

inline LinkSet descending_length_order(const Instance& inst, std::span<const std::size_t> links) {
  LinkSet order(links.begin(), links.end());
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return longer(inst, a, b); });
  return order;
}

inline LinkSet all_links(const Instance& inst) {
  LinkSet all(inst.m());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

// Dense table of bar-affectances plus the length order, shared by the LP,
// coloring and dispersion stages. Can also be built from an explicit matrix.
class AffectanceTable {
 public:
  // `bar` is row-major size*size with bar[from*size + to] = abar_from(to);
  // `order` lists every link longest-first.
  AffectanceTable(std::vector<double> bar, std::vector<std::size_t> order)
      : size_(order.size()), bar_(std::move(bar)), order_(std::move(order)), rank_(size_) {
    if (bar_.size() != size_ * size_) throw InvalidInstance("affectance matrix size mismatch");
    std::vector<bool> seen(size_, false);
    for (std::size_t pos = 0; pos < size_; ++pos) {
      const std::size_t e = order_[pos];
      if (e >= size_ || seen[e]) throw InvalidInstance("order is not a permutation");
      seen[e] = true;
      rank_[e] = pos;
    }
    for (std::size_t e = 0; e < size_; ++e) bar_[e * size_ + e] = 0.0;
  }

  static AffectanceTable from_instance(const Instance& inst) {
    const std::size_t m = inst.m();
    std::vector<double> bar(m * m, 0.0);
    for (std::size_t from = 0; from < m; ++from)
      for (std::size_t to = 0; to < m; ++to)
        if (from != to) bar[from * m + to] = affectance(inst, from, to, Affectance::bar);
    return AffectanceTable(std::move(bar), descending_length_order(inst, all_links(inst)));
  }

  std::size_t size() const { return size_; }
  double bar(std::size_t from, std::size_t to) const { return bar_[from * size_ + to]; }
  // w(a,b) = abar_a(b) + abar_b(a)
  double weight(std::size_t a, std::size_t b) const { return bar(a, b) + bar(b, a); }
  bool precedes(std::size_t a, std::size_t b) const { return rank_[a] < rank_[b]; }
  std::size_t rank(std::size_t e) const { return rank_[e]; }
  const std::vector<std::size_t>& order() const { return order_; }

  LinkSet sorted_longest_first(std::span<const std::size_t> links) const {
    LinkSet out(links.begin(), links.end());
    std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return rank_[a] < rank_[b]; });
    return out;
  }

  double in_affectance(std::span<const std::size_t> links, std::size_t victim) const {
    double sum = 0.0;
    for (std::size_t e : links)
      if (e != victim) sum += bar(e, victim);
    return sum;
  }

 private:
  std::size_t size_;
  std::vector<double> bar_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
};

}  // namespace sinrflow
