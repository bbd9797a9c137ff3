#pragma once

// Universes: maximal conflict-free sets of announced identities.
//
// The conflict graph has one vertex per announced identity in the
// neighborhood and an edge for every live conflict message "from a about
// b". Universes are its maximal independent sets, which makes them
// conflict-aware: an identity that conflicts with no member is always added.
// The number of universes is exponential in the number of disjoint conflict
// pairs, so enumeration stops at a size cap and hands the graph over as is.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sand/dep_graph.hpp"

namespace sand {

using Universe = std::vector<Point>;  // sorted

inline constexpr std::size_t kDefaultUniverseCap = 64;

struct ConflictGraph {
  std::vector<Point> identities;  // sorted
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j, sorted, unique

  std::optional<std::size_t> index_of(const Point& p) const {
    auto it = std::lower_bound(identities.begin(), identities.end(), p);
    if (it == identities.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - identities.begin());
  }

  bool adjacent(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::pair{a, b});
  }

  bool conflicting(const Point& a, const Point& b) const {
    auto i = index_of(a);
    auto j = index_of(b);
    return i && j && adjacent(*i, *j);
  }

  /// First edge with both ends in `u`, if any.
  std::optional<std::pair<std::size_t, std::size_t>> conflict_within(const Universe& u) const {
    std::vector<char> in(identities.size(), 0);
    for (const auto& p : u) {
      if (auto i = index_of(p)) in[*i] = 1;
    }
    for (const auto& e : edges) {
      if (in[e.first] && in[e.second]) return e;
    }
    return std::nullopt;
  }

  bool independent(const Universe& u) const { return !conflict_within(u); }

  /// True iff `u` is one of the maximal independent sets.
  bool is_universe(const Universe& u) const {
    std::vector<char> in(identities.size(), 0), blocked(identities.size(), 0);
    for (const auto& p : u) {
      auto i = index_of(p);
      if (!i) return false;
      in[*i] = 1;
    }
    for (const auto& [a, b] : edges) {
      if (in[a] && in[b]) return false;
      if (in[a]) blocked[b] = 1;
      if (in[b]) blocked[a] = 1;
    }
    for (std::size_t i = 0; i < identities.size(); ++i) {
      if (!in[i] && !blocked[i]) return false;
    }
    return true;
  }
};

struct UniverseSet {
  ConflictGraph graph;
  std::vector<Universe> universes;  // empty when overflow
  bool overflow = false;
};

namespace detail {

// Bron-Kerbosch with pivoting over the complement graph (cliques of the
// complement are independent sets of the conflict graph). n <= 64.
inline void maximal_independent_sets(std::uint64_t r, std::uint64_t p, std::uint64_t x,
                                     const std::vector<std::uint64_t>& compat,
                                     std::vector<std::uint64_t>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  const std::uint64_t px = p | x;
  const int pivot = std::countr_zero(px);
  std::uint64_t candidates = p & ~compat[static_cast<std::size_t>(pivot)];
  while (candidates) {
    const int v = std::countr_zero(candidates);
    const std::uint64_t bit = std::uint64_t{1} << v;
    candidates &= candidates - 1;
    maximal_independent_sets(r | bit, p & compat[static_cast<std::size_t>(v)],
                             x & compat[static_cast<std::size_t>(v)], compat, out);
    p &= ~bit;
    x |= bit;
  }
}

}  // namespace detail

/// Enumerates all universes of a conflict graph, or flags overflow when the
/// graph has more identities than `cap`.
inline UniverseSet enumerate_universes(ConflictGraph graph, std::size_t cap = kDefaultUniverseCap) {
  UniverseSet set;
  set.graph = std::move(graph);
  const std::size_t n = set.graph.identities.size();
  if (n > std::min<std::size_t>(cap, 64)) {
    set.overflow = true;
    return set;
  }
  if (n == 0) {
    set.universes.push_back({});
    return set;
  }
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  std::vector<std::uint64_t> compat(n, all);
  for (std::size_t i = 0; i < n; ++i) compat[i] &= ~(std::uint64_t{1} << i);
  for (auto [a, b] : set.graph.edges) {
    compat[a] &= ~(std::uint64_t{1} << b);
    compat[b] &= ~(std::uint64_t{1} << a);
  }
  std::vector<std::uint64_t> masks;
  detail::maximal_independent_sets(0, all, 0, compat, masks);
  for (auto m : masks) {
    Universe u;
    for (std::size_t i = 0; i < n; ++i) {
      if (m & (std::uint64_t{1} << i)) u.push_back(set.graph.identities[i]);
    }
    set.universes.push_back(std::move(u));
  }
  std::sort(set.universes.begin(), set.universes.end());
  return set;
}

inline ConflictGraph make_conflict_graph(std::vector<Point> identities,
                                         const std::vector<std::pair<Point, Point>>& conflicts) {
  ConflictGraph g;
  std::sort(identities.begin(), identities.end());
  identities.erase(std::unique(identities.begin(), identities.end()), identities.end());
  g.identities = std::move(identities);
  for (const auto& [a, b] : conflicts) {
    auto i = g.index_of(a);
    auto j = g.index_of(b);
    if (!i || !j || *i == *j) continue;
    g.edges.emplace_back(std::min(*i, *j), std::max(*i, *j));
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

/// Universes at node `self` from its dependency graph and its own conflict
/// observations. A message the node itself found conflicting contributes
/// neither an identity nor a conflict edge.
inline UniverseSet universes_from(const DepGraph& dep, const std::vector<ConflictRecord>& conflicts,
                                  const Point& self, const RadioParams& params,
                                  std::size_t cap = kDefaultUniverseCap) {
  std::set<std::string> discredited;
  for (const auto& c : conflicts) discredited.insert(c.subject.key());

  auto local = [&](const Point& p) { return p != self && distance(p, self) <= params.d_n; };
  std::vector<Point> ids;
  std::vector<std::pair<Point, Point>> edges;
  for (const auto& [key, v] : dep.vertices()) {
    if (!v.live || discredited.count(key)) continue;
    const Message& m = v.message;
    if (m.kind() == MessageKind::Announce && local(m.claimed_sender())) {
      ids.push_back(m.claimed_sender());
    } else if (m.kind() == MessageKind::Conflict) {
      edges.emplace_back(m.claimed_sender(), m.original()->claimed_sender());
    }
  }
  return enumerate_universes(make_conflict_graph(std::move(ids), edges), cap);
}

}  // namespace sand
