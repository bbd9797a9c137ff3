#pragma once

// Message dependency graph.
//
// Vertices are received messages, merged by identity. A confirm depends on
// the announce it carries and a conflict on its original. A vertex is live
// when its dependency chain bottoms out in a received announce; everything
// else (unmatched messages, cycles, non-announce sinks) is tombstoned.
// Tombstoned vertices are kept, so a late-arriving original revives its
// dependents.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sand/message.hpp"

namespace sand {

namespace detail {

/// Generic pruning on an index graph: drops every vertex on a cycle, then
/// repeatedly drops non-announce vertices that have no surviving successor
/// or any removed successor. Returns the survivors.
inline std::vector<bool> prune_dependencies(const std::vector<bool>& is_announce,
                                            const std::vector<std::vector<std::size_t>>& out) {
  const std::size_t n = is_announce.size();
  std::vector<bool> alive(n, true);

  // Tarjan SCC, iterative.
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  int counter = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, i] = work.back();
      if (i < out[v].size()) {
        const std::size_t w = out[v][i++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != done);
        bool self_loop = false;
        for (std::size_t s : out[done]) self_loop = self_loop || s == done;
        if (comp.size() > 1 || self_loop) {
          for (std::size_t c : comp) alive[c] = false;
        }
      }
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (!alive[v] || is_announce[v]) continue;
      bool ok = !out[v].empty();
      for (std::size_t w : out[v]) ok = ok && alive[w];
      if (!ok) {
        alive[v] = false;
        changed = true;
      }
    }
  }
  return alive;
}

}  // namespace detail

class DepGraph {
 public:
  struct Vertex {
    Message message;
    bool live = false;
  };

  /// Inserts a message. Returns false when an identical message was already
  /// present (merged). `revived` receives the keys that became live.
  bool insert(const Message& m, std::vector<std::string>* revived = nullptr) {
    if (vertices_.count(m.key())) return false;
    vertices_.emplace(m.key(), Vertex{m, false});
    const Message* dep = m.original();
    if (m.kind() == MessageKind::Announce) {
      make_live(m.key(), revived);
    } else if (dep && is_live(dep->key())) {
      make_live(m.key(), revived);
    } else if (dep) {
      waiting_.emplace(dep->key(), m.key());
    }
    return true;
  }

  bool contains(const std::string& key) const { return vertices_.count(key) > 0; }

  bool is_live(const std::string& key) const {
    auto it = vertices_.find(key);
    return it != vertices_.end() && it->second.live;
  }

  std::size_t size() const { return vertices_.size(); }

  const std::map<std::string, Vertex>& vertices() const { return vertices_; }

  /// True iff a live confirm by `by` of an announce from `of` is present.
  bool confirmed(const Point& by, const Point& of) const { return confirm_pairs_.count({by, of}) > 0; }

  std::vector<Message> live_messages() const {
    std::vector<Message> out;
    for (const auto& [k, v] : vertices_) {
      if (v.live) out.push_back(v.message);
    }
    return out;
  }

  std::vector<Message> tombstones() const {
    std::vector<Message> out;
    for (const auto& [k, v] : vertices_) {
      if (!v.live) out.push_back(v.message);
    }
    return out;
  }

  /// Batch construction from a full message list, via generic pruning.
  static DepGraph rebuild(const std::vector<Message>& messages) {
    std::map<std::string, Message> unique;
    for (const auto& m : messages) unique.emplace(m.key(), m);
    std::map<std::string, std::size_t> idx;
    std::vector<Message> order;
    for (const auto& [k, m] : unique) {
      idx.emplace(k, order.size());
      order.push_back(m);
    }
    std::vector<bool> is_announce(order.size());
    std::vector<std::vector<std::size_t>> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      is_announce[i] = order[i].kind() == MessageKind::Announce;
      if (const Message* dep = order[i].original()) {
        auto it = idx.find(dep->key());
        if (it != idx.end()) out[i].push_back(it->second);
      }
    }
    const auto alive = detail::prune_dependencies(is_announce, out);
    DepGraph g;
    for (std::size_t i = 0; i < order.size(); ++i) {
      g.vertices_.emplace(order[i].key(), Vertex{order[i], static_cast<bool>(alive[i])});
      if (alive[i]) g.note_live(order[i]);
      if (!alive[i] && order[i].original()) {
        g.waiting_.emplace(order[i].original()->key(), order[i].key());
      }
    }
    return g;
  }

  /// Same vertices with the same live/tombstone split.
  friend bool operator==(const DepGraph& a, const DepGraph& b) {
    if (a.vertices_.size() != b.vertices_.size()) return false;
    for (const auto& [k, v] : a.vertices_) {
      auto it = b.vertices_.find(k);
      if (it == b.vertices_.end() || it->second.live != v.live) return false;
    }
    return true;
  }

 private:
  void make_live(const std::string& key, std::vector<std::string>* revived) {
    std::vector<std::string> todo{key};
    while (!todo.empty()) {
      std::string k = std::move(todo.back());
      todo.pop_back();
      auto& v = vertices_.at(k);
      if (v.live) continue;
      v.live = true;
      note_live(v.message);
      if (revived) revived->push_back(k);
      auto [lo, hi] = waiting_.equal_range(k);
      for (auto it = lo; it != hi; ++it) todo.push_back(it->second);
      waiting_.erase(lo, hi);
    }
  }

  void note_live(const Message& m) {
    if (m.kind() == MessageKind::Confirm) confirm_pairs_.emplace(m.claimed_sender(), m.original()->claimed_sender());
  }

  std::map<std::string, Vertex> vertices_;
  std::set<std::pair<Point, Point>> confirm_pairs_;  // (confirmer, announcer), live only
  std::multimap<std::string, std::string> waiting_;  // missing dependency -> dependents
};

/// Functional form: the graph after inserting one received record.
inline DepGraph dep_update(DepGraph dep, const ReceivedRecord& rec) {
  dep.insert(rec.message);
  return dep;
}

}  // namespace sand
