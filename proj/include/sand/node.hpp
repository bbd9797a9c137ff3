#pragma once

// The neighborhood-discovery state machine of one correct node.
//
// Physical receipt (deliver) and processing (process_next) are separate:
// the radio inserts a record into the inbox at transmission time, and the
// node handles it whenever the scheduler lets it. Implicit-conflict checks
// consult the inbox, never the processed prefix, so a slow node does not
// invent conflicts.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sand/universe.hpp"

namespace sand {

enum class Receipt { Ignore, Consistent, ExplicitConflict };

inline const char* to_string(Receipt r) {
  switch (r) {
    case Receipt::Ignore: return "ignore";
    case Receipt::Consistent: return "consistent";
    case Receipt::ExplicitConflict: return "explicit_conflict";
  }
  return "?";
}

class NodeState {
 public:
  NodeState(const Point& self, const RadioParams& params,
            std::size_t universe_cap = kDefaultUniverseCap)
      : self_(self), params_(params), universe_cap_(universe_cap) {}

  const Point& self_position() const { return self_; }
  const RadioParams& params() const { return params_; }

  /// Emits the node's single announce; later calls emit nothing.
  std::vector<Message> on_init() {
    if (announced_) return {};
    announced_ = true;
    Message a = Message::announce(self_);
    sent_.insert(a.key());
    return {a};
  }

  bool announced() const { return announced_; }

  /// Physical receipt: appends to the inbox without processing.
  const ReceivedRecord& deliver(const Message& m, double rss) {
    inbox_.push_back({m, rss, inbox_.size()});
    inbox_keys_.insert(m.key());
    return inbox_.back();
  }

  bool has_unprocessed() const { return processed_ < inbox_.size(); }
  std::size_t processed_count() const { return processed_; }

  /// Processes the oldest unprocessed inbox record.
  std::vector<Message> process_next() {
    const ReceivedRecord& rec = inbox_.at(processed_++);
    if (classify_receipt(rec) == Receipt::Ignore) return {};
    return on_receive(rec);
  }

  Receipt classify_receipt(const ReceivedRecord& rec) const {
    const Message& m = rec.message;
    for (const auto& id : m.identities()) {
      if (distance(id, self_) > params_.d_n) return Receipt::Ignore;
    }
    const Point& claim = m.claimed_sender();
    // A message claiming this node's own position (or one closer than any
    // real sender can be) cannot have been sent from there.
    if (distance(claim, self_) < params_.r_min_sep) return Receipt::ExplicitConflict;
    const double expected = expected_rss_from_claim(params_, claim, self_);
    return rss_matches(rec.measured_rss, expected, tolerance_) ? Receipt::Consistent
                                                               : Receipt::ExplicitConflict;
  }

  /// Handles a non-ignored record and returns the messages to transmit.
  std::vector<Message> on_receive(const ReceivedRecord& rec) {
    std::vector<Message> out;
    const Message& m = rec.message;
    const Receipt cls = classify_receipt(rec);
    if (cls == Receipt::Ignore) return out;

    insert_into_dep(m);
    if (cls == Receipt::ExplicitConflict) {
      record_conflict(m, ConflictKind::Explicit, out);
      return out;
    }
    switch (m.kind()) {
      case MessageKind::Announce:
        if (confirmed_.insert(m.key()).second) {
          Message c = Message::confirm(self_, m);
          sent_.insert(c.key());
          out.push_back(c);
        }
        break;
      case MessageKind::Confirm:
      case MessageKind::Conflict:
        check_implicit(*m.original(), out);
        break;
    }
    return out;
  }

  const std::vector<ReceivedRecord>& inbox() const { return inbox_; }
  const DepGraph& dep() const { return dep_; }
  const std::vector<ConflictRecord>& conflicts() const { return conflicts_; }

  const UniverseSet& universes() const {
    if (dirty_) {
      cache_ = universes_from(dep_, conflicts_, self_, params_, universe_cap_);
      dirty_ = false;
    }
    return cache_;
  }

  /// Incremented whenever a new announce or conflict becomes relevant.
  std::size_t activity() const { return activity_; }
  /// Incremented on every change to the dependency graph or conflict list.
  std::size_t revision() const { return revision_; }

  /// Adopts the detector pointer as output. A set containing a conflicting
  /// pair is rejected.
  void adopt_detector_output(const std::optional<Universe>& pointed) {
    if (pointed) {
      const auto& g = universes().graph;
      if (auto e = g.conflict_within(*pointed)) {
        throw ContractViolation("detector pointed to a set with conflicting members " +
                                to_string(g.identities[e->first]) + " and " +
                                to_string(g.identities[e->second]));
      }
    }
    pointer_ = pointed;
    output_ = pointed;
  }

  const std::optional<Universe>& detector_pointer() const { return pointer_; }
  const std::optional<Universe>& output() const { return output_; }

  void set_tolerance(double t) { tolerance_ = t; }

 private:
  void insert_into_dep(const Message& m) {
    std::vector<std::string> revived;
    dep_.insert(m, &revived);
    ++revision_;
    for (const auto& k : revived) {
      const auto& v = dep_.vertices().at(k);
      if (v.message.kind() != MessageKind::Confirm) {
        dirty_ = true;
        ++activity_;
      }
    }
  }

  void record_conflict(const Message& subject, ConflictKind kind, std::vector<Message>& out) {
    if (!conflicted_.insert(subject.key()).second) return;
    conflicts_.push_back({subject, kind, self_});
    ++revision_;
    dirty_ = true;
    ++activity_;
    Message c = Message::conflict(self_, subject);
    sent_.insert(c.key());
    out.push_back(c);
  }

  // The original should have reached this node if it really came from its
  // claimed sender; if it is not in the inbox the conflict is implicit.
  void check_implicit(const Message& original, std::vector<Message>& out) {
    const Point& k = original.claimed_sender();
    bool should_have;
    if (distance(k, self_) < params_.r_min_sep) {
      // Attributed to this node: only messages it actually sent are genuine.
      if (sent_.count(original.key())) return;
      should_have = true;
    } else {
      should_have = expected_rss_from_claim(params_, k, self_) >= params_.r_min;
    }
    if (should_have && !inbox_keys_.count(original.key())) {
      record_conflict(original, ConflictKind::Implicit, out);
    }
  }

  Point self_;
  RadioParams params_;
  std::size_t universe_cap_;
  double tolerance_ = kRssTolerance;

  bool announced_ = false;
  std::vector<ReceivedRecord> inbox_;
  std::set<std::string> inbox_keys_;
  std::size_t processed_ = 0;
  std::set<std::string> sent_;
  std::set<std::string> confirmed_;
  std::set<std::string> conflicted_;

  DepGraph dep_;
  std::vector<ConflictRecord> conflicts_;
  std::size_t activity_ = 0;
  std::size_t revision_ = 0;

  mutable bool dirty_ = true;
  mutable UniverseSet cache_;

  std::optional<Universe> pointer_;
  std::optional<Universe> output_;
};

}  // namespace sand
