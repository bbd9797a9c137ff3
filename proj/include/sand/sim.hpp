#pragma once

// Discrete-event asynchronous simulator.
//
// One atomic action per epoch: a correct node (or a shadow) transmits one
// pending message or processes one inbox record, or the adversary injects
// one transmission. Receipt is physical and immediate; processing waits for
// the scheduler. Weak fairness is enforced as a bound B on how long an
// enabled entity may be passed over.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sand/adversary.hpp"
#include "sand/detectors.hpp"
#include "sand/json_io.hpp"

namespace sand {

enum class SchedulerKind { RoundRobin, SeededRandom, AdversarialDelay };

inline const char* to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::RoundRobin: return "round_robin";
    case SchedulerKind::SeededRandom: return "seeded_random";
    case SchedulerKind::AdversarialDelay: return "adversarial_delay";
  }
  return "?";
}

struct SchedulerPolicy {
  SchedulerKind kind = SchedulerKind::RoundRobin;
  std::size_t fairness_bound = 0;  // 0: 4 * number of nodes
  std::uint64_t seed = 0;
};

struct TraceEvent {
  std::size_t epoch = 0;
  std::string kind;
  std::string node;
  ojson payload;
};

using Trace = std::vector<TraceEvent>;

inline std::string trace_line(const TraceEvent& e) {
  ojson j;
  j["epoch"] = e.epoch;
  j["kind"] = e.kind;
  j["node"] = e.node;
  j["payload"] = e.payload;
  return j.dump();
}

inline std::string trace_jsonl(const Trace& t) {
  std::string out;
  for (const auto& e : t) out += trace_line(e) + "\n";
  return out;
}

using DetectorFactory =
    std::function<std::unique_ptr<UniverseDetector>(const Point& self, const LayoutSpec& layout)>;

/// Oracle detector bound to each node's ground truth.
inline DetectorFactory oracle_factory() {
  return [](const Point& self, const LayoutSpec& layout) {
    return std::make_unique<OracleDetector>(layout.correct_neighbors(self));
  };
}

class World {
 public:
  World(LayoutSpec layout, SchedulerPolicy policy, DetectorFactory detectors = oracle_factory(),
        std::size_t universe_cap = kDefaultUniverseCap)
      : layout_(std::move(layout)), policy_(policy), rng_(policy.seed), cap_(universe_cap) {
    layout_.validate();
    for (std::size_t i = 0; i < layout_.nodes.size(); ++i) {
      const auto& n = layout_.nodes[i];
      if (!n.correct()) continue;
      Entity e("n" + std::to_string(i), n.position, NodeState(n.position, layout_.params, cap_));
      e.transmitters = {{n.position, layout_.params.t_r}};
      if (detectors) e.detector = detectors(n.position, layout_);
      add_entity(std::move(e));
    }
  }

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  /// Protocol instance at a claimed position, transmitting through faulty nodes.
  void add_shadow(const ShadowSpec& spec) {
    if (layout_.occupied(spec.position)) {
      throw InvalidArgument("shadow position " + to_string(spec.position) + " is a real node");
    }
    for (const auto& [leader, tss] : spec.transmitters) {
      validate_transmission(layout_, {0, leader, tss, Message::announce(spec.position)});
    }
    Entity e("s" + std::to_string(shadow_count_++), spec.position,
             NodeState(spec.position, layout_.params, cap_));
    e.transmitters = spec.transmitters;
    e.shadow = true;
    add_entity(std::move(e));
  }

  void add_script(const std::vector<ScriptedTransmission>& script) {
    for (const auto& t : script) {
      validate_transmission(layout_, t);
      script_.push_back(t);
    }
    std::stable_sort(script_.begin() + static_cast<std::ptrdiff_t>(script_pos_), script_.end(),
                     [](const auto& a, const auto& b) { return a.at_epoch < b.at_epoch; });
  }

  void add_replication(const ReplicationRule& rule) {
    validate_transmission(layout_, {0, rule.replicator, rule.tss, Message::announce(rule.victim)});
    if (!layout_.is_correct(rule.victim)) throw InvalidArgument("replication victim must be correct");
    replications_.push_back(rule);
  }

  void add_flood(const FloodSpec& flood) {
    validate_transmission(layout_, {0, flood.leader, flood.tss, Message::announce(flood.base)});
    floods_.push_back(flood);
  }

  const LayoutSpec& layout() const { return layout_; }
  std::size_t epoch() const { return epoch_; }
  const Trace& trace() const { return trace_; }
  std::size_t fairness_bound() const {
    const std::size_t b = policy_.fairness_bound ? policy_.fairness_bound
                                                 : 4 * std::max<std::size_t>(layout_.nodes.size(), 1);
    return std::max(b, 2 * entities_.size() + 2);
  }
  /// Longest an enabled entity was passed over.
  std::size_t max_wait() const { return max_wait_; }

  std::size_t entity_count() const { return entities_.size(); }
  const std::string& label(std::size_t i) const { return entities_.at(i).label; }
  const NodeState& state(std::size_t i) const { return entities_.at(i).state; }
  bool is_shadow(std::size_t i) const { return entities_.at(i).shadow; }
  const std::vector<DetectorSample>& detector_history(std::size_t i) const {
    return entities_.at(i).history;
  }

  /// State of the correct node at `p`.
  const NodeState& node_at(const Point& p) const {
    for (const auto& e : entities_) {
      if (!e.shadow && e.position == p) return e.state;
    }
    throw InvalidArgument("no correct node at " + to_string(p));
  }

  bool adversary_pending_now() const {
    return !floods_.empty() || (script_pos_ < script_.size() && script_[script_pos_].at_epoch <= epoch_);
  }
  bool adversary_pending() const { return !floods_.empty() || script_pos_ < script_.size(); }

  bool any_enabled() const {
    return std::any_of(entities_.begin(), entities_.end(), [](const Entity& e) { return enabled(e); });
  }

  bool quiescent() const { return !any_enabled() && !adversary_pending(); }

  /// Executes one atomic action. Returns false when there is nothing left.
  bool step();

  /// Steps until quiescence or `max_epochs`. On quiescence, time-dependent
  /// detectors get their settle window before the final decision.
  bool run_until_quiescent(std::size_t max_epochs);

 private:
  struct Entity {
    Entity(std::string l, const Point& p, NodeState s)
        : label(std::move(l)), position(p), state(std::move(s)) {}
    std::string label;
    Point position;
    NodeState state;
    std::vector<std::pair<Point, double>> transmitters;
    std::unique_ptr<UniverseDetector> detector;
    bool shadow = false;
    std::deque<Message> outbox;
    std::optional<std::size_t> enabled_since;
    std::size_t seen_activity = 0;
    std::size_t last_activity_epoch = 0;
    std::vector<DetectorSample> history;
    struct Memo {
      std::size_t revision;
      bool settled;
      std::optional<Universe> pointer;
      bool available;
    };
    std::optional<Memo> memo;
  };

  static bool enabled(const Entity& e) { return !e.outbox.empty() || e.state.has_unprocessed(); }

  void add_entity(Entity e) {
    for (auto& m : e.state.on_init()) e.outbox.push_back(m);
    entities_.push_back(std::move(e));
    entities_.back().enabled_since = epoch_;
  }

  void record(const std::string& kind, const std::string& node, ojson payload) {
    trace_.push_back({epoch_, kind, node, std::move(payload)});
  }

  void transmit(const std::string& who, std::optional<std::size_t> from_entity, const Point& sender,
                double tss, const Message& m);
  void fire_adversary();
  void act(std::size_t i);
  void run_detector(std::size_t i, bool force_sample);
  std::optional<std::size_t> choose();
  void update_waits();

  LayoutSpec layout_;
  SchedulerPolicy policy_;
  std::mt19937_64 rng_;
  std::size_t cap_;
  std::vector<Entity> entities_;
  std::size_t shadow_count_ = 0;

  std::vector<ScriptedTransmission> script_;
  std::size_t script_pos_ = 0;
  std::vector<ReplicationRule> replications_;
  std::vector<FloodSpec> floods_;
  std::size_t flood_count_ = 0;

  std::size_t epoch_ = 0;
  std::size_t rr_next_ = 0;
  std::size_t max_wait_ = 0;
  Trace trace_;
};

}  // namespace sand

#include "sand/sim_impl.hpp"
