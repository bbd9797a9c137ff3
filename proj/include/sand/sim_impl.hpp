#pragma once

// Out-of-line members of World. Included from sim.hpp only.

namespace sand {

inline void World::transmit(const std::string& who, std::optional<std::size_t> from_entity,
                            const Point& sender, double tss, const Message& m) {
  const auto& params = layout_.params;
  ojson p;
  p["sender"] = point_json(sender);
  p["tss"] = tss;
  p["range"] = range_of(params, tss);
  p["message"] = message_json(m);
  record("transmission", who, std::move(p));
  for (std::size_t j = 0; j < entities_.size(); ++j) {
    if (from_entity && *from_entity == j) continue;
    auto& e = entities_[j];
    if (distance2(sender, e.position) < params.r_min_sep * params.r_min_sep) continue;
    if (!receives(params, tss, sender, e.position)) continue;
    const double rss = rss_at(params, tss, sender, e.position);
    const bool was_enabled = enabled(e);
    const auto& rec = e.state.deliver(m, rss);
    if (!was_enabled) e.enabled_since = epoch_ + 1;
    ojson d;
    d["from"] = who;
    d["rss"] = rss;
    d["arrival"] = rec.arrival_index;
    record("delivery", e.label, std::move(d));
  }
}

inline void World::fire_adversary() {
  if (script_pos_ < script_.size() && script_[script_pos_].at_epoch <= epoch_) {
    const auto t = script_[script_pos_++];
    transmit("adv", std::nullopt, t.leader, t.tss, t.message);
    return;
  }
  const auto& f = floods_[flood_count_ % floods_.size()];
  const Message m = flood_message(f, flood_count_ / floods_.size());
  ++flood_count_;
  transmit("flood", std::nullopt, f.leader, f.tss, m);
}

inline void World::act(std::size_t i) {
  auto& e = entities_[i];
  if (!e.outbox.empty()) {
    const Message m = e.outbox.front();
    e.outbox.pop_front();
    for (const auto& [pos, tss] : e.transmitters) transmit(e.label, i, pos, tss, m);
    if (!e.shadow) {
      for (std::size_t r = 0; r < replications_.size(); ++r) {
        const auto& rule = replications_[r];
        if (rule.victim == e.position) {
          transmit("rep" + std::to_string(r), std::nullopt, rule.replicator, rule.tss, m);
        }
      }
    }
  } else {
    const auto& rec = e.state.inbox().at(e.state.processed_count());
    ojson p;
    p["arrival"] = rec.arrival_index;
    p["receipt"] = to_string(e.state.classify_receipt(rec));
    p["message"] = message_json(rec.message);
    record("process", e.label, std::move(p));
    for (auto& m : e.state.process_next()) e.outbox.push_back(std::move(m));
    if (e.state.activity() != e.seen_activity) {
      e.seen_activity = e.state.activity();
      e.last_activity_epoch = epoch_;
    }
    run_detector(i, false);
  }
  e.enabled_since = epoch_ + 1;
}

inline void World::run_detector(std::size_t i, bool force_sample) {
  auto& e = entities_[i];
  if (e.shadow || !e.detector) return;
  const auto& us = e.state.universes();
  const DetectorInput in{us, e.state.dep(), epoch_, e.last_activity_epoch};
  const bool settled = epoch_ >= e.last_activity_epoch + e.detector->settle_window();
  if (!e.memo || e.memo->revision != e.state.revision() || e.memo->settled != settled) {
    bool available = false;
    const auto truth = layout_.correct_neighbors(e.position);
    if (us.overflow) {
      available = us.graph.is_universe(truth);
    } else {
      for (const auto& u : us.universes) {
        const bool real = std::all_of(u.begin(), u.end(), [&](const Point& p) {
          return layout_.index_of(p).has_value();
        });
        if (real && std::includes(u.begin(), u.end(), truth.begin(), truth.end())) available = true;
      }
    }
    e.memo = Entity::Memo{e.state.revision(), settled, e.detector->decide(in), available};
  }
  const auto& pointer = e.memo->pointer;
  const bool available = e.memo->available;

  const auto before = e.state.output();
  e.state.adopt_detector_output(pointer);
  if (before != e.state.output()) {
    ojson p;
    p["output"] = universe_json(e.state.output());
    record("output", e.label, std::move(p));
  }
  const bool changed = e.history.empty() || e.history.back().pointer != pointer ||
                       e.history.back().real_complete_available != available;
  if (changed || force_sample) {
    e.history.push_back({epoch_, pointer, available});
    ojson p;
    p["detector"] = e.detector->name();
    p["pointer"] = universe_json(pointer);
    p["real_complete_available"] = available;
    record("detector", e.label, std::move(p));
  }
}

inline std::optional<std::size_t> World::choose() {
  std::vector<std::size_t> on;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (enabled(entities_[i])) on.push_back(i);
  }
  if (on.empty()) return std::nullopt;
  auto wait = [&](std::size_t i) { return epoch_ - std::min(epoch_, *entities_[i].enabled_since); };

  // Anyone passed over for half the bound goes first, oldest first.
  const std::size_t threshold = fairness_bound() / 2;
  std::optional<std::size_t> forced;
  for (auto i : on) {
    if (wait(i) >= threshold && (!forced || wait(i) > wait(*forced))) forced = i;
  }
  if (forced) return forced;

  switch (policy_.kind) {
    case SchedulerKind::RoundRobin:
      for (std::size_t k = 0; k < entities_.size(); ++k) {
        const std::size_t i = (rr_next_ + k) % entities_.size();
        if (enabled(entities_[i])) {
          rr_next_ = i + 1;
          return i;
        }
      }
      break;
    case SchedulerKind::SeededRandom:
      return on[static_cast<std::size_t>(rng_() % on.size())];
    case SchedulerKind::AdversarialDelay: {
      std::size_t pick = on.front();
      for (auto i : on) {
        if (wait(i) <= wait(pick)) pick = i;
      }
      return pick;
    }
  }
  return on.front();
}

inline void World::update_waits() {
  for (const auto& e : entities_) {
    if (enabled(e) && e.enabled_since) {
      max_wait_ = std::max(max_wait_, epoch_ - std::min(epoch_, *e.enabled_since));
    }
  }
}

inline bool World::step() {
  if (!any_enabled() && !adversary_pending()) return false;
  update_waits();
  const bool someone_starving = [&] {
    for (const auto& e : entities_) {
      if (enabled(e) && epoch_ - std::min(epoch_, *e.enabled_since) >= fairness_bound() / 2) {
        return true;
      }
    }
    return false;
  }();
  if (adversary_pending_now() && !someone_starving) {
    fire_adversary();
  } else if (auto i = choose()) {
    act(*i);
  } else {
    // Only future injections remain: idle until the next one is due.
    epoch_ = std::max(epoch_, script_[script_pos_].at_epoch);
    return true;
  }
  ++epoch_;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    auto& e = entities_[i];
    if (e.shadow || !e.detector) continue;
    const std::size_t w = e.detector->settle_window();
    if (w > 0 && epoch_ == e.last_activity_epoch + w) run_detector(i, false);
  }
  return true;
}

inline bool World::run_until_quiescent(std::size_t max_epochs) {
  if (max_epochs == 0) throw InvalidArgument("max_epochs must be positive");
  while (!quiescent() && epoch_ < max_epochs) step();
  const bool quiesced = quiescent();
  if (quiesced) {
    std::size_t window = 0;
    for (const auto& e : entities_) {
      if (e.detector) window = std::max(window, e.detector->settle_window());
    }
    epoch_ += window;
    for (std::size_t i = 0; i < entities_.size(); ++i) run_detector(i, true);
  }
  ojson p;
  p["quiesced"] = quiesced;
  p["max_wait"] = max_wait_;
  p["fairness_bound"] = fairness_bound();
  record("end", "", std::move(p));
  return quiesced;
}

}  // namespace sand
