#pragma once

// Scripted faulty-node strategies.
//
// Faulty nodes never run the protocol. Every strategy here is a schedule
// generator: scripted transmissions injected at fixed epochs, shadows that
// speak for a claimed position through faulty transmitters, reactive
// replication rules, and an unbounded flood.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sand/deception.hpp"
#include "sand/message.hpp"

namespace sand {

struct ScriptedTransmission {
  std::size_t at_epoch = 0;
  Point leader;  // physical (faulty) transmitter
  double tss = 0.0;
  Message message;
};

/// Checks that a transmission comes from a faulty node with positive power.
inline void validate_transmission(const LayoutSpec& layout, const ScriptedTransmission& t) {
  if (!layout.is_faulty(t.leader)) {
    throw InvalidArgument("scripted leader " + to_string(t.leader) + " is not a faulty node");
  }
  if (!(t.tss > 0.0)) throw InvalidArgument("scripted tss must be positive");
}

/// Power at which f makes u measure exactly what a transmission from w at
/// T_r would produce.
inline double impersonate_tss(const RadioParams& params, const Point& f, const Point& target,
                              const Point& victim) {
  const double sep2 = params.r_min_sep * params.r_min_sep;
  const double uf2 = distance2(target, f);
  const double uw2 = distance2(target, victim);
  if (uf2 < sep2 || uw2 < sep2 || distance2(f, victim) < sep2) {
    throw DegenerateDistance("impersonation points must be pairwise distinct");
  }
  return params.t_r * uf2 / uw2;
}

/// Announces for every fictitious identity followed by all cross-confirms,
/// each tuned to be RSS-consistent at `target`.
inline std::vector<ScriptedTransmission> fabricate_universe(const LayoutSpec& layout, const Point& f,
                                                            const std::vector<Point>& fictitious,
                                                            const Point& target,
                                                            std::size_t at_epoch = 0) {
  const auto& params = layout.params;
  for (const auto& k : fictitious) {
    if (layout.occupied(k)) {
      throw InvalidArgument("fictitious identity " + to_string(k) + " coincides with a real node");
    }
    if (distance(k, target) > params.d_n) {
      throw InvalidArgument("fictitious identity " + to_string(k) +
                            " is outside the target's neighborhood");
    }
  }
  std::vector<ScriptedTransmission> out;
  std::vector<Message> announces;
  for (const auto& k : fictitious) {
    announces.push_back(Message::announce(k));
    out.push_back({at_epoch, f, impersonate_tss(params, f, target, k), announces.back()});
  }
  for (std::size_t i = 0; i < fictitious.size(); ++i) {
    for (std::size_t j = 0; j < fictitious.size(); ++j) {
      if (i == j) continue;
      out.push_back({at_epoch, f, impersonate_tss(params, f, target, fictitious[j]),
                     Message::confirm(fictitious[j], announces[i])});
    }
  }
  for (const auto& t : out) validate_transmission(layout, t);
  return out;
}

/// One transmission per retinue leader at its witness power. Refuses a
/// report that does not replay on `layout`.
inline std::vector<ScriptedTransmission> snare_broadcast(const LayoutSpec& layout,
                                                         const SnareReport& report,
                                                         const Message& message,
                                                         std::size_t at_epoch = 0) {
  if (report.retinues.empty()) return {};
  if (message.claimed_sender() != report.snare_point) {
    throw InvalidArgument("snare message must claim the snare point");
  }
  std::vector<ScriptedTransmission> out;
  for (const auto& w : report.retinues) {
    const Point& leader = w.retinue.leader;
    if (!layout.is_faulty(leader)) throw InvalidArgument("stale snare report: leader not faulty");
    for (const auto& m : w.retinue.members) {
      if (!layout.is_correct(m)) throw InvalidArgument("stale snare report: member not correct");
      const double measured = rss_at(layout.params, w.tss, leader, m);
      const double expected = expected_rss_from_claim(layout.params, report.snare_point, m);
      if (!rss_matches(measured, expected)) {
        throw InvalidArgument("stale snare report: witness power does not replay at " +
                              to_string(m));
      }
    }
    out.push_back({at_epoch, leader, w.tss, message});
  }
  return out;
}

/// Whenever `victim` transmits, `replicator` repeats the message at `tss`.
struct ReplicationRule {
  Point replicator;
  Point victim;
  double tss = 0.0;
};

/// Replication that makes `observer` measure, from the replicator, the
/// RSS it would measure from `reference`. Refused if any correct node other
/// than the observer lies within the replica's range.
inline ReplicationRule discredit_schedule(const LayoutSpec& layout, const Point& f2,
                                          const Point& victim_k, const Point& observer_v,
                                          const Point& reference_f1) {
  const auto& params = layout.params;
  const double vf1_2 = distance2(observer_v, reference_f1);
  const double vf2_2 = distance2(observer_v, f2);
  if (vf1_2 < params.r_min_sep * params.r_min_sep || vf2_2 < params.r_min_sep * params.r_min_sep) {
    throw DegenerateDistance("discredit geometry is degenerate");
  }
  const double tss = params.t_r * vf2_2 / vf1_2;
  const double clearance = range_of(params, tss);
  for (const auto& n : layout.nodes) {
    if (!n.correct() || n.position == observer_v) continue;
    if (distance(n.position, f2) <= clearance) {
      throw InvalidArgument("discredit refused: correct node " + to_string(n.position) +
                            " is within the replica's range");
    }
  }
  return {f2, victim_k, tss};
}

/// Conflict about `about`, claimed by `claimed_sender` (default: f itself)
/// and tuned to be consistent at `target`.
inline ScriptedTransmission spurious_conflict(const RadioParams& params, const Point& f,
                                              const Message& about, const Point& target,
                                              std::optional<Point> claimed_sender = std::nullopt,
                                              std::size_t at_epoch = 0) {
  const Point claim = claimed_sender.value_or(f);
  const double tss = claim == f ? params.t_r : impersonate_tss(params, f, target, claim);
  return {at_epoch, f, tss, Message::conflict(claim, about)};
}

/// A faulty node that transmits nothing.
inline std::vector<ScriptedTransmission> silent() { return {}; }

/// A claimed position run as a protocol instance: it hears what a node at
/// `position` would hear and its emissions leave through the transmitters.
struct ShadowSpec {
  Point position;
  std::vector<std::pair<Point, double>> transmitters;  // (faulty leader, tss)
};

/// Shadow for a single faulty node impersonating `victim` towards `target`.
inline ShadowSpec impersonation_shadow(const RadioParams& params, const Point& f,
                                       const Point& target, const Point& victim) {
  return {victim, {{f, impersonate_tss(params, f, target, victim)}}};
}

/// Shadow for a snare point, transmitting through every retinue leader.
inline ShadowSpec snare_shadow(const SnareReport& report) {
  ShadowSpec s{report.snare_point, {}};
  for (const auto& w : report.retinues) s.transmitters.emplace_back(w.retinue.leader, w.tss);
  return s;
}

/// Fresh fictitious announces, one per injection, without end.
struct FloodSpec {
  Point leader;
  double tss = 0.0;
  Point base;
  double step = 1e-3;
};

inline Message flood_message(const FloodSpec& spec, std::size_t i) {
  return Message::announce({spec.base.x + spec.step * static_cast<double>(i), spec.base.y},
                           static_cast<std::uint64_t>(i));
}

/// Geometry of the discredit construction, built from radio parameters.
struct DiscreditScenario {
  bool feasible = false;
  std::string reason;
  Point u, v, k, f1, f2;
  /// |vk| > d_n: v drops k's messages by locality, so no conflict is raised
  /// and the fictitious k of the first layout goes unchallenged instead.
  bool beyond_observer_neighborhood = false;
  LayoutSpec with_fictitious_k;  // k is claimed by f1; u, v correct
  LayoutSpec with_real_k;        // k correct, f2 replicates it towards v
};

/// Places u at the origin with v and k on either side, r_t < |vk| and both
/// within d_n of u; f1 sits as far from u as k and within range of v; f2 is
/// just next to v. When r_t < d_n the gap |vk| is kept within d_n so that v
/// attends to k. Coordinates are dyadic so replayed powers match exactly.
/// Infeasible when r_t >= 2 d_n since then no such v, k exist.
inline DiscreditScenario discredit_scenario(const RadioParams& params) {
  DiscreditScenario s;
  const double rt = params.range();
  if (rt >= 2.0 * params.d_n) {
    s.reason = "infeasible: r_t >= 2 d_n, two neighbors of u are always in range of each other";
    return s;
  }
  // Half-gap a: r_t/2 < a < r_t/sqrt(2) keeps v out of range of k but in
  // range of f1 = (0, a).
  const double hi = std::min({rt / std::sqrt(2.0), params.d_n, rt < params.d_n ? params.d_n / 2.0 : params.d_n});
  const double lo = rt / 2.0;
  double a = 0.0;
  for (double scale = 1.0; scale < 1e15 && a == 0.0; scale *= 2.0) {
    const double cand = std::floor((lo + hi) / 2.0 * scale) / scale;
    if (cand > lo && cand < hi + 1e-15 * hi && cand <= params.d_n) a = cand;
  }
  if (a == 0.0) {
    s.reason = "infeasible: no placement found";
    return s;
  }
  s.u = {0.0, 0.0};
  s.v = {-a, 0.0};
  s.k = {a, 0.0};
  s.f1 = {0.0, a};
  s.beyond_observer_neighborhood = 2.0 * a > params.d_n;
  // |vf2|^2 a power of two keeps the replica power exact.
  double h = 1.0;
  while (h > params.r_min_sep * 4.0 && h * rt / distance(s.v, s.f1) >= a / 2.0) h /= 2.0;
  s.f2 = {-a, -h};
  s.with_fictitious_k = LayoutSpec{{{s.u, Role::Correct}, {s.v, Role::Correct}, {s.f1, Role::Faulty}},
                                   params};
  s.with_real_k = LayoutSpec{{{s.u, Role::Correct},
                              {s.v, Role::Correct},
                              {s.k, Role::Correct},
                              {s.f1, Role::Faulty},
                              {s.f2, Role::Faulty}},
                             params};
  s.feasible = true;
  return s;
}

}  // namespace sand
