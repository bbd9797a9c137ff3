#pragma once

// JSON encodings of the domain types. Field order is fixed so that
// exported documents are byte-stable.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sand/adversary.hpp"
#include "sand/node.hpp"

namespace sand {

using ojson = nlohmann::ordered_json;

inline ojson point_json(const Point& p) { return ojson::array({p.x, p.y}); }

inline Point point_from_json(const ojson& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("a point must be a two-number array, got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline ojson points_json(const std::vector<Point>& ps) {
  ojson a = ojson::array();
  for (const auto& p : ps) a.push_back(point_json(p));
  return a;
}

inline ojson message_json(const Message& m) {
  ojson j;
  j["kind"] = to_string(m.kind());
  j["sender"] = point_json(m.claimed_sender());
  j["digest"] = m.digest();
  if (m.original()) j["original"] = message_json(*m.original());
  return j;
}

inline Message message_from_json(const ojson& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const Point sender = point_from_json(j.at("sender"));
  const std::uint64_t digest = j.value("digest", std::uint64_t{0});
  if (kind == "announce") return Message::announce(sender, digest);
  const Message original = message_from_json(j.at("original"));
  if (kind == "confirm") return Message::confirm(sender, original, digest);
  if (kind == "conflict") return Message::conflict(sender, original, digest);
  throw ConfigError("unknown message kind '" + kind + "'");
}

inline ojson params_json(const RadioParams& p) {
  ojson j;
  j["c"] = p.c;
  j["t_r"] = p.t_r;
  j["r_min"] = p.r_min;
  j["d_n"] = p.d_n;
  j["r_min_sep"] = p.r_min_sep;
  j["range"] = p.range();
  return j;
}

inline ojson layout_json(const LayoutSpec& l) {
  ojson nodes = ojson::array();
  for (const auto& n : l.nodes) {
    ojson e;
    e["position"] = point_json(n.position);
    e["role"] = n.correct() ? "correct" : "faulty";
    nodes.push_back(e);
  }
  ojson j;
  j["params"] = params_json(l.params);
  j["nodes"] = nodes;
  return j;
}

inline ojson retinue_json(const RetinueWitness& w) {
  ojson j;
  j["leader"] = point_json(w.retinue.leader);
  j["members"] = points_json(w.retinue.members);
  j["closure_radius"] = w.retinue.closure_radius;
  j["tss"] = w.tss;
  return j;
}

inline ojson snare_json(const SnareReport& r) {
  ojson j;
  j["focus"] = point_json(r.focus);
  j["snare_point"] = point_json(r.snare_point);
  j["kind"] = to_string(r.kind);
  ojson rs = ojson::array();
  for (const auto& w : r.retinues) rs.push_back(retinue_json(w));
  j["retinues"] = rs;
  j["conflict_free_set"] = points_json(r.conflict_free_set);
  return j;
}

inline ojson transmission_json(const ScriptedTransmission& t) {
  ojson j;
  j["at_epoch"] = t.at_epoch;
  j["leader"] = point_json(t.leader);
  j["tss"] = t.tss;
  j["message"] = message_json(t.message);
  return j;
}

inline ojson schedule_json(const std::vector<ScriptedTransmission>& ts) {
  ojson a = ojson::array();
  for (const auto& t : ts) a.push_back(transmission_json(t));
  return a;
}

inline std::vector<ScriptedTransmission> schedule_from_json(const ojson& j) {
  std::vector<ScriptedTransmission> out;
  for (const auto& e : j) {
    out.push_back({e.value("at_epoch", std::size_t{0}), point_from_json(e.at("leader")),
                   e.at("tss").get<double>(), message_from_json(e.at("message"))});
  }
  return out;
}

inline ojson universe_json(const std::optional<Universe>& u) {
  return u ? points_json(*u) : ojson(nullptr);
}

inline ojson dep_json(const DepGraph& dep) {
  ojson live = ojson::array(), dead = ojson::array();
  for (const auto& [k, v] : dep.vertices()) (v.live ? live : dead).push_back(message_json(v.message));
  ojson j;
  j["live"] = live;
  j["tombstones"] = dead;
  return j;
}

inline ojson node_state_json(const NodeState& n) {
  ojson j;
  j["position"] = point_json(n.self_position());
  j["inbox_size"] = n.inbox().size();
  j["processed"] = n.processed_count();
  ojson cs = ojson::array();
  for (const auto& c : n.conflicts()) {
    ojson e;
    e["kind"] = to_string(c.kind);
    e["subject"] = message_json(c.subject);
    cs.push_back(e);
  }
  j["conflicts"] = cs;
  const auto& us = n.universes();
  j["identities"] = points_json(us.graph.identities);
  ojson edges = ojson::array();
  for (auto [a, b] : us.graph.edges) {
    edges.push_back(ojson::array({point_json(us.graph.identities[a]), point_json(us.graph.identities[b])}));
  }
  j["conflict_edges"] = edges;
  ojson uni = ojson::array();
  for (const auto& u : us.universes) uni.push_back(points_json(u));
  j["universes"] = uni;
  j["overflow"] = us.overflow;
  j["output"] = universe_json(n.output());
  j["dep"] = dep_json(n.dep());
  return j;
}

}  // namespace sand
