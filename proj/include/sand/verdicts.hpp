#pragma once

// Checks a finished run's trace against the neighborhood-discovery problem
// variants. Liveness is judged at quiescence; a truncated run is
// inconclusive.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sand/sim.hpp"

namespace sand {

enum class ProblemVariant { SNDP, WNDP, EventualNDP };

inline const char* to_string(ProblemVariant v) {
  switch (v) {
    case ProblemVariant::SNDP: return "SNDP";
    case ProblemVariant::WNDP: return "WNDP";
    case ProblemVariant::EventualNDP: return "EventualNDP";
  }
  return "?";
}

inline ProblemVariant parse_variant(const std::string& s) {
  if (s == "SNDP") return ProblemVariant::SNDP;
  if (s == "WNDP") return ProblemVariant::WNDP;
  if (s == "EventualNDP") return ProblemVariant::EventualNDP;
  throw ConfigError("unknown problem variant '" + s + "'");
}

enum class Liveness { Pass, Fail, Inconclusive };

inline const char* to_string(Liveness l) {
  switch (l) {
    case Liveness::Pass: return "pass";
    case Liveness::Fail: return "fail";
    case Liveness::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct NodeVerdict {
  std::string node;
  Point position;
  bool safety = true;
  std::optional<std::size_t> safety_violation_epoch;
  Liveness liveness = Liveness::Inconclusive;
  std::optional<Universe> final_output;
  std::vector<Point> missing;  // correct neighbors absent from the final output
  std::vector<Point> extra;    // output identities that are not correct neighbors
};

struct ProblemVerdict {
  ProblemVariant variant = ProblemVariant::SNDP;
  bool quiesced = false;
  std::vector<NodeVerdict> nodes;

  bool safety_ok() const {
    return std::all_of(nodes.begin(), nodes.end(), [](const NodeVerdict& n) { return n.safety; });
  }
  bool liveness_ok() const {
    return std::all_of(nodes.begin(), nodes.end(),
                       [](const NodeVerdict& n) { return n.liveness == Liveness::Pass; });
  }
  bool inconclusive() const {
    return std::any_of(nodes.begin(), nodes.end(),
                       [](const NodeVerdict& n) { return n.liveness == Liveness::Inconclusive; });
  }
  bool passed() const { return safety_ok() && liveness_ok(); }
};

inline ProblemVerdict check_problem(const Trace& trace, const LayoutSpec& layout,
                                    ProblemVariant variant) {
  ProblemVerdict verdict;
  verdict.variant = variant;
  std::map<std::string, std::vector<std::pair<std::size_t, std::optional<Universe>>>> outputs;
  for (const auto& e : trace) {
    if (e.kind == "end") verdict.quiesced = e.payload.at("quiesced").get<bool>();
    if (e.kind != "output") continue;
    std::optional<Universe> u;
    if (!e.payload.at("output").is_null()) {
      u.emplace();
      for (const auto& p : e.payload.at("output")) u->push_back(point_from_json(p));
    }
    outputs[e.node].emplace_back(e.epoch, std::move(u));
  }

  for (std::size_t i = 0; i < layout.nodes.size(); ++i) {
    if (!layout.nodes[i].correct()) continue;
    NodeVerdict nv;
    nv.node = "n" + std::to_string(i);
    nv.position = layout.nodes[i].position;
    const Universe truth = layout.correct_neighbors(nv.position);
    const auto& hist = outputs[nv.node];

    auto exact = [&](const Universe& u) { return u == truth; };
    auto subset = [&](const Universe& u) {
      return std::includes(truth.begin(), truth.end(), u.begin(), u.end());
    };
    for (std::size_t h = 0; h < hist.size(); ++h) {
      const auto& [epoch, out] = hist[h];
      if (!out) continue;
      bool ok = true;
      switch (variant) {
        case ProblemVariant::SNDP: ok = exact(*out); break;
        case ProblemVariant::WNDP: ok = subset(*out); break;
        case ProblemVariant::EventualNDP: ok = h + 1 < hist.size() || exact(*out); break;
      }
      if (!ok && nv.safety) {
        nv.safety = false;
        nv.safety_violation_epoch = epoch;
      }
    }

    if (!hist.empty()) nv.final_output = hist.back().second;
    const Universe out = nv.final_output.value_or(Universe{});
    std::set_difference(truth.begin(), truth.end(), out.begin(), out.end(),
                        std::back_inserter(nv.missing));
    std::set_difference(out.begin(), out.end(), truth.begin(), truth.end(),
                        std::back_inserter(nv.extra));
    if (!verdict.quiesced) {
      nv.liveness = Liveness::Inconclusive;
    } else {
      nv.liveness = nv.final_output && exact(*nv.final_output) ? Liveness::Pass : Liveness::Fail;
    }
    verdict.nodes.push_back(std::move(nv));
  }
  return verdict;
}

inline ojson verdict_json(const ProblemVerdict& v) {
  ojson j;
  j["variant"] = to_string(v.variant);
  j["quiesced"] = v.quiesced;
  j["safety"] = v.safety_ok();
  j["liveness"] = v.inconclusive() ? "inconclusive" : (v.liveness_ok() ? "pass" : "fail");
  ojson nodes = ojson::array();
  for (const auto& n : v.nodes) {
    ojson e;
    e["node"] = n.node;
    e["position"] = point_json(n.position);
    e["safety"] = n.safety;
    e["safety_violation_epoch"] =
        n.safety_violation_epoch ? ojson(*n.safety_violation_epoch) : ojson(nullptr);
    e["liveness"] = to_string(n.liveness);
    e["output"] = universe_json(n.final_output);
    e["missing"] = points_json(n.missing);
    e["extra"] = points_json(n.extra);
    nodes.push_back(e);
  }
  j["nodes"] = nodes;
  return j;
}

}  // namespace sand
