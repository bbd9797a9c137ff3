#pragma once

// The analyze / simulate / generate commands behind the CLI.

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "sand/config.hpp"
#include "sand/svg.hpp"

namespace sand {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int condition_violated = 2;
inline constexpr int property_failed = 3;
inline constexpr int inconclusive = 4;
}  // namespace exit_code

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

inline DetectorFactory detector_factory(const RunConfig& cfg) {
  const auto d = cfg.detector;
  switch (d.kind) {
    case DetectorKind::None: return nullptr;
    case DetectorKind::Oracle: return oracle_factory();
    case DetectorKind::Quiescence:
      return [w = d.window](const Point&, const LayoutSpec&) {
        return std::make_unique<QuiescenceDetector>(w);
      };
    case DetectorKind::Trusted:
      return [d](const Point& self, const LayoutSpec& layout) {
        std::vector<Point> trusted;
        if (d.trust_nearest) {
          const auto nb = layout.correct_neighbors(self);
          auto it = std::min_element(nb.begin(), nb.end(), [&](const Point& a, const Point& b) {
            return std::pair{distance2(a, self), a} < std::pair{distance2(b, self), b};
          });
          if (it != nb.end()) trusted.push_back(*it);
        } else if (auto idx = layout.index_of(self); idx && d.trusted.count(*idx)) {
          trusted = d.trusted.at(*idx);
        }
        return std::make_unique<TrustedSetDetector>(self, layout.params, trusted, d.window);
      };
    case DetectorKind::Topology:
      return [d](const Point&, const LayoutSpec& layout) {
        LayoutFamily family = SiteFamily{};
        if (d.family) {
          family = *d.family;
        } else {
          for (const auto& n : layout.nodes) std::get<SiteFamily>(family).sites.push_back(n.position);
        }
        return std::make_unique<TopologyDetector>(family, d.window);
      };
  }
  return nullptr;
}

/// Adds one configured adversary strategy to the world.
inline void install_adversary(World& world, const ojson& a, const RunConfig& cfg) {
  const auto& layout = cfg.layout;
  const auto& nodes = layout.nodes;
  auto node = [&](const char* key) { return nodes.at(resolve_node(a.at(key), nodes)).position; };
  const std::string kind = a.at("kind").get<std::string>();
  const std::size_t at = a.value("at_epoch", std::size_t{0});

  if (kind == "silent") {
    detail::require_keys(a, "adversary.silent", {"kind", "f"});
    if (!layout.is_faulty(node("f"))) throw ConfigError("adversary.silent: f must be faulty");
  } else if (kind == "impersonate") {
    detail::require_keys(a, "adversary.impersonate", {"kind", "f", "target", "victim"});
    world.add_shadow(impersonation_shadow(layout.params, node("f"), node("target"),
                                          point_from_json(a.at("victim"))));
  } else if (kind == "fabricate") {
    detail::require_keys(a, "adversary.fabricate", {"kind", "f", "target", "fictitious", "at_epoch"});
    std::vector<Point> ks;
    for (const auto& p : a.at("fictitious")) ks.push_back(point_from_json(p));
    world.add_script(fabricate_universe(layout, node("f"), ks, node("target"), at));
  } else if (kind == "snare") {
    detail::require_keys(a, "adversary.snare", {"kind", "focus", "index", "resolution"});
    const auto reports = find_snares(layout, node("focus"), a.value("resolution", cfg.analysis.resolution),
                                     {cfg.analysis.max_participants, kRssTolerance});
    std::vector<const SnareReport*> ranked;
    for (const auto& r : reports) if (r.kind == SnareKind::Perfect) ranked.push_back(&r);
    for (const auto& r : reports) if (r.kind != SnareKind::Perfect) ranked.push_back(&r);
    const std::size_t idx = a.value("index", std::size_t{0});
    if (idx >= ranked.size()) throw ConfigError("adversary.snare: no snare with that index");
    world.add_shadow(snare_shadow(*ranked[idx]));
  } else if (kind == "discredit") {
    detail::require_keys(a, "adversary.discredit", {"kind", "f2", "victim", "observer", "reference"});
    world.add_replication(discredit_schedule(layout, node("f2"), node("victim"), node("observer"),
                                             point_from_json(a.at("reference"))));
  } else if (kind == "spurious_conflict") {
    detail::require_keys(a, "adversary.spurious_conflict",
                         {"kind", "f", "target", "about", "claimed_sender", "at_epoch"});
    std::optional<Point> claim;
    if (a.contains("claimed_sender")) claim = point_from_json(a.at("claimed_sender"));
    world.add_script({spurious_conflict(layout.params, node("f"), message_from_json(a.at("about")),
                                        node("target"), claim, at)});
  } else if (kind == "scripted") {
    detail::require_keys(a, "adversary.scripted", {"kind", "transmissions"});
    world.add_script(schedule_from_json(a.at("transmissions")));
  } else if (kind == "flood") {
    detail::require_keys(a, "adversary.flood", {"kind", "f", "tss", "base", "step"});
    world.add_flood({node("f"), a.at("tss").get<double>(), point_from_json(a.at("base")),
                     a.value("step", 1e-3)});
  } else {
    throw ConfigError("adversary: unknown kind '" + kind + "'");
  }
}

inline std::unique_ptr<World> build_world(const RunConfig& cfg) {
  auto world = std::make_unique<World>(cfg.layout, cfg.scheduler, detector_factory(cfg), cfg.universe_cap);
  for (const auto& a : cfg.adversaries) {
    try {
      install_adversary(*world, a, cfg);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("adversary " + a.dump() + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("adversary " + a.dump() + ": " + e.what());
    }
  }
  return world;
}

struct AnalyzeResult {
  ojson report;
  std::vector<SnareReport> snares;
  int exit = exit_code::ok;
};

inline AnalyzeResult analyze(const RunConfig& cfg) {
  const auto& layout = cfg.layout;
  std::vector<Point> foci = cfg.analysis.foci;
  if (foci.empty()) foci = layout.correct_points();

  AnalyzeResult res;
  ojson per_focus = ojson::array();
  ojson all = ojson::array();
  for (const auto& f : foci) {
    auto reports = find_snares(layout, f, cfg.analysis.resolution,
                               {cfg.analysis.max_participants, kRssTolerance});
    std::size_t perfect = 0;
    for (const auto& r : reports) {
      perfect += r.kind == SnareKind::Perfect;
      all.push_back(snare_json(r));
    }
    ojson e;
    e["focus"] = point_json(f);
    e["snares"] = reports.size();
    e["perfect"] = perfect;
    per_focus.push_back(e);
    res.snares.insert(res.snares.end(), reports.begin(), reports.end());
  }
  const bool range_ok = check_range_condition(layout.params);
  ojson params = params_json(layout.params);
  params["resolution"] = cfg.analysis.resolution;
  params["max_participants"] = cfg.analysis.max_participants;
  res.report["command"] = "analyze";
  res.report["parameters"] = params;
  res.report["layout"] = layout_json(layout);
  res.report["range_condition_ok"] = range_ok;
  res.report["snare_free"] = res.snares.empty();
  res.report["foci"] = per_focus;
  res.report["snares"] = all;
  res.exit = range_ok && res.snares.empty() ? exit_code::ok : exit_code::condition_violated;
  return res;
}

inline int cmd_analyze(const RunConfig& cfg, bool svg) {
  const auto res = analyze(cfg);
  const std::filesystem::path out(cfg.out_dir);
  write_file(out / "report.json", res.report.dump(2) + "\n");
  if (svg) write_file(out / "layout.svg", layout_svg(cfg.layout, res.snares));
  return res.exit;
}

struct SimulateResult {
  Trace trace;
  ojson verdicts;
  bool quiesced = false;
  int exit = exit_code::ok;
};

inline SimulateResult simulate(const RunConfig& cfg) {
  auto world = build_world(cfg);
  SimulateResult res;
  res.quiesced = world->run_until_quiescent(cfg.max_epochs);
  res.trace = world->trace();

  bool failed = false, inconclusive = false;
  ojson variants = ojson::array();
  for (auto v : cfg.variants) {
    const auto verdict = check_problem(res.trace, cfg.layout, v);
    failed = failed || !verdict.safety_ok() ||
             (!verdict.inconclusive() && !verdict.liveness_ok());
    inconclusive = inconclusive || verdict.inconclusive();
    variants.push_back(verdict_json(verdict));
  }
  ojson nodes = ojson::array();
  for (std::size_t i = 0; i < world->entity_count(); ++i) {
    if (world->is_shadow(i)) continue;
    const auto& st = world->state(i);
    ojson n;
    n["node"] = world->label(i);
    n["position"] = point_json(st.self_position());
    n["output"] = universe_json(st.output());
    n["conflicts"] = st.conflicts().size();
    n["universes"] = st.universes().overflow ? ojson(nullptr) : ojson(st.universes().universes.size());
    n["decisions"] = world->detector_history(i).size();
    nodes.push_back(n);
  }
  res.verdicts["command"] = "simulate";
  res.verdicts["quiesced"] = res.quiesced;
  res.verdicts["epochs"] = world->epoch();
  res.verdicts["scheduler"] = to_string(cfg.scheduler.kind);
  res.verdicts["seed"] = cfg.scheduler.seed;
  ojson fair;
  fair["bound"] = world->fairness_bound();
  fair["max_wait"] = world->max_wait();
  fair["ok"] = world->max_wait() <= world->fairness_bound();
  res.verdicts["fairness"] = fair;
  res.verdicts["variants"] = variants;
  res.verdicts["nodes"] = nodes;
  res.exit = failed ? exit_code::property_failed
                    : (inconclusive ? exit_code::inconclusive : exit_code::ok);
  return res;
}

inline int cmd_simulate(const RunConfig& cfg) {
  const auto res = simulate(cfg);
  const std::filesystem::path out(cfg.out_dir);
  write_file(out / "trace.jsonl", trace_jsonl(res.trace));
  write_file(out / "verdicts.json", res.verdicts.dump(2) + "\n");
  return res.exit;
}

/// Layout document for a generator spec {"grid": {...}} or {"random": {...}}.
inline ojson generate_layout(const ojson& spec) {
  detail::require_keys(spec, "generate", {"grid", "random"});
  if (spec.contains("random")) {
    detail::require_keys(spec.at("random"), "generate.random", {"n", "area", "seed", "min_sep"});
  }
  double min_sep = 0.0;
  ojson src = spec;
  if (spec.contains("random")) {
    const auto& area = spec.at("random").at("area");
    min_sep = spec.at("random").value("min_sep", 1e-6 * std::max(area.at(0).get<double>(), area.at(1).get<double>()));
    src["random"].erase("min_sep");
  }
  const auto nodes = layout_nodes_from_source(src, "", min_sep);
  ojson doc;
  doc["generator"] = spec;
  ojson arr = ojson::array();
  for (const auto& n : nodes) {
    ojson e;
    e["position"] = point_json(n.position);
    e["role"] = "correct";
    arr.push_back(e);
  }
  doc["nodes"] = arr;
  return doc;
}

inline int cmd_generate(const ojson& spec, const std::string& out_dir) {
  write_file(std::filesystem::path(out_dir) / "layout.json", generate_layout(spec).dump(2) + "\n");
  return exit_code::ok;
}

}  // namespace sand
