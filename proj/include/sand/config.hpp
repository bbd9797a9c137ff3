#pragma once

// Run configuration: JSON documents with strict key checking.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sand/verdicts.hpp"

namespace sand {

namespace detail {

inline void require_keys(const ojson& j, const std::string& where,
                         const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// rows x cols grid with spacing s, numbered row-major from the top-left
/// corner; the bottom-left node sits at the origin.
inline std::vector<Point> grid_points(double s, std::size_t rows, std::size_t cols) {
  if (!(s > 0.0)) throw ConfigError("grid spacing must be positive");
  std::vector<Point> out;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.push_back({static_cast<double>(c) * s, static_cast<double>(rows - 1 - r) * s});
    }
  }
  return out;
}

/// n uniform points in [0,w] x [0,h]. Points closer than `min_sep` to an
/// earlier one are redrawn.
inline std::vector<Point> random_points(std::size_t n, double w, double h, std::uint64_t seed,
                                        double min_sep) {
  if (!(w > 0.0) || !(h > 0.0)) throw ConfigError("random area must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  while (out.size() < n) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const Point p{detail::uniform01(rng) * w, detail::uniform01(rng) * h};
      placed = std::all_of(out.begin(), out.end(),
                           [&](const Point& q) { return distance(p, q) >= min_sep; });
      if (placed) out.push_back(p);
    }
    if (!placed) throw ConfigError("could not place random points without overlap");
  }
  return out;
}

enum class DetectorKind { Oracle, Quiescence, Trusted, Topology, None };

struct DetectorConfig {
  DetectorKind kind = DetectorKind::Oracle;
  std::size_t window = 0;
  bool trust_nearest = true;
  std::map<std::size_t, std::vector<Point>> trusted;  // node index -> trusted points
  std::optional<LayoutFamily> family;                 // empty: sites of the layout
};

struct AnalysisConfig {
  double resolution = 0.01;
  std::size_t max_participants = 4;
  std::vector<Point> foci;  // empty: every correct node
};

struct RunConfig {
  LayoutSpec layout;
  ojson layout_source;
  std::vector<ojson> adversaries;
  DetectorConfig detector;
  SchedulerPolicy scheduler;
  std::size_t max_epochs = 100000;
  std::size_t universe_cap = kDefaultUniverseCap;
  std::vector<ProblemVariant> variants{ProblemVariant::SNDP};
  AnalysisConfig analysis;
  std::string out_dir = "out";
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ojson parse_json(const std::string& text, const std::string& where) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline RadioParams radio_from_json(const ojson& j) {
  detail::require_keys(j, "radio", {"c", "t_r", "r_min", "d_n", "r_min_sep", "range"});
  if (!j.contains("d_n")) throw ConfigError("radio: 'd_n' is required");
  RadioParams p;
  const double d_n = j.at("d_n").get<double>();
  if (j.contains("range")) {
    if (j.contains("t_r")) throw ConfigError("radio: give either 'range' or 't_r', not both");
    p = RadioParams::with_range(j.at("range").get<double>(), d_n);
    p.c = j.value("c", 1.0);
    p.r_min = j.value("r_min", 1.0);
    p.t_r = j.at("range").get<double>() * j.at("range").get<double>() * p.r_min / p.c;
  } else {
    p.c = j.value("c", 1.0);
    p.r_min = j.value("r_min", 1.0);
    p.t_r = j.at("t_r").get<double>();
    p.d_n = d_n;
    p.r_min_sep = 1e-6 * d_n;
  }
  if (j.contains("r_min_sep")) p.r_min_sep = j.at("r_min_sep").get<double>();
  p.validate();
  return p;
}

inline std::vector<NodeSpec> nodes_from_json(const ojson& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": 'nodes' must be an array");
  std::vector<NodeSpec> out;
  for (const auto& n : j) {
    if (n.is_array()) {
      out.push_back({point_from_json(n), Role::Correct});
      continue;
    }
    detail::require_keys(n, where + " node", {"position", "role"});
    const std::string role = n.value("role", std::string("correct"));
    if (role != "correct" && role != "faulty") throw ConfigError(where + ": bad role '" + role + "'");
    out.push_back({point_from_json(n.at("position")), role == "faulty" ? Role::Faulty : Role::Correct});
  }
  return out;
}

/// Layout document as written by `generate`: {"nodes": [...]} with an
/// optional "generator" record.
inline std::vector<NodeSpec> layout_file_nodes(const ojson& doc, const std::string& where) {
  detail::require_keys(doc, where, {"nodes", "generator"});
  return nodes_from_json(doc.at("nodes"), where);
}

/// Resolves a layout source object into node positions.
inline std::vector<NodeSpec> layout_nodes_from_source(const ojson& src, const std::string& base_dir,
                                                      double min_sep) {
  detail::require_keys(src, "layout", {"inline", "file", "grid", "random"});
  if (src.size() != 1) throw ConfigError("layout: exactly one source is required");
  if (src.contains("inline")) {
    const auto& in = src.at("inline");
    if (in.is_array()) return nodes_from_json(in, "layout.inline");
    detail::require_keys(in, "layout.inline", {"nodes"});
    return nodes_from_json(in.at("nodes"), "layout.inline");
  }
  if (src.contains("file")) {
    std::string path = src.at("file").get<std::string>();
    if (!path.empty() && path[0] != '/' && !base_dir.empty()) path = base_dir + "/" + path;
    return layout_file_nodes(parse_json(read_file(path), path), path);
  }
  std::vector<Point> pts;
  if (src.contains("grid")) {
    const auto& g = src.at("grid");
    detail::require_keys(g, "layout.grid", {"s", "rows", "cols"});
    pts = grid_points(g.value("s", 1.0), g.at("rows").get<std::size_t>(), g.at("cols").get<std::size_t>());
  } else {
    const auto& r = src.at("random");
    detail::require_keys(r, "layout.random", {"n", "area", "seed"});
    const auto area = r.at("area");
    if (!area.is_array() || area.size() != 2) throw ConfigError("layout.random: area must be [w, h]");
    pts = random_points(r.at("n").get<std::size_t>(), area[0].get<double>(), area[1].get<double>(),
                        r.value("seed", std::uint64_t{0}), min_sep);
  }
  std::vector<NodeSpec> out;
  for (const auto& p : pts) out.push_back({p, Role::Correct});
  return out;
}

/// A node reference: 0-based index, "uN" (1-based, as in grid figures) or a point.
inline std::size_t resolve_node(const ojson& ref, const std::vector<NodeSpec>& nodes) {
  std::optional<std::size_t> idx;
  if (ref.is_number_unsigned() || ref.is_number_integer()) {
    idx = ref.get<std::size_t>();
  } else if (ref.is_string()) {
    const std::string s = ref.get<std::string>();
    auto digits = [](const std::string& t) {
      return !t.empty() && std::all_of(t.begin(), t.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
    };
    if (digits(s)) {
      idx = std::stoul(s);
    } else if (s.size() >= 2 && s[0] == 'u' && digits(s.substr(1)) && s != "u0") {
      idx = std::stoul(s.substr(1)) - 1;
    } else {
      throw ConfigError("bad node reference '" + s + "'");
    }
  } else {
    const Point p = point_from_json(ref);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].position == p) idx = i;
    }
    if (!idx) throw ConfigError("no node at " + to_string(p));
  }
  if (*idx >= nodes.size()) throw ConfigError("node reference " + ref.dump() + " out of range");
  return *idx;
}

inline LayoutFamily family_from_json(const ojson& j) {
  detail::require_keys(j, "detector.family", {"grid", "sites"});
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::require_keys(g, "detector.family.grid", {"s", "origin"});
    return GridFamily{g.value("s", 1.0), g.contains("origin") ? point_from_json(g.at("origin")) : Point{}};
  }
  SiteFamily f;
  for (const auto& p : j.at("sites")) f.sites.push_back(point_from_json(p));
  return f;
}

inline DetectorConfig detector_from_json(const ojson& j, const std::vector<NodeSpec>& nodes) {
  detail::require_keys(j, "detector", {"kind", "window", "trusted", "family"});
  DetectorConfig d;
  const std::string kind = j.value("kind", std::string("oracle"));
  if (kind == "oracle") d.kind = DetectorKind::Oracle;
  else if (kind == "quiescence") d.kind = DetectorKind::Quiescence;
  else if (kind == "trusted") d.kind = DetectorKind::Trusted;
  else if (kind == "topology") d.kind = DetectorKind::Topology;
  else if (kind == "none") d.kind = DetectorKind::None;
  else throw ConfigError("detector: unknown kind '" + kind + "'");
  d.window = j.value("window", static_cast<std::size_t>(d.kind == DetectorKind::Quiescence ? 16 : 0));
  if (d.kind == DetectorKind::Quiescence && d.window == 0) {
    throw ConfigError("detector: quiescence window must be positive");
  }
  if (j.contains("trusted")) {
    const auto& t = j.at("trusted");
    if (t.is_string() && t.get<std::string>() == "nearest") {
      d.trust_nearest = true;
    } else if (t.is_object()) {
      d.trust_nearest = false;
      for (const auto& [k, v] : t.items()) {
        const std::size_t i = resolve_node(ojson(k), nodes);
        for (const auto& r : v) d.trusted[i].push_back(nodes.at(resolve_node(r, nodes)).position);
      }
    } else {
      throw ConfigError("detector.trusted: expected \"nearest\" or a per-node object");
    }
  }
  if (j.contains("family")) d.family = family_from_json(j.at("family"));
  return d;
}

inline SchedulerPolicy scheduler_from_json(const ojson& j) {
  detail::require_keys(j, "scheduler", {"kind", "seed", "fairness_bound"});
  SchedulerPolicy p;
  const std::string kind = j.value("kind", std::string("round_robin"));
  if (kind == "round_robin") p.kind = SchedulerKind::RoundRobin;
  else if (kind == "seeded_random") p.kind = SchedulerKind::SeededRandom;
  else if (kind == "adversarial_delay") p.kind = SchedulerKind::AdversarialDelay;
  else throw ConfigError("scheduler: unknown kind '" + kind + "'");
  p.seed = j.value("seed", std::uint64_t{0});
  p.fairness_bound = j.value("fairness_bound", std::size_t{0});
  return p;
}

inline AnalysisConfig analysis_from_json(const ojson& j, const std::vector<NodeSpec>& nodes) {
  detail::require_keys(j, "analysis", {"resolution", "max_participants", "foci"});
  AnalysisConfig a;
  a.resolution = j.value("resolution", 0.01);
  a.max_participants = j.value("max_participants", std::size_t{4});
  if (j.contains("foci")) {
    for (const auto& f : j.at("foci")) a.foci.push_back(nodes.at(resolve_node(f, nodes)).position);
  }
  return a;
}

/// Parses a run configuration. `base_dir` resolves relative layout files.
inline RunConfig config_from_json(const ojson& j, const std::string& base_dir = "") {
  detail::require_keys(j, "config", {"layout", "radio", "faulty", "adversary", "detector", "scheduler",
                                     "max_epochs", "universe_cap", "variants", "analysis", "output"});
  if (!j.contains("layout")) throw ConfigError("config: 'layout' is required");
  if (!j.contains("radio")) throw ConfigError("config: 'radio' is required");
  RunConfig c;
  c.layout.params = radio_from_json(j.at("radio"));
  c.layout_source = j.at("layout");
  c.layout.nodes = layout_nodes_from_source(c.layout_source, base_dir, c.layout.params.r_min_sep);
  if (j.contains("faulty")) {
    for (const auto& f : j.at("faulty")) c.layout.nodes.at(resolve_node(f, c.layout.nodes)).role = Role::Faulty;
  }
  try {
    c.layout.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("layout: ") + e.what());
  }
  if (j.contains("adversary")) {
    if (!j.at("adversary").is_array()) throw ConfigError("adversary: expected an array");
    for (const auto& a : j.at("adversary")) c.adversaries.push_back(a);
  }
  if (j.contains("detector")) c.detector = detector_from_json(j.at("detector"), c.layout.nodes);
  if (j.contains("scheduler")) c.scheduler = scheduler_from_json(j.at("scheduler"));
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  if (c.max_epochs == 0) throw ConfigError("max_epochs must be positive");
  c.universe_cap = j.value("universe_cap", c.universe_cap);
  if (j.contains("variants")) {
    c.variants.clear();
    for (const auto& v : j.at("variants")) c.variants.push_back(parse_variant(v.get<std::string>()));
  }
  if (j.contains("analysis")) c.analysis = analysis_from_json(j.at("analysis"), c.layout.nodes);
  if (j.contains("output")) {
    detail::require_keys(j.at("output"), "output", {"dir"});
    c.out_dir = j.at("output").value("dir", c.out_dir);
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const std::string base = slash == std::string::npos ? "" : path.substr(0, slash);
  try {
    return config_from_json(parse_json(read_file(path), path), base);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace sand
