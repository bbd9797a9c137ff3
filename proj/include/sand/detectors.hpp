#pragma once

// Universe detectors.
//
// A detector looks at what a node has collected and points to the universe
// it believes is real. The abstract classes differ in how strong that
// pointer is; the concrete detectors below realize practical hints
// (quiescence, trusted anchors, known topology) plus a ground-truth oracle
// used as a test instrument.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sand/node.hpp"

namespace sand {

enum class DetectorClass { SPU, WPU, EventuallyPU };

inline const char* to_string(DetectorClass c) {
  switch (c) {
    case DetectorClass::SPU: return "SPU";
    case DetectorClass::WPU: return "WPU";
    case DetectorClass::EventuallyPU: return "EventuallyPU";
  }
  return "?";
}

struct DetectorInput {
  const UniverseSet& universes;
  const DepGraph& dep;
  std::size_t epoch = 0;
  std::size_t last_activity_epoch = 0;  // last new announce or conflict at the node
};

/// Points to the ground-truth neighbor set iff it is one of the node's
/// universes. Decided on the conflict graph directly, so it also works
/// after the enumeration cap overflows.
inline std::optional<Universe> oracle_detector(const DetectorInput& in, Universe ground_truth) {
  std::sort(ground_truth.begin(), ground_truth.end());
  if (in.universes.graph.is_universe(ground_truth)) return ground_truth;
  return std::nullopt;
}

namespace detail {

inline bool settled(const DetectorInput& in, std::size_t window) {
  return in.epoch >= in.last_activity_epoch + window;
}

// Unique largest candidate, or nothing on ties.
inline std::optional<Universe> unique_largest(const std::vector<const Universe*>& candidates) {
  if (candidates.empty()) return std::nullopt;
  std::size_t best = 0;
  for (auto* u : candidates) best = std::max(best, u->size());
  const Universe* pick = nullptr;
  for (auto* u : candidates) {
    if (u->size() != best) continue;
    if (pick) return std::nullopt;
    pick = u;
  }
  return *pick;
}

}  // namespace detail

/// Once no new announce or conflict has arrived for `window` epochs, points
/// to the largest universe whose members all confirmed each other.
inline std::optional<Universe> quiescence_detector(const DetectorInput& in, std::size_t window) {
  if (window == 0) throw InvalidArgument("quiescence window must be positive");
  if (!detail::settled(in, window) || in.universes.overflow) return std::nullopt;

  std::vector<const Universe*> candidates;
  for (const auto& u : in.universes.universes) {
    bool mutual = true;
    for (std::size_t i = 0; i < u.size() && mutual; ++i) {
      for (std::size_t j = 0; j < u.size() && mutual; ++j) {
        mutual = i == j || in.dep.confirmed(u[j], u[i]);
      }
    }
    if (mutual) candidates.push_back(&u);
  }
  return detail::unique_largest(candidates);
}

/// Points to the only universe that contains every trusted neighbor. A node
/// with no trusted neighbor needs a single universe.
inline std::optional<Universe> trusted_set_detector(const DetectorInput& in,
                                                    const std::vector<Point>& trusted,
                                                    std::size_t settle_window = 0) {
  if (!detail::settled(in, settle_window) || in.universes.overflow) return std::nullopt;
  const Universe* pick = nullptr;
  for (const auto& u : in.universes.universes) {
    bool all = std::all_of(trusted.begin(), trusted.end(), [&](const Point& t) {
      return std::binary_search(u.begin(), u.end(), t);
    });
    if (!all) continue;
    if (pick) return std::nullopt;
    pick = &u;
  }
  if (!pick) return std::nullopt;
  return *pick;
}

struct GridFamily {
  double spacing = 1.0;
  Point origin;
};

struct SiteFamily {
  std::vector<Point> sites;
};

/// Positions a deployment is known to use.
using LayoutFamily = std::variant<GridFamily, SiteFamily>;

inline bool on_family(const LayoutFamily& family, const Point& p, double tol = 1e-9) {
  if (auto* g = std::get_if<GridFamily>(&family)) {
    const double gx = (p.x - g->origin.x) / g->spacing;
    const double gy = (p.y - g->origin.y) / g->spacing;
    return std::abs(gx - std::round(gx)) <= tol && std::abs(gy - std::round(gy)) <= tol;
  }
  const auto& sites = std::get<SiteFamily>(family).sites;
  return std::any_of(sites.begin(), sites.end(),
                     [&](const Point& s) { return distance(s, p) <= tol; });
}

/// Points to the largest universe lying entirely on known positions.
inline std::optional<Universe> topology_detector(const DetectorInput& in, const LayoutFamily& family,
                                                 std::size_t settle_window = 0) {
  if (!detail::settled(in, settle_window) || in.universes.overflow) return std::nullopt;
  std::vector<const Universe*> candidates;
  for (const auto& u : in.universes.universes) {
    if (std::all_of(u.begin(), u.end(), [&](const Point& p) { return on_family(family, p); })) {
      candidates.push_back(&u);
    }
  }
  return detail::unique_largest(candidates);
}

/// Detector bound to one node, as used by the simulator.
/// decide() must be a function of node state plus whether the settle window
/// has elapsed; the simulator reuses answers while both stay unchanged.
class UniverseDetector {
 public:
  virtual ~UniverseDetector() = default;
  virtual std::optional<Universe> decide(const DetectorInput& in) const = 0;
  virtual DetectorClass contract() const = 0;
  virtual std::string name() const = 0;
  /// Epochs of inactivity the detector waits for; nonzero makes its answer
  /// depend on time as well as on node state.
  virtual std::size_t settle_window() const { return 0; }
};

class OracleDetector final : public UniverseDetector {
 public:
  explicit OracleDetector(Universe ground_truth) : truth_(std::move(ground_truth)) {}
  std::optional<Universe> decide(const DetectorInput& in) const override {
    return oracle_detector(in, truth_);
  }
  DetectorClass contract() const override { return DetectorClass::SPU; }
  std::string name() const override { return "oracle"; }

 private:
  Universe truth_;
};

class QuiescenceDetector final : public UniverseDetector {
 public:
  explicit QuiescenceDetector(std::size_t window) : window_(window) {
    if (window == 0) throw InvalidArgument("quiescence window must be positive");
  }
  std::optional<Universe> decide(const DetectorInput& in) const override {
    return quiescence_detector(in, window_);
  }
  DetectorClass contract() const override { return DetectorClass::EventuallyPU; }
  std::string name() const override { return "quiescence"; }
  std::size_t settle_window() const override { return window_; }

 private:
  std::size_t window_;
};

class TrustedSetDetector final : public UniverseDetector {
 public:
  TrustedSetDetector(const Point& self, const RadioParams& params, std::vector<Point> trusted,
                     std::size_t settle_window = 0)
      : trusted_(std::move(trusted)), window_(settle_window) {
    for (const auto& t : trusted_) {
      if (distance(t, self) > params.d_n) {
        throw ConfigError("trusted node " + to_string(t) + " is outside the neighborhood of " +
                          to_string(self));
      }
    }
  }
  std::optional<Universe> decide(const DetectorInput& in) const override {
    return trusted_set_detector(in, trusted_, window_);
  }
  DetectorClass contract() const override { return DetectorClass::EventuallyPU; }
  std::string name() const override { return "trusted"; }
  std::size_t settle_window() const override { return window_; }

 private:
  std::vector<Point> trusted_;
  std::size_t window_;
};

class TopologyDetector final : public UniverseDetector {
 public:
  explicit TopologyDetector(LayoutFamily family, std::size_t settle_window = 0)
      : family_(std::move(family)), window_(settle_window) {}
  std::optional<Universe> decide(const DetectorInput& in) const override {
    return topology_detector(in, family_, window_);
  }
  DetectorClass contract() const override { return DetectorClass::EventuallyPU; }
  std::string name() const override { return "topology"; }
  std::size_t settle_window() const override { return window_; }

 private:
  LayoutFamily family_;
  std::size_t window_;
};

/// One detector decision at a node, with whether a real and complete
/// universe was available to point to at that moment.
struct DetectorSample {
  std::size_t epoch = 0;
  std::optional<Universe> pointer;
  bool real_complete_available = false;
};

struct ContractAudit {
  bool accuracy = true;
  bool completeness = true;
  std::string detail;
  bool ok() const { return accuracy && completeness; }
};

/// Checks a node's decision history against a detector class. `real` holds
/// every real node position, `correct_neighbors` the node's ground truth.
/// "Eventually" is judged at the last sample, taken at quiescence.
inline ContractAudit audit_contract(DetectorClass cls, const std::vector<DetectorSample>& history,
                                    const std::vector<Point>& real,
                                    Universe correct_neighbors) {
  std::sort(correct_neighbors.begin(), correct_neighbors.end());
  auto is_real = [&](const Universe& u) {
    return std::all_of(u.begin(), u.end(), [&](const Point& p) {
      return std::find(real.begin(), real.end(), p) != real.end();
    });
  };
  auto complete = [&](const Universe& u) {
    return std::includes(u.begin(), u.end(), correct_neighbors.begin(), correct_neighbors.end());
  };
  ContractAudit audit;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& s = history[i];
    if (!s.pointer) continue;
    bool ok = true;
    switch (cls) {
      case DetectorClass::SPU: ok = is_real(*s.pointer) && complete(*s.pointer); break;
      case DetectorClass::WPU: ok = is_real(*s.pointer); break;
      case DetectorClass::EventuallyPU:
        ok = i + 1 < history.size() || (is_real(*s.pointer) && complete(*s.pointer));
        break;
    }
    if (!ok) {
      audit.accuracy = false;
      audit.detail = "inaccurate pointer at epoch " + std::to_string(s.epoch);
    }
  }
  if (!history.empty() && history.back().real_complete_available) {
    const auto& last = history.back();
    if (!last.pointer || !is_real(*last.pointer) || !complete(*last.pointer)) {
      audit.completeness = false;
      audit.detail = "no pointer to the available real complete universe at quiescence";
    }
  }
  return audit;
}

}  // namespace sand
