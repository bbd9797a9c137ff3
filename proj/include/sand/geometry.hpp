#pragma once

// Points, layouts and the free-space radio model.
//
// Every piece of signal arithmetic in the library goes through rss_at(), so
// the simulator, the deception analysis and the adversary scripts agree on
// the physics bit for bit. Squared distances are computed directly from
// coordinate differences (no sqrt round trip), which keeps RSS values exact
// for layouts on dyadic coordinates.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sand/error.hpp"

namespace sand {

/// Relative tolerance used when comparing a measured RSS with the RSS a
/// claimed origin would produce. Absorbs floating-point rounding only.
inline constexpr double kRssTolerance = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr auto operator<=>(const Point&, const Point&) = default;
  friend constexpr bool operator==(const Point&, const Point&) = default;
};

inline double distance2(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(distance2(a, b));
}

inline std::string to_string(const Point& p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

struct RadioParams {
  double c = 1.0;           // propagation constant
  double t_r = 1.0;         // TSS of every correct node
  double r_min = 1.0;       // minimum receivable signal strength
  double d_n = 1.0;         // neighborhood distance
  double r_min_sep = 1e-6;  // minimum sender-receiver separation

  /// Range r_t = sqrt(c * T_r / R_min).
  double range() const { return std::sqrt(c * t_r / r_min); }

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(c) || !positive(t_r) || !positive(r_min) || !positive(d_n) ||
        !positive(r_min_sep)) {
      throw InvalidArgument("radio parameters must be finite and positive");
    }
    if (!std::isfinite(range())) throw InvalidArgument("range is not finite");
  }

  /// Parameters with c = R_min = 1 and T_r chosen so that r_t = range.
  static RadioParams with_range(double range, double d_n) {
    RadioParams p;
    p.t_r = range * range;
    p.d_n = d_n;
    p.r_min_sep = 1e-6 * d_n;
    return p;
  }
};

/// R = c T / r^2.
inline double rss_at(const RadioParams& params, double tss, const Point& sender,
                     const Point& receiver) {
  const double r2 = distance2(sender, receiver);
  if (!(r2 >= params.r_min_sep * params.r_min_sep) || r2 == 0.0) {
    throw DegenerateDistance("sender " + to_string(sender) + " and receiver " +
                             to_string(receiver) +
                             " are closer than the minimum separation");
  }
  return params.c * tss / r2;
}

inline double range_of(const RadioParams& params, double tss) {
  if (!(tss > 0.0)) throw InvalidArgument("transmission strength must be positive");
  return std::sqrt(params.c * tss / params.r_min);
}

/// Receipt is inclusive: RSS >= R_min.
inline bool receives(const RadioParams& params, double tss, const Point& sender,
                     const Point& receiver) {
  return rss_at(params, tss, sender, receiver) >= params.r_min;
}

/// RSS the receiver would measure if the claimed origin broadcast at T_r.
inline double expected_rss_from_claim(const RadioParams& params,
                                      const Point& claimed_origin,
                                      const Point& receiver) {
  return rss_at(params, params.t_r, claimed_origin, receiver);
}

inline bool rss_matches(double measured, double expected,
                        double tolerance = kRssTolerance) {
  return std::abs(measured - expected) <= tolerance * expected;
}

enum class Role { Correct, Faulty };

struct NodeSpec {
  Point position;
  Role role = Role::Correct;

  bool correct() const { return role == Role::Correct; }
  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct LayoutSpec {
  std::vector<NodeSpec> nodes;
  RadioParams params;

  void validate() const {
    params.validate();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& p = nodes[i].position;
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw InvalidArgument("node " + std::to_string(i) + " has non-finite coordinates");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (distance(p, nodes[j].position) < params.r_min_sep) {
          throw InvalidArgument("nodes " + std::to_string(j) + " and " +
                                std::to_string(i) + " are closer than r_min_sep");
        }
      }
    }
  }

  std::optional<std::size_t> index_of(const Point& p) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].position == p) return i;
    }
    return std::nullopt;
  }

  bool is_faulty(const Point& p) const {
    auto i = index_of(p);
    return i && nodes[*i].role == Role::Faulty;
  }

  bool is_correct(const Point& p) const {
    auto i = index_of(p);
    return i && nodes[*i].role == Role::Correct;
  }

  /// True if p is within r_min_sep of some node.
  bool occupied(const Point& p) const {
    return std::any_of(nodes.begin(), nodes.end(), [&](const NodeSpec& n) {
      return distance(n.position, p) < params.r_min_sep;
    });
  }

  std::vector<Point> correct_points() const {
    std::vector<Point> out;
    for (const auto& n : nodes) {
      if (n.correct()) out.push_back(n.position);
    }
    return out;
  }

  std::vector<Point> faulty_points() const {
    std::vector<Point> out;
    for (const auto& n : nodes) {
      if (!n.correct()) out.push_back(n.position);
    }
    return out;
  }

  /// Correct nodes other than `self` within d_n of it (boundary inclusive).
  std::vector<Point> correct_neighbors(const Point& self) const {
    std::vector<Point> out;
    for (const auto& n : nodes) {
      if (n.correct() && n.position != self &&
          distance(n.position, self) <= params.d_n) {
        out.push_back(n.position);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// True iff r_t >= 2 d_n (boundary inclusive).
inline bool check_range_condition(const RadioParams& params) {
  return params.range() >= 2.0 * params.d_n;
}

}  // namespace sand
