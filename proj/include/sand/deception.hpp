#pragma once

// Deception geometry: retinues, deception fields, deception circles and the
// snare search.
//
// The deception field of a retinue is defined by a constraint system rather
// than by closed-form regions: a fictitious point k is admissible for a
// retinue E led by faulty node f iff there is one TSS T such that
//   * every member x measures exactly the RSS a T_r broadcast from k would
//     produce,  T = T_r |fx|^2 / |kx|^2 for all x in E,
//   * every member receives (RSS >= R_min) and has k within d_n,
//   * the nearest correct non-member does not receive.
// Closed forms (annulus, Apollonius circle) are used only to generate
// candidate points for the sampling search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "sand/geometry.hpp"

namespace sand {

struct Retinue {
  Point leader;
  std::vector<Point> members;  // nearest first
  double closure_radius = 0.0;  // distance from leader to the farthest member

  bool contains(const Point& p) const {
    return std::find(members.begin(), members.end(), p) != members.end();
  }
  friend bool operator==(const Retinue&, const Retinue&) = default;
};

namespace detail {

inline bool same_distance(double a2, double b2) {
  return std::abs(a2 - b2) <= 1e-12 * std::max(a2, b2);
}

}  // namespace detail

/// Correct nodes of a layout ordered by distance from a leader, with the
/// retinue sizes that respect distance ties.
class LeaderProfile {
 public:
  LeaderProfile(const LayoutSpec& layout, const Point& leader) : leader_(leader) {
    for (const auto& n : layout.nodes) {
      if (n.correct()) ranked_.push_back({n.position, distance2(n.position, leader)});
    }
    std::stable_sort(ranked_.begin(), ranked_.end(), [](const auto& a, const auto& b) {
      if (a.d2 != b.d2) return a.d2 < b.d2;
      return a.p < b.p;
    });
    for (std::size_t i = 1; i <= ranked_.size(); ++i) {
      if (i == ranked_.size() || !detail::same_distance(ranked_[i].d2, ranked_[i - 1].d2)) {
        sizes_.push_back(i);
      }
    }
  }

  const Point& leader() const { return leader_; }
  std::size_t correct_count() const { return ranked_.size(); }

  /// Admissible retinue sizes, ascending. Tie groups are never split.
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  const Point& member(std::size_t i) const { return ranked_[i].p; }
  double member_distance2(std::size_t i) const { return ranked_[i].d2; }

  Retinue prefix(std::size_t m) const {
    Retinue r;
    r.leader = leader_;
    for (std::size_t i = 0; i < m; ++i) r.members.push_back(ranked_[i].p);
    r.closure_radius = m ? std::sqrt(ranked_[m - 1].d2) : 0.0;
    return r;
  }

  /// Nearest correct node outside a prefix of size m.
  std::optional<Point> first_outside(std::size_t m) const {
    if (m >= ranked_.size()) return std::nullopt;
    return ranked_[m].p;
  }

 private:
  struct Ranked {
    Point p;
    double d2;
  };
  Point leader_;
  std::vector<Ranked> ranked_;
  std::vector<std::size_t> sizes_;
};

/// The m correct nodes nearest to a faulty leader, widened to include every
/// node tied with the m-th.
inline Retinue retinue(const LayoutSpec& layout, const Point& leader, std::size_t m) {
  if (!layout.is_faulty(leader)) throw InvalidArgument("retinue leader must be a faulty node");
  LeaderProfile profile(layout, leader);
  if (m < 1 || m > profile.correct_count()) {
    throw InvalidArgument("retinue size " + std::to_string(m) + " out of range");
  }
  auto it = std::lower_bound(profile.sizes().begin(), profile.sizes().end(), m);
  return profile.prefix(*it);
}

/// TSS with which the retinue leader can impersonate a T_r broadcast from k
/// at every member without any correct non-member receiving it.
inline std::optional<double> deception_tss(const LayoutSpec& layout, const Retinue& ret,
                                           const Point& k,
                                           double tolerance = kRssTolerance) {
  const auto& params = layout.params;
  if (ret.members.empty() || layout.occupied(k)) return std::nullopt;

  std::optional<double> tss;
  for (const auto& x : ret.members) {
    const double kx2 = distance2(k, x);
    if (kx2 > params.d_n * params.d_n) return std::nullopt;
    const double t = params.t_r * distance2(ret.leader, x) / kx2;
    if (!tss) {
      tss = t;
    } else if (std::abs(t - *tss) > tolerance * *tss) {
      return std::nullopt;
    }
  }
  for (const auto& x : ret.members) {
    if (!receives(params, *tss, ret.leader, x)) return std::nullopt;
  }
  // Retinues are downward closed, so only the nearest outsider matters; any
  // other correct node is at least as far from the leader.
  std::optional<double> nearest_out;
  for (const auto& n : layout.nodes) {
    if (!n.correct() || ret.contains(n.position)) continue;
    const double d2 = distance2(n.position, ret.leader);
    if (!nearest_out || d2 < *nearest_out) nearest_out = d2;
  }
  if (nearest_out && params.c * *tss / *nearest_out >= params.r_min) return std::nullopt;
  return tss;
}

/// Apollonius locus {p : |px| / |py| = |fx| / |fy|}.
struct DeceptionCircle {
  Point x;
  Point y;
  double ratio = 1.0;  // |fy| / |fx|
  bool degenerate = false;  // ratio 1: perpendicular bisector of (xy)
  Point center;             // circle center, or the midpoint of (xy) when degenerate
  double radius = 0.0;      // 0 when degenerate
  Point direction;          // unit direction of the bisector when degenerate

  /// Relative deviation of |px|/|py| from |fx|/|fy|.
  double ratio_error(const Point& p) const {
    const double want = 1.0 / ratio;
    const double got = distance(p, x) / distance(p, y);
    return std::abs(got - want) / want;
  }

  Point at(double t) const {
    if (degenerate) return {center.x + t * direction.x, center.y + t * direction.y};
    return {center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
  }
};

/// Radius b a / (b - a) of the circle through the partition of (xy) into
/// portions b and a.
inline double apollonius_radius(double b, double a) { return b * a / std::abs(b - a); }

inline DeceptionCircle deception_circle(const Point& x, const Point& y, const Point& f) {
  if (x == y || x == f || y == f) throw InvalidArgument("deception circle needs three distinct points");
  DeceptionCircle c;
  c.x = x;
  c.y = y;
  const double fx2 = distance2(f, x);
  const double fy2 = distance2(f, y);
  c.ratio = std::sqrt(fy2 / fx2);
  if (detail::same_distance(fx2, fy2)) {
    c.degenerate = true;
    c.center = {(x.x + y.x) / 2, (x.y + y.y) / 2};
    const double len = distance(x, y);
    c.direction = {-(y.y - x.y) / len, (y.x - x.x) / len};
    return c;
  }
  // lambda = |px|/|py|; center = (x - lambda^2 y) / (1 - lambda^2).
  const double l2 = fx2 / fy2;
  c.center = {(x.x - l2 * y.x) / (1 - l2), (x.y - l2 * y.y) / (1 - l2)};
  c.radius = std::sqrt(l2) * distance(x, y) / std::abs(1 - l2);
  return c;
}

/// Fictitious positions available to a leader whose only correct receiver
/// is its nearest correct node x. Derived from the constraint system:
/// k must satisfy  r_t |fx| / |fy| < |kx| <= min(r_t, d_n).
struct SingleReceiverRegion {
  Point receiver;
  bool empty = false;             // x tied with another correct node
  bool has_second = false;        // a second correct node exists
  double inner_radius = 0.0;      // exclusive
  double outer_radius = 0.0;      // inclusive
  double nominal_inner = 0.0;     // |fy|, the ring drawn in the literature

  bool contains(const Point& k) const {
    if (empty) return false;
    const double d = distance(k, receiver);
    return d <= outer_radius && (!has_second || d > inner_radius) && d > 0.0;
  }
};

inline SingleReceiverRegion single_receiver_region(const LayoutSpec& layout, const Point& f,
                                                   const Point& x) {
  if (!layout.is_faulty(f)) throw InvalidArgument("f must be faulty");
  LeaderProfile profile(layout, f);
  if (profile.correct_count() == 0 || profile.member(0) != x) {
    throw InvalidArgument("x must be the correct node nearest to f");
  }
  const auto& params = layout.params;
  SingleReceiverRegion region;
  region.receiver = x;
  region.outer_radius = std::min(params.range(), params.d_n);
  if (profile.sizes().front() > 1) {
    region.empty = true;
    return region;
  }
  if (auto y = profile.first_outside(1)) {
    region.has_second = true;
    region.nominal_inner = distance(f, *y);
    region.inner_radius = params.range() * distance(f, x) / region.nominal_inner;
  }
  return region;
}

enum class SnareKind { Simple, Perfect };

inline const char* to_string(SnareKind k) {
  return k == SnareKind::Perfect ? "perfect" : "simple";
}

struct RetinueWitness {
  Retinue retinue;
  double tss = 0.0;
};

struct SnareReport {
  Point focus;
  Point snare_point;
  SnareKind kind = SnareKind::Simple;
  std::vector<RetinueWitness> retinues;
  /// Correct neighbors of the focus that observe neither explicit nor
  /// implicit conflicts when the retinues broadcast.
  std::vector<Point> conflict_free_set;
};

struct SnareSearchOptions {
  std::size_t max_participants = 4;
  double tolerance = kRssTolerance;
};

/// Classifies a single candidate point. Returns the perfect witness when one
/// exists, otherwise a simple witness, otherwise nothing.
class SnareEvaluator {
 public:
  SnareEvaluator(const LayoutSpec& layout, const Point& focus, SnareSearchOptions opts = {})
      : layout_(layout), focus_(focus), opts_(opts) {
    if (!layout.is_correct(focus)) throw InvalidArgument("snare focus must be a correct node");
    for (const auto& f : layout.faulty_points()) profiles_.emplace_back(layout, f);
    correct_ = layout.correct_points();
  }

  const std::vector<LeaderProfile>& profiles() const { return profiles_; }

  std::optional<SnareReport> evaluate(const Point& k) const {
    const auto& params = layout_.params;
    if (distance2(k, focus_) > params.d_n * params.d_n || layout_.occupied(k)) return std::nullopt;

    // Feasible retinues per leader at k.
    std::vector<std::vector<RetinueWitness>> options(profiles_.size());
    const double reach = std::min(params.range(), params.d_n) * (1 + 1e-6);
    bool focus_reachable = false;
    for (std::size_t l = 0; l < profiles_.size(); ++l) {
      const auto& prof = profiles_[l];
      std::size_t prev = 0;
      for (std::size_t m : prof.sizes()) {
        bool too_far = false;
        for (std::size_t i = prev; i < m; ++i) {
          if (distance(prof.member(i), k) > reach) too_far = true;
        }
        if (too_far) break;  // every larger retinue contains the far member too
        prev = m;
        Retinue r = prof.prefix(m);
        if (auto t = deception_tss(layout_, r, k, opts_.tolerance)) {
          focus_reachable = focus_reachable || r.contains(focus_);
          options[l].push_back({std::move(r), *t});
        }
      }
    }
    if (!focus_reachable) return std::nullopt;

    std::vector<Point> must_cover;
    for (const auto& v : correct_) {
      if (expected_rss_from_claim(params, k, v) >= params.r_min &&
          (v == focus_ || expected_rss_from_claim(params, focus_, v) >= params.r_min)) {
        must_cover.push_back(v);
      }
    }

    std::vector<const RetinueWitness*> chosen;
    std::vector<const RetinueWitness*> best;
    for (std::size_t budget = 1; budget <= opts_.max_participants && best.empty(); ++budget) {
      search(options, 0, budget, must_cover, chosen, best);
    }
    SnareReport report;
    report.focus = focus_;
    report.snare_point = k;
    if (!best.empty()) {
      report.kind = SnareKind::Perfect;
      for (auto* w : best) report.retinues.push_back(*w);
    } else {
      report.kind = SnareKind::Simple;
      report.retinues.push_back(*simple_witness(options));
    }
    report.conflict_free_set = conflict_free(report, k);
    return report;
  }

 private:
  // Depth-first over leaders; each leader abstains or contributes one option.
  void search(const std::vector<std::vector<RetinueWitness>>& options, std::size_t leader,
              std::size_t budget, const std::vector<Point>& must_cover,
              std::vector<const RetinueWitness*>& chosen,
              std::vector<const RetinueWitness*>& best) const {
    if (!best.empty()) return;
    if (leader == options.size() || chosen.size() == budget) {
      if (chosen.size() != budget) return;
      auto covered = [&](const Point& p) {
        return std::any_of(chosen.begin(), chosen.end(),
                           [&](const RetinueWitness* w) { return w->retinue.contains(p); });
      };
      if (covered(focus_) && std::all_of(must_cover.begin(), must_cover.end(), covered)) {
        best = chosen;
      }
      return;
    }
    for (const auto& opt : options[leader]) {
      chosen.push_back(&opt);
      search(options, leader + 1, budget, must_cover, chosen, best);
      chosen.pop_back();
      if (!best.empty()) return;
    }
    search(options, leader + 1, budget, must_cover, chosen, best);
  }

  const RetinueWitness* simple_witness(
      const std::vector<std::vector<RetinueWitness>>& options) const {
    for (const auto& opts : options) {
      for (const auto& w : opts) {
        if (w.retinue.contains(focus_)) return &w;
      }
    }
    return nullptr;
  }

  std::vector<Point> conflict_free(const SnareReport& report, const Point& k) const {
    const auto& params = layout_.params;
    std::vector<Point> out;
    for (const auto& v : correct_) {
      if (distance(v, focus_) > params.d_n) continue;
      bool member = std::any_of(report.retinues.begin(), report.retinues.end(),
                                [&](const RetinueWitness& w) { return w.retinue.contains(v); });
      if (member || expected_rss_from_claim(params, k, v) < params.r_min) out.push_back(v);
    }
    return out;
  }

  const LayoutSpec& layout_;
  Point focus_;
  SnareSearchOptions opts_;
  std::vector<LeaderProfile> profiles_;
  std::vector<Point> correct_;
};

namespace detail {

// One-dimensional loci (circle or line) on which multi-member retinues must
// place k.
struct Locus {
  DeceptionCircle circle;
  std::size_t leader = 0;
};

inline void sample_locus_in_disc(const DeceptionCircle& c, const Point& focus, double radius,
                                 double resolution, std::vector<Point>& out) {
  if (c.degenerate) {
    // Foot of the focus on the bisector.
    const Point rel{focus.x - c.center.x, focus.y - c.center.y};
    const double t0 = rel.x * c.direction.x + rel.y * c.direction.y;
    const Point foot = c.at(t0);
    const double h2 = radius * radius - distance2(foot, focus);
    if (h2 < 0) return;
    const double h = std::sqrt(h2);
    for (double t = -h; t <= h; t += resolution) out.push_back(c.at(t0 + t));
    return;
  }
  const double d = distance(c.center, focus);
  const double R = c.radius;
  if (d > R + radius || R > d + radius) return;
  const double phi = std::atan2(focus.y - c.center.y, focus.x - c.center.x);
  double half = std::numbers::pi;
  if (d + R > radius && d > 0) {
    const double cosv = std::clamp((R * R + d * d - radius * radius) / (2 * R * d), -1.0, 1.0);
    half = std::acos(cosv);
  }
  const double step = resolution / R;
  for (double a = -half; a <= half; a += step) out.push_back(c.at(phi + a));
}

inline void intersect(const DeceptionCircle& a, const DeceptionCircle& b, std::vector<Point>& out) {
  auto line_of = [](const DeceptionCircle& c) { return std::pair{c.center, c.direction}; };
  if (a.degenerate && b.degenerate) {
    auto [p, u] = line_of(a);
    auto [q, v] = line_of(b);
    const double den = u.x * v.y - u.y * v.x;
    if (std::abs(den) < 1e-15) return;
    const double t = ((q.x - p.x) * v.y - (q.y - p.y) * v.x) / den;
    out.push_back({p.x + t * u.x, p.y + t * u.y});
    return;
  }
  if (a.degenerate || b.degenerate) {
    const auto& line = a.degenerate ? a : b;
    const auto& circ = a.degenerate ? b : a;
    const Point rel{circ.center.x - line.center.x, circ.center.y - line.center.y};
    const double t0 = rel.x * line.direction.x + rel.y * line.direction.y;
    const Point foot = line.at(t0);
    const double h2 = circ.radius * circ.radius - distance2(foot, circ.center);
    if (h2 < 0) return;
    const double h = std::sqrt(h2);
    out.push_back(line.at(t0 - h));
    out.push_back(line.at(t0 + h));
    return;
  }
  const double d = distance(a.center, b.center);
  if (d == 0 || d > a.radius + b.radius || d < std::abs(a.radius - b.radius)) return;
  const double l = (a.radius * a.radius - b.radius * b.radius + d * d) / (2 * d);
  const double h = std::sqrt(std::max(0.0, a.radius * a.radius - l * l));
  const Point u{(b.center.x - a.center.x) / d, (b.center.y - a.center.y) / d};
  const Point m{a.center.x + l * u.x, a.center.y + l * u.y};
  out.push_back({m.x - h * u.y, m.y + h * u.x});
  out.push_back({m.x + h * u.y, m.y - h * u.x});
}

}  // namespace detail

/// Grid points of spacing `resolution` in the closed disc of radius d_n
/// around the focus, in row-major order.
inline std::vector<Point> grid_candidates(const Point& focus, double radius, double resolution) {
  std::vector<Point> out;
  const auto n = static_cast<long>(std::floor(radius / resolution));
  for (long i = -n; i <= n; ++i) {
    for (long j = -n; j <= n; ++j) {
      const double dx = static_cast<double>(i) * resolution;
      const double dy = static_cast<double>(j) * resolution;
      if (dx * dx + dy * dy <= radius * radius) out.push_back({focus.x + dx, focus.y + dy});
    }
  }
  return out;
}

/// Candidate fictitious positions: the sampling grid, samples along every
/// deception circle of a multi-member retinue, and pairwise intersections of
/// circles belonging to different leaders.
inline std::vector<Point> snare_candidates(const LayoutSpec& layout, const Point& focus,
                                           double resolution,
                                           const std::vector<LeaderProfile>& profiles) {
  const double radius = layout.params.d_n;
  std::vector<Point> out = grid_candidates(focus, radius, resolution);

  std::vector<detail::Locus> loci;
  for (std::size_t l = 0; l < profiles.size(); ++l) {
    const auto& prof = profiles[l];
    for (std::size_t m : prof.sizes()) {
      if (m < 2) continue;
      const Point& x = prof.member(0);
      const Point& y = prof.member(1);
      // Every multi-member retinue of a leader shares its two nearest members.
      const bool dup = std::any_of(loci.begin(), loci.end(), [&](const detail::Locus& c) {
        return c.leader == l && c.circle.x == x && c.circle.y == y;
      });
      if (dup) continue;
      loci.push_back({deception_circle(x, y, prof.leader()), l});
    }
  }
  for (const auto& locus : loci) {
    detail::sample_locus_in_disc(locus.circle, focus, radius, resolution, out);
  }
  for (std::size_t a = 0; a < loci.size(); ++a) {
    for (std::size_t b = a + 1; b < loci.size(); ++b) {
      if (loci[a].leader == loci[b].leader) continue;
      detail::intersect(loci[a].circle, loci[b].circle, out);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Searches the neighborhood of `focus` for simple and perfect snares.
/// Every returned report is witness-verified; completeness holds up to the
/// sampling resolution. Reports are sorted by snare point.
inline std::vector<SnareReport> find_snares(const LayoutSpec& layout, const Point& focus,
                                            double resolution, SnareSearchOptions opts = {}) {
  if (!(resolution > 0)) throw InvalidArgument("resolution must be positive");
  SnareEvaluator eval(layout, focus, opts);
  std::vector<SnareReport> out;
  if (eval.profiles().empty()) return out;
  // Sampled loci and exact intersections can land on one point up to rounding.
  const double same = 1e-9 * layout.params.d_n;
  for (const auto& k : snare_candidates(layout, focus, resolution, eval.profiles())) {
    const bool seen = std::any_of(out.rbegin(), out.rend(), [&](const SnareReport& r) {
      return distance(r.snare_point, k) <= same;
    });
    if (seen) continue;
    if (auto r = eval.evaluate(k)) out.push_back(std::move(*r));
  }
  return out;
}

}  // namespace sand
