#pragma once

// SVG rendering of a layout with deception circles and snare points.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "sand/deception.hpp"

namespace sand {

inline std::string layout_svg(const LayoutSpec& layout, const std::vector<SnareReport>& snares) {
  double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
  double hi_x = std::numeric_limits<double>::lowest(), hi_y = hi_x;
  for (const auto& n : layout.nodes) {
    lo_x = std::min(lo_x, n.position.x);
    lo_y = std::min(lo_y, n.position.y);
    hi_x = std::max(hi_x, n.position.x);
    hi_y = std::max(hi_y, n.position.y);
  }
  if (layout.nodes.empty()) lo_x = lo_y = hi_x = hi_y = 0.0;
  const double pad = layout.params.d_n;
  lo_x -= pad;
  lo_y -= pad;
  hi_x += pad;
  hi_y += pad;
  const double scale = 400.0 / std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  auto X = [&](double x) { return (x - lo_x) * scale; };
  auto Y = [&](double y) { return (hi_y - y) * scale; };

  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.1f\" height=\"%.1f\">\n",
                (hi_x - lo_x) * scale, (hi_y - lo_y) * scale);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Deception circle of each faulty node for its two nearest correct nodes.
  for (const auto& f : layout.faulty_points()) {
    LeaderProfile prof(layout, f);
    const auto sizes = prof.sizes();
    if (sizes.empty() || sizes.front() != 1 || prof.correct_count() < 2) continue;
    const auto c = deception_circle(prof.member(0), prof.member(1), f);
    if (c.degenerate) continue;
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"none\" stroke=\"#d08000\" "
                  "stroke-dasharray=\"4 3\"/>\n",
                  X(c.center.x), Y(c.center.y), c.radius * scale);
    s += buf;
  }
  for (const auto& r : snares) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"1.5\" fill=\"%s\"/>\n",
                  X(r.snare_point.x), Y(r.snare_point.y),
                  r.kind == SnareKind::Perfect ? "#a000a0" : "#e0a0e0");
    s += buf;
  }
  for (const auto& n : layout.nodes) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"5\" fill=\"%s\" stroke=\"black\"/>\n",
                  X(n.position.x), Y(n.position.y), n.correct() ? "#4080ff" : "#ff4040");
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace sand
