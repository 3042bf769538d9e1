#include "slicereg/geometry.hpp"

#include <algorithm>
#include <limits>

namespace slicereg {

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return length(p - (a + t * ab));
}

double point_polyline_distance(Point2 p, const Polyline& line) {
  if (line.empty()) return std::numeric_limits<double>::infinity();
  if (line.size() == 1) return length(p - line[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < line.size(); ++s) {
    best = std::min(best, point_segment_distance(p, line[s], line[s + 1]));
  }
  return best;
}

double polyline_distance_capped(Point2 p, const Polyline& line, double cutoff) {
  double best = cutoff;
  for (std::size_t s = 0; s + 1 < line.size(); ++s) {
    const Point2 a = line[s];
    const Point2 b = line[s + 1];
    if (p.x < std::min(a.x, b.x) - best || p.x > std::max(a.x, b.x) + best ||
        p.y < std::min(a.y, b.y) - best || p.y > std::max(a.y, b.y) + best) {
      continue;
    }
    best = std::min(best, point_segment_distance(p, a, b));
  }
  return best;
}

namespace {

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x),
                                 std::abs(c.y - a.y), 1.0});
  if (std::abs(v) <= 1e-14 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return p.x >= std::min(a.x, b.x) - 1e-14 && p.x <= std::max(a.x, b.x) + 1e-14 &&
         p.y >= std::min(a.y, b.y) - 1e-14 && p.y <= std::max(a.y, b.y) + 1e-14;
}

}  // namespace

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  if (std::max(a.x, b.x) < std::min(c.x, d.x) || std::max(c.x, d.x) < std::min(a.x, b.x) ||
      std::max(a.y, b.y) < std::min(c.y, d.y) || std::max(c.y, d.y) < std::min(a.y, b.y)) {
    return false;
  }
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool segment_crosses(Point2 a, Point2 b, const Polyline& line) {
  for (std::size_t s = 0; s + 1 < line.size(); ++s) {
    if (segments_intersect(a, b, line[s], line[s + 1])) return true;
  }
  return false;
}

bool segment_crosses_any(Point2 a, Point2 b, const std::vector<Polyline>& cuts) {
  for (const auto& line : cuts) {
    if (segment_crosses(a, b, line)) return true;
  }
  return false;
}

Polyline reflected(const Polyline& line) {
  Polyline out;
  out.reserve(line.size());
  for (const auto& p : line) out.push_back({p.x, -p.y});
  return out;
}

Box2 bounding_box(const Polyline& line) {
  Box2 b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : line) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  return b;
}

}  // namespace slicereg
