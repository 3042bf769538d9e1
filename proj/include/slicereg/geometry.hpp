#pragma once

#include <cmath>
#include <vector>

namespace slicereg {

/// Planar point in slice coordinates: (x, y) stands for x + yJ.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

using Polyline = std::vector<Point2>;

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Point2 a) { return std::hypot(a.x, a.y); }

double point_segment_distance(Point2 p, Point2 a, Point2 b);
double point_polyline_distance(Point2 p, const Polyline& line);

/// Closed-segment intersection test (touching counts).
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);
bool segment_crosses(Point2 a, Point2 b, const Polyline& line);
bool segment_crosses_any(Point2 a, Point2 b, const std::vector<Polyline>& cuts);

/// Reflection (x, y) -> (x, -y).
Polyline reflected(const Polyline& line);

struct Box2 {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool contains(Point2 p, double pad = 0.0) const {
    return p.x >= xmin - pad && p.x <= xmax + pad && p.y >= ymin - pad && p.y <= ymax + pad;
  }
};

Box2 bounding_box(const Polyline& line);

/// Distance from p to the closed segment set, skipping segments whose
/// bounding box is farther than `cutoff`. Returns `cutoff` when nothing is closer.
double polyline_distance_capped(Point2 p, const Polyline& line, double cutoff);

}  // namespace slicereg
