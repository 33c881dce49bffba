#ifndef ELASTHEAT_GEOMETRY_HPP
#define ELASTHEAT_GEOMETRY_HPP

#include <cmath>
#include <span>
#include <vector>

namespace elastheat {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Closed polyline; consecutive vertices are joined, last joins first.
using Ring = std::vector<Vec2>;

/// Signed area by the shoelace formula (> 0 for counter-clockwise rings).
double signed_area(const Ring& ring);

/// True when no two non-adjacent edges intersect and no vertex repeats.
bool ring_is_simple(const Ring& ring, double eps = 1e-12);

/// Strictly-inside test for a point against an outer ring minus hole rings.
bool point_in_polygon(Vec2 p, const Ring& outer, const std::vector<Ring>& holes);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Exact area of the intersection of a (multi-ring, signed) polygon with the
/// disk B(center, radius). Rings follow the usual orientation convention:
/// outer counter-clockwise, holes clockwise.
double polygon_disk_area(const std::vector<Ring>& rings, Vec2 center, double radius);

/// Proper or touching intersection test for segments [a,b] and [c,d].
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps = 1e-14);

}  // namespace elastheat

#endif
