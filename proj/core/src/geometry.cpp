#include "elastheat/geometry.hpp"

#include <algorithm>

namespace elastheat {

double signed_area(const Ring& ring) {
  double a = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % n];
    a += cross(p, q);
  }
  return 0.5 * a;
}

namespace {

int orient_sign(Vec2 a, Vec2 b, Vec2 c, double eps) {
  const double v = cross(b - a, c - a);
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p, double eps) {
  if (std::min(a.x, b.x) - eps > p.x || p.x > std::max(a.x, b.x) + eps) return false;
  if (std::min(a.y, b.y) - eps > p.y || p.y > std::max(a.y, b.y) + eps) return false;
  return std::abs(cross(b - a, p - a)) <= eps * (1.0 + dist(a, b));
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps) {
  const int o1 = orient_sign(a, b, c, eps);
  const int o2 = orient_sign(a, b, d, eps);
  const int o3 = orient_sign(c, d, a, eps);
  const int o4 = orient_sign(c, d, b, eps);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c, eps)) return true;
  if (o2 == 0 && on_segment(a, b, d, eps)) return true;
  if (o3 == 0 && on_segment(c, d, a, eps)) return true;
  if (o4 == 0 && on_segment(c, d, b, eps)) return true;
  return false;
}

bool ring_is_simple(const Ring& ring, double eps) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(ring[i], ring[j]) <= eps) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % n];
    if (dist(a, b) <= eps) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip edges sharing a vertex with edge i.
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Vec2 c = ring[j];
      const Vec2 d = ring[(j + 1) % n];
      if (segments_intersect(a, b, c, d, eps)) return false;
    }
  }
  return true;
}

namespace {

// Crossing-number parity for a single ring.
bool inside_ring(Vec2 p, const Ring& ring) {
  bool in = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) in = !in;
    }
  }
  return in;
}

}  // namespace

bool point_in_polygon(Vec2 p, const Ring& outer, const std::vector<Ring>& holes) {
  if (!inside_ring(p, outer)) return false;
  for (const Ring& h : holes) {
    if (inside_ring(p, h)) return false;
  }
  return true;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return dist(p, a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, a + t * ab);
}

namespace {

// Contribution of one directed edge (coordinates relative to the disk center)
// to the Green's-theorem area integral of polygon ∩ disk: straight pieces
// inside the disk contribute triangle areas with the origin, pieces outside
// contribute circular sectors spanning the same angular sweep.
double edge_disk_contribution(Vec2 a, Vec2 b, double R) {
  // Split [a,b] at its intersections with the circle |x| = R.
  const Vec2 d = b - a;
  const double A = dot(d, d);
  if (A == 0.0) return 0.0;
  const double B = 2.0 * dot(a, d);
  const double C = dot(a, a) - R * R;
  const double disc = B * B - 4.0 * A * C;
  double ts[4] = {0.0, 1.0, 1.0, 1.0};
  int nt = 1;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double t1 = (-B - sq) / (2.0 * A);
    const double t2 = (-B + sq) / (2.0 * A);
    if (t1 > 0.0 && t1 < 1.0) ts[nt++] = t1;
    if (t2 > 0.0 && t2 < 1.0 && t2 > ts[nt - 1]) ts[nt++] = t2;
  }
  ts[nt++] = 1.0;
  double total = 0.0;
  for (int i = 0; i + 1 < nt; ++i) {
    const Vec2 p = a + ts[i] * d;
    const Vec2 q = a + ts[i + 1] * d;
    // Each sub-segment lies entirely inside or outside; classify by midpoint.
    const Vec2 m = a + (0.5 * (ts[i] + ts[i + 1])) * d;
    if (dot(m, m) <= R * R) {
      total += 0.5 * cross(p, q);
    } else {
      total += 0.5 * R * R * std::atan2(cross(p, q), dot(p, q));
    }
  }
  return total;
}

}  // namespace

double polygon_disk_area(const std::vector<Ring>& rings, Vec2 center, double radius) {
  double area = 0.0;
  for (const Ring& ring : rings) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = ring[i] - center;
      const Vec2 b = ring[(i + 1) % n] - center;
      area += edge_disk_contribution(a, b, radius);
    }
  }
  return area;
}

}  // namespace elastheat
