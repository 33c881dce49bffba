#include "elastheat/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace elastheat {

int PolygonalDomain::edge_count() const {
  int n = static_cast<int>(outer.size());
  for (const Ring& h : holes) n += static_cast<int>(h.size());
  return n;
}

std::pair<Vec2, Vec2> PolygonalDomain::edge(int e) const {
  int n0 = static_cast<int>(outer.size());
  if (e < n0) return {outer[e], outer[(e + 1) % n0]};
  e -= n0;
  for (const Ring& h : holes) {
    const int nh = static_cast<int>(h.size());
    if (e < nh) return {h[e], h[(e + 1) % nh]};
    e -= nh;
  }
  throw std::out_of_range("PolygonalDomain::edge");
}

double PolygonalDomain::area() const {
  double a = signed_area(outer);
  for (const Ring& h : holes) a += signed_area(h);  // holes are negative
  return a;
}

double PolygonalDomain::diameter() const {
  double d = 0.0;
  std::vector<Vec2> pts = outer;
  for (const Ring& h : holes) pts.insert(pts.end(), h.begin(), h.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, dist(pts[i], pts[j]));
  }
  return d;
}

bool PolygonalDomain::has_dirichlet() const {
  return std::any_of(edge_labels.begin(), edge_labels.end(),
                     [](BoundaryLabel l) { return l == BoundaryLabel::Dirichlet; });
}

bool PolygonalDomain::has_neumann() const {
  return std::any_of(edge_labels.begin(), edge_labels.end(),
                     [](BoundaryLabel l) { return l == BoundaryLabel::Neumann; });
}

void PolygonalDomain::validate() const {
  if (outer.size() < 3) throw std::invalid_argument("domain: outer ring needs >= 3 vertices");
  if (!ring_is_simple(outer)) {
    throw std::invalid_argument("domain: outer ring degenerate or self-intersecting");
  }
  if (signed_area(outer) <= 0.0) {
    throw std::invalid_argument("domain: outer ring must be positively oriented");
  }
  for (std::size_t hi = 0; hi < holes.size(); ++hi) {
    const Ring& h = holes[hi];
    if (h.size() < 3 || !ring_is_simple(h)) {
      throw std::invalid_argument("domain: hole ring degenerate or self-intersecting");
    }
    if (signed_area(h) >= 0.0) {
      throw std::invalid_argument("domain: hole rings must be negatively oriented");
    }
    for (const Vec2& v : h) {
      if (!point_in_polygon(v, outer, {})) {
        throw std::invalid_argument("domain: hole vertex outside the outer ring");
      }
    }
    // Hole edges may not cross outer or other hole edges.
    auto edges_cross = [](const Ring& r1, const Ring& r2) {
      for (std::size_t i = 0; i < r1.size(); ++i) {
        for (std::size_t j = 0; j < r2.size(); ++j) {
          if (segments_intersect(r1[i], r1[(i + 1) % r1.size()], r2[j],
                                 r2[(j + 1) % r2.size()])) {
            return true;
          }
        }
      }
      return false;
    };
    if (edges_cross(h, outer)) throw std::invalid_argument("domain: hole touches outer ring");
    for (std::size_t hj = hi + 1; hj < holes.size(); ++hj) {
      if (edges_cross(h, holes[hj])) throw std::invalid_argument("domain: holes intersect");
      if (point_in_polygon(holes[hj][0], h, {})) {
        throw std::invalid_argument("domain: nested holes");
      }
    }
  }
  if (static_cast<int>(edge_labels.size()) != edge_count()) {
    throw std::invalid_argument("domain: every boundary edge needs exactly one label");
  }
  if (diameter() <= 0.0) throw std::invalid_argument("domain: zero diameter");
}

double PolygonalDomain::distance_to_neumann(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < edge_count(); ++e) {
    if (edge_labels[e] != BoundaryLabel::Neumann) continue;
    const auto [a, b] = edge(e);
    d = std::min(d, point_segment_distance(p, a, b));
  }
  return d;
}

double PolygonalDomain::distance_to_boundary(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < edge_count(); ++e) {
    const auto [a, b] = edge(e);
    d = std::min(d, point_segment_distance(p, a, b));
  }
  return d;
}

bool PolygonalDomain::contains(Vec2 p) const { return point_in_polygon(p, outer, holes); }

PolygonalDomain PolygonalDomain::rectangle(Vec2 lo, Vec2 hi,
                                           const std::vector<BoundaryLabel>& labels) {
  PolygonalDomain d;
  d.outer = {{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
  d.edge_labels = labels;
  d.validate();
  return d;
}

namespace {

// Maximal runs of equally-labeled consecutive edges on one ring, as
// polylines. Cyclic: a run may wrap past the ring start.
void collect_arcs(const Ring& ring, const std::vector<BoundaryLabel>& labels, int label_offset,
                  std::vector<std::vector<Vec2>>& d_arcs, std::vector<std::vector<Vec2>>& n_arcs) {
  const int n = static_cast<int>(ring.size());
  if (n == 0) return;
  bool uniform = true;
  for (int e = 1; e < n; ++e) {
    if (labels[label_offset + e] != labels[label_offset]) uniform = false;
  }
  if (uniform) {
    std::vector<Vec2> arc(ring.begin(), ring.end());
    arc.push_back(ring[0]);
    (labels[label_offset] == BoundaryLabel::Dirichlet ? d_arcs : n_arcs).push_back(arc);
    return;
  }
  // Start at a label change so runs are contiguous.
  int start = 0;
  while (labels[label_offset + start] == labels[label_offset + ((start + n - 1) % n)]) ++start;
  int e = start;
  do {
    const BoundaryLabel lab = labels[label_offset + e];
    std::vector<Vec2> arc;
    arc.push_back(ring[e]);
    while (labels[label_offset + e] == lab) {
      arc.push_back(ring[(e + 1) % n]);
      e = (e + 1) % n;
      if (e == start) break;
    }
    (lab == BoundaryLabel::Dirichlet ? d_arcs : n_arcs).push_back(arc);
  } while (e != start);
}

double arc_length(const std::vector<Vec2>& arc) {
  double l = 0.0;
  for (std::size_t i = 0; i + 1 < arc.size(); ++i) l += dist(arc[i], arc[i + 1]);
  return l;
}

Vec2 arc_point(const std::vector<Vec2>& arc, double s) {
  for (std::size_t i = 0; i + 1 < arc.size(); ++i) {
    const double seg = dist(arc[i], arc[i + 1]);
    if (s <= seg || i + 2 == arc.size()) {
      const double t = seg > 0.0 ? std::clamp(s / seg, 0.0, 1.0) : 0.0;
      return arc[i] + t * (arc[i + 1] - arc[i]);
    }
    s -= seg;
  }
  return arc.back();
}

double distance_to_arcs(Vec2 p, const std::vector<std::vector<Vec2>>& arcs) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& arc : arcs) {
    if (arc.size() == 1) {
      d = std::min(d, dist(p, arc[0]));
      continue;
    }
    for (std::size_t i = 0; i + 1 < arc.size(); ++i) {
      d = std::min(d, point_segment_distance(p, arc[i], arc[i + 1]));
    }
  }
  return d;
}

}  // namespace

CorkscrewResult corkscrew_probe(const std::vector<std::vector<Vec2>>& d_arcs,
                                const std::vector<std::vector<Vec2>>& n_arcs, double r0,
                                double m_ratio, int probe_count) {
  if (probe_count <= 0) throw std::invalid_argument("corkscrew: probe_count must be positive");
  if (r0 <= 0.0 || m_ratio < 1.0) throw std::invalid_argument("corkscrew: need r0 > 0, M >= 1");
  CorkscrewResult res;
  if (d_arcs.empty()) {
    res.pass = true;
    res.vacuous = true;
    res.note = "no Dirichlet set";
    return res;
  }
  if (n_arcs.empty()) {
    res.pass = true;
    res.vacuous = true;
    res.note = "no D/N interface";
    return res;
  }

  // Probe set: D-arc endpoints plus arc midpoints.
  std::vector<Vec2> probes;
  for (const auto& arc : d_arcs) {
    probes.push_back(arc.front());
    probes.push_back(arc.back());
    probes.push_back(arc_point(arc, 0.5 * arc_length(arc)));
  }

  // Candidate points on D, sampled by arc length. The radius ladder stops
  // at the candidate spacing: below it the search would report spurious
  // failures that reflect probe density, not geometry.
  std::vector<Vec2> candidates;
  double spacing = 0.0;
  for (const auto& arc : d_arcs) {
    if (arc.size() == 1) {
      candidates.push_back(arc[0]);
      continue;
    }
    const double len = arc_length(arc);
    spacing = std::max(spacing, len / probe_count);
    for (int i = 0; i <= probe_count; ++i) {
      candidates.push_back(arc_point(arc, len * static_cast<double>(i) / probe_count));
    }
  }

  double worst = std::numeric_limits<double>::infinity();
  for (const Vec2& x : probes) {
    for (int j = 0; j < 9; ++j) {
      const double r = r0 / static_cast<double>(1 << j);
      if (j > 0 && r < 2.0 * spacing) break;
      double best = 0.0;
      for (const Vec2& xr : candidates) {
        if (dist(x, xr) > r * (1.0 + 1e-12)) continue;
        best = std::max(best, distance_to_arcs(xr, n_arcs) / r);
      }
      worst = std::min(worst, best);
    }
  }
  res.worst_ratio = worst;
  res.pass = worst + 1e-12 >= 1.0 / m_ratio;
  return res;
}

CorkscrewResult check_corkscrew(const PolygonalDomain& domain, double r0, double m_ratio,
                                int probe_count) {
  domain.validate();
  if (r0 > domain.diameter()) throw std::invalid_argument("corkscrew: r0 exceeds the diameter");
  std::vector<std::vector<Vec2>> d_arcs, n_arcs;
  int off = 0;
  collect_arcs(domain.outer, domain.edge_labels, off, d_arcs, n_arcs);
  off += static_cast<int>(domain.outer.size());
  for (const Ring& h : domain.holes) {
    collect_arcs(h, domain.edge_labels, off, d_arcs, n_arcs);
    off += static_cast<int>(h.size());
  }
  return corkscrew_probe(d_arcs, n_arcs, r0, m_ratio, probe_count);
}

double interior_density_beta(const PolygonalDomain& domain, int probe_count, double r_max) {
  if (probe_count <= 0) throw std::invalid_argument("density: probe_count must be positive");
  std::vector<Ring> rings;
  rings.push_back(domain.outer);
  for (const Ring& h : domain.holes) rings.push_back(h);

  std::vector<Vec2> probes;
  for (const Ring& ring : rings) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      probes.push_back(ring[i]);
      const Vec2 next = ring[(i + 1) % n];
      for (int k = 1; k < probe_count; ++k) {
        probes.push_back(ring[i] + (static_cast<double>(k) / probe_count) * (next - ring[i]));
      }
    }
  }

  const double r0 = r_max > 0.0 ? r_max : domain.diameter() / 2.0;
  double beta = std::numeric_limits<double>::infinity();
  for (const Vec2& x : probes) {
    for (int j = 0; j < 7; ++j) {
      const double r = r0 / static_cast<double>(1 << j);
      const double a = polygon_disk_area(rings, x, r);
      beta = std::min(beta, a / (r * r));
    }
  }
  return beta;
}

GeometryFlags geometry_flags(const PolygonalDomain& domain, double r0, double m_ratio,
                             int probe_count) {
  GeometryFlags f;
  f.corkscrew_d = check_corkscrew(domain, r0, m_ratio, probe_count);
  f.interior_density_beta = interior_density_beta(domain, probe_count);
  f.has_lipschitz_d_portion = domain.has_dirichlet();
  f.eps_delta_domain = true;  // straight-edge polygons
  return f;
}

}  // namespace elastheat
