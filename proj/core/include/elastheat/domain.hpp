#ifndef ELASTHEAT_DOMAIN_HPP
#define ELASTHEAT_DOMAIN_HPP

#include <string>
#include <vector>

#include "elastheat/geometry.hpp"

namespace elastheat {

enum class BoundaryLabel : unsigned char { Dirichlet, Neumann };

/// Straight-edge polygonal domain with optional polygonal holes. Boundary
/// edges are indexed ring by ring (outer first, then holes in order) and
/// each carries exactly one label.
struct PolygonalDomain {
  Ring outer;                       // counter-clockwise
  std::vector<Ring> holes;          // clockwise, pairwise disjoint, inside outer
  std::vector<BoundaryLabel> edge_labels;  // one per boundary edge

  int edge_count() const;
  /// Endpoints of boundary edge e in ring order.
  std::pair<Vec2, Vec2> edge(int e) const;

  double area() const;
  double diameter() const;
  bool has_dirichlet() const;
  bool has_neumann() const;

  /// Throws std::invalid_argument with a diagnostic when any invariant
  /// (simplicity, orientation, disjointness, labeling, positive diameter)
  /// fails.
  void validate() const;

  /// Distance from a point to the Neumann part of the boundary (infinity
  /// when there is none).
  double distance_to_neumann(Vec2 p) const;
  double distance_to_boundary(Vec2 p) const;

  bool contains(Vec2 p) const;

  static PolygonalDomain rectangle(Vec2 lo, Vec2 hi,
                                   const std::vector<BoundaryLabel>& labels);
};

struct CorkscrewResult {
  bool pass = false;
  bool vacuous = false;        // no D/N interface to probe
  std::string note;
  double worst_ratio = 0.0;    // min over probes of best dist(x_r, N)/r
};

struct GeometryFlags {
  CorkscrewResult corkscrew_d;
  double interior_density_beta = 0.0;
  bool has_lipschitz_d_portion = false;
  bool eps_delta_domain = false;  // recorded for polygons, not verified analytically
};

/// Probe-based corkscrew check at the D/N interface points (arc endpoints
/// plus arc midpoints). Sound only up to probe density: for each probe x and
/// each radius in a geometric ladder below r0 it searches D for a point x_r
/// with |x - x_r| <= r and dist(x_r, N) >= r/M.
CorkscrewResult check_corkscrew(const PolygonalDomain& domain, double r0, double m_ratio,
                                int probe_count);

/// Arc-level corkscrew probe: D and N given as explicit polylines (a D arc
/// may be degenerate, i.e. a single point).
CorkscrewResult corkscrew_probe(const std::vector<std::vector<Vec2>>& d_arcs,
                                const std::vector<std::vector<Vec2>>& n_arcs, double r0,
                                double m_ratio, int probe_count);

/// Sampled interior-density constant: min over probe points and radii of
/// |Omega ∩ B(x, r)| / r^2, using the exact polygon-disk overlap area.
/// The radius ladder descends from r_max (default diam/2). Note the
/// interior-angle lower bound theta_min/2 holds at feature-scale radii;
/// nonconvex domains genuinely dip below it when r is comparable to diam.
double interior_density_beta(const PolygonalDomain& domain, int probe_count,
                             double r_max = 0.0);

GeometryFlags geometry_flags(const PolygonalDomain& domain, double r0, double m_ratio,
                             int probe_count);

}  // namespace elastheat

#endif
