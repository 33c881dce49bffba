#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elastheat/domain.hpp"
#include "elastheat/mesh.hpp"

using namespace elastheat;

namespace {

PolygonalDomain square_mixed() {
  // D = bottom edge, N = the rest.
  return PolygonalDomain::rectangle({0, 0}, {1, 1},
                                    {BoundaryLabel::Dirichlet, BoundaryLabel::Neumann,
                                     BoundaryLabel::Neumann, BoundaryLabel::Neumann});
}

PolygonalDomain square_all(BoundaryLabel l) {
  return PolygonalDomain::rectangle({0, 0}, {1, 1}, {l, l, l, l});
}

PolygonalDomain l_shape() {
  PolygonalDomain d;
  d.outer = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  d.edge_labels.assign(6, BoundaryLabel::Dirichlet);
  d.validate();
  return d;
}

}  // namespace

TEST_CASE("domain validation rejects degenerate input") {
  PolygonalDomain d;
  d.outer = {{0, 0}, {1, 0}, {1, 0}, {0, 1}};  // repeated vertex
  d.edge_labels.assign(4, BoundaryLabel::Dirichlet);
  CHECK_THROWS(d.validate());

  PolygonalDomain cw;
  cw.outer = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};  // clockwise outer
  cw.edge_labels.assign(4, BoundaryLabel::Dirichlet);
  CHECK_THROWS(cw.validate());

  PolygonalDomain missing = square_all(BoundaryLabel::Neumann);
  missing.edge_labels.pop_back();
  CHECK_THROWS(missing.validate());
}

TEST_CASE("triangulate: coarse square tiles exactly") {
  const Mesh mesh = triangulate(square_all(BoundaryLabel::Dirichlet), 1.0);
  CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mesh.h_max <= 1.0 + 1e-12);
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Vec2 p = mesh.nodes[i];
    const bool on_boundary = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    CHECK(on_boundary == (mesh.node_class[i] != NodeClass::Interior));
  }
}

TEST_CASE("triangulate: two-triangle square at target_h = 2") {
  const Mesh mesh = triangulate(square_all(BoundaryLabel::Dirichlet), 2.0);
  CHECK(mesh.triangle_count() == 2);
  CHECK(mesh.node_count() == 4);
  CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("triangulate: L-shape area equals the shoelace value") {
  const PolygonalDomain d = l_shape();
  const double shoelace = signed_area(d.outer);
  const Mesh mesh = triangulate(d, 0.1);
  CHECK(std::abs(mesh.total_area() - shoelace) <= 1e-12);
  CHECK(mesh.h_max <= 0.1 + 1e-12);
  mesh.validate();
}

TEST_CASE("triangulate: square with a hole") {
  PolygonalDomain d;
  d.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  Ring hole = {{0.4, 0.4}, {0.6, 0.4}, {0.6, 0.6}, {0.4, 0.6}};
  std::reverse(hole.begin(), hole.end());
  d.holes.push_back(hole);
  d.edge_labels.assign(8, BoundaryLabel::Dirichlet);
  for (int e = 4; e < 8; ++e) d.edge_labels[e] = BoundaryLabel::Neumann;
  d.validate();

  const Mesh mesh = triangulate(d, 0.15);
  CHECK(std::abs(mesh.total_area() - d.area()) <= 1e-12);
  mesh.validate();
  // Hole edges stay Neumann, outer stays Dirichlet.
  int d_edges = 0, n_edges = 0;
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    (e.label == BoundaryLabel::Dirichlet ? d_edges : n_edges)++;
  }
  CHECK(d_edges > 0);
  CHECK(n_edges > 0);
}

TEST_CASE("triangulate input validation") {
  CHECK_THROWS(triangulate(square_all(BoundaryLabel::Dirichlet), 0.0));
  CHECK_THROWS(triangulate(square_all(BoundaryLabel::Dirichlet), 1e-6));  // below floor
}

TEST_CASE("refine: quadrisection counts and conservation") {
  const Mesh coarse = triangulate(square_all(BoundaryLabel::Dirichlet), 2.0);
  const Mesh fine = refine(coarse);
  CHECK(fine.triangle_count() == 8);
  CHECK(fine.node_count() == 9);
  CHECK(fine.total_area() == doctest::Approx(coarse.total_area()).epsilon(1e-15));

  const Mesh finer = refine(fine);
  CHECK(finer.h_max == doctest::Approx(coarse.h_max / 4.0).epsilon(1e-14));
  finer.validate();
}

TEST_CASE("triangulate is deterministic") {
  const Mesh a = triangulate(l_shape(), 0.2);
  const Mesh b = triangulate(l_shape(), 0.2);
  CHECK(a.content_hash() == b.content_hash());
  REQUIRE(a.node_count() == b.node_count());
  for (int i = 0; i < a.node_count(); ++i) {
    CHECK(a.nodes[i].x == b.nodes[i].x);
    CHECK(a.nodes[i].y == b.nodes[i].y);
  }
}

TEST_CASE("junction nodes are Dirichlet-treated") {
  const Mesh mesh = triangulate(square_mixed(), 0.5);
  int junctions = 0;
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (mesh.node_class[i] == NodeClass::Junction) {
      ++junctions;
      // Corners of the bottom edge.
      CHECK(mesh.nodes[i].y == doctest::Approx(0.0));
      CHECK((mesh.nodes[i].x == doctest::Approx(0.0) || mesh.nodes[i].x == doctest::Approx(1.0)));
    }
  }
  CHECK(junctions == 2);
  CHECK(mesh.has_dirichlet_nodes());
}

TEST_CASE("mesh text format round-trips") {
  const Mesh mesh = triangulate(square_mixed(), 0.4);
  std::stringstream ss;
  write_mesh(ss, mesh);
  const Mesh back = read_mesh(ss);
  CHECK(back.content_hash() == mesh.content_hash());
  CHECK(back.h_max == doctest::Approx(mesh.h_max));
}

TEST_CASE("corkscrew: full Dirichlet boundary is vacuous") {
  const CorkscrewResult r = check_corkscrew(square_all(BoundaryLabel::Dirichlet), 0.25, 2.0, 32);
  CHECK(r.pass);
  CHECK(r.vacuous);
  CHECK(r.note == "no D/N interface");
}

TEST_CASE("corkscrew: no Dirichlet set is vacuous") {
  const CorkscrewResult r = check_corkscrew(square_all(BoundaryLabel::Neumann), 0.25, 2.0, 32);
  CHECK(r.pass);
  CHECK(r.vacuous);
  CHECK(r.note == "no Dirichlet set");
}

TEST_CASE("corkscrew: bottom-edge Dirichlet passes for M >= 2") {
  // Exhaustive probe search along the bottom edge: candidates at arc-length
  // fractions i/probe_count reach distance ratios approaching 1.
  const CorkscrewResult r = check_corkscrew(square_mixed(), 0.25, 2.0, 256);
  CHECK(r.pass);
  CHECK(r.worst_ratio >= 0.5);
  CHECK_FALSE(r.vacuous);
}

TEST_CASE("corkscrew: a measure-zero Dirichlet point fails for every M") {
  // Brute force: the only candidate is the point itself, which touches N.
  const std::vector<std::vector<Vec2>> d_arcs = {{Vec2{0.5, 0.0}}};
  const std::vector<std::vector<Vec2>> n_arcs = {
      {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}};
  for (double m : {1.0, 4.0, 64.0}) {
    const CorkscrewResult r = corkscrew_probe(d_arcs, n_arcs, 0.25, m, 64);
    CHECK_FALSE(r.pass);
    CHECK(r.worst_ratio == doctest::Approx(0.0));
  }
}

TEST_CASE("interior density beta: square corner bound") {
  // Smallest interior angle pi/2 gives the corner ball fraction pi/4.
  const double beta = interior_density_beta(square_all(BoundaryLabel::Dirichlet), 4);
  CHECK(beta >= M_PI / 4.0 - 1e-9);
  CHECK(beta <= M_PI);
}

TEST_CASE("interior density beta is monotone under more probes") {
  const double coarse = interior_density_beta(l_shape(), 2);
  const double fine = interior_density_beta(l_shape(), 8);
  CHECK(fine <= coarse + 1e-15);
  // At feature-scale radii (below the arm width) the smallest interior
  // angle pi/2 controls the corner balls; at r ~ diam the corner ball at
  // (2,0) clips the arm and the ratio genuinely dips below pi/4.
  const double local = interior_density_beta(l_shape(), 8, 0.5);
  CHECK(local >= M_PI / 4.0 - 1e-9);
  CHECK(fine < local);
}

TEST_CASE("geometry flags") {
  const GeometryFlags f = geometry_flags(square_mixed(), 0.25, 2.0, 64);
  CHECK(f.corkscrew_d.pass);
  CHECK(f.has_lipschitz_d_portion);
  CHECK(f.eps_delta_domain);
  const GeometryFlags g = geometry_flags(square_all(BoundaryLabel::Neumann), 0.25, 2.0, 16);
  CHECK_FALSE(g.has_lipschitz_d_portion);
}
