#ifndef ELASTHEAT_MESH_HPP
#define ELASTHEAT_MESH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "elastheat/domain.hpp"
#include "elastheat/geometry.hpp"

namespace elastheat {

enum class NodeClass : unsigned char { Interior, Dirichlet, Neumann, Junction };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryLabel label = BoundaryLabel::Dirichlet;
};

/// Conforming triangle mesh of a polygonal domain. Triangles are
/// counter-clockwise; boundary edges carry the label inherited from the
/// domain edge that contains them. Junction nodes (on both a D and an N
/// edge) are treated as Dirichlet-constrained.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<NodeClass> node_class;
  double h_max = 0.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }

  double triangle_area(int t) const;
  double total_area() const;
  Vec2 centroid(int t) const;

  bool has_dirichlet_nodes() const;

  /// Stable content hash used as provenance id in reports.
  std::uint64_t content_hash() const;

  /// Conformity/orientation/labeling checks; throws on violation.
  void validate() const;
};

/// Deterministic triangulation: ear clipping of the (hole-bridged) polygon,
/// then uniform 4-way refinement until h_max <= target_h. No Steiner points
/// are placed on the boundary, so mesh area equals polygon area exactly.
Mesh triangulate(const PolygonalDomain& domain, double target_h);

/// Edge-midpoint quadrisection; child boundary edges inherit labels.
Mesh refine(const Mesh& mesh);

void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);

/// Point-location accelerator (uniform bucket grid over triangle bboxes).
class TriLocator {
 public:
  explicit TriLocator(const Mesh& mesh);

  /// Triangle containing p together with its barycentric coordinates;
  /// nullopt when p is outside the mesh (tolerance-padded test).
  struct Hit {
    int triangle;
    std::array<double, 3> bary;
  };
  std::optional<Hit> locate(Vec2 p) const;

 private:
  const Mesh* mesh_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace elastheat

#endif
