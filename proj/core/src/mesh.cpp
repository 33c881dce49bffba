#include "elastheat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace elastheat {

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(nodes[tri[1]] - nodes[tri[0]], nodes[tri[2]] - nodes[tri[0]]);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < triangle_count(); ++t) a += triangle_area(t);
  return a;
}

Vec2 Mesh::centroid(int t) const {
  const auto& tri = triangles[t];
  return (1.0 / 3.0) * (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]);
}

bool Mesh::has_dirichlet_nodes() const {
  for (NodeClass c : node_class) {
    if (c == NodeClass::Dirichlet || c == NodeClass::Junction) return true;
  }
  return false;
}

std::uint64_t Mesh::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ull;
    }
  };
  for (const Vec2& v : nodes) mix(&v, sizeof(v));
  for (const auto& t : triangles) mix(t.data(), sizeof(int) * 3);
  for (const BoundaryEdge& e : boundary_edges) mix(&e, sizeof(int) * 2 + 1);
  return h;
}

namespace {

void classify_nodes(Mesh& mesh) {
  mesh.node_class.assign(mesh.nodes.size(), NodeClass::Interior);
  std::vector<unsigned char> on_d(mesh.nodes.size(), 0), on_n(mesh.nodes.size(), 0);
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (e.label == BoundaryLabel::Dirichlet) {
      on_d[e.a] = on_d[e.b] = 1;
    } else {
      on_n[e.a] = on_n[e.b] = 1;
    }
  }
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (on_d[i] && on_n[i]) {
      mesh.node_class[i] = NodeClass::Junction;
    } else if (on_d[i]) {
      mesh.node_class[i] = NodeClass::Dirichlet;
    } else if (on_n[i]) {
      mesh.node_class[i] = NodeClass::Neumann;
    }
  }
}

double compute_h_max(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles) {
    h = std::max({h, dist(mesh.nodes[t[0]], mesh.nodes[t[1]]),
                  dist(mesh.nodes[t[1]], mesh.nodes[t[2]]),
                  dist(mesh.nodes[t[2]], mesh.nodes[t[0]])});
  }
  return h;
}

bool point_in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c, double eps) {
  const double d1 = cross(b - a, p - a);
  const double d2 = cross(c - b, p - b);
  const double d3 = cross(a - c, p - c);
  return d1 >= -eps && d2 >= -eps && d3 >= -eps;
}

// Ear clipping over an index chain into `points`. Duplicate indices are
// allowed (they arise from hole bridges).
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& points,
                                         std::vector<int> chain) {
  std::vector<std::array<int, 3>> tris;
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    scale = std::max(scale, dist(points[chain[i]], points[chain[i + 1]]));
  }
  const double eps_area = 1e-14 * scale * scale;

  std::size_t cursor = 0;
  while (chain.size() > 3) {
    const std::size_t n = chain.size();
    bool clipped = false;
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = (cursor + step) % n;
      const int ip = chain[(i + n - 1) % n];
      const int ic = chain[i];
      const int in = chain[(i + 1) % n];
      const Vec2 a = points[ip];
      const Vec2 b = points[ic];
      const Vec2 c = points[in];
      const double area2 = cross(b - a, c - a);
      if (area2 < -eps_area) continue;  // reflex
      if (area2 <= eps_area) {
        // Zero-area corner. Bridge artifacts (zero-length edges or a path
        // that doubles back) are dropped without emitting a triangle;
        // straight-through collinear input vertices must stay, their
        // boundary edges carry labels.
        const double len_tol = 1e-14 * (1.0 + scale);
        const bool zero_len = dist(a, b) <= len_tol || dist(b, c) <= len_tol;
        const bool doubles_back = dist(a, c) <= len_tol || dot(b - a, c - b) < 0.0;
        if (zero_len || doubles_back) {
          chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(i));
          cursor = i % chain.size();
          clipped = true;
          break;
        }
        continue;
      }
      bool blocked = false;
      for (std::size_t j = 0; j < n && !blocked; ++j) {
        const int v = chain[j];
        if (v == ip || v == ic || v == in) continue;
        const Vec2 p = points[v];
        if (dist(p, a) <= 1e-14 * (1.0 + scale) || dist(p, b) <= 1e-14 * (1.0 + scale) ||
            dist(p, c) <= 1e-14 * (1.0 + scale)) {
          continue;  // duplicate of a corner (bridge copy)
        }
        if (point_in_triangle(p, a, b, c, eps_area)) blocked = true;
      }
      if (blocked) continue;
      tris.push_back({ip, ic, in});
      chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(i));
      cursor = i % chain.size();
      clipped = true;
      break;
    }
    if (!clipped) throw std::runtime_error("triangulate: ear clipping stalled");
  }
  if (chain.size() == 3) {
    const double area2 = cross(points[chain[1]] - points[chain[0]],
                               points[chain[2]] - points[chain[0]]);
    if (area2 > eps_area) tris.push_back({chain[0], chain[1], chain[2]});
  }
  return tris;
}

// Merge hole rings into the outer chain with bridge edges (rightmost hole
// vertex to a visible outer vertex), largest-x hole first.
std::vector<int> bridge_holes(const std::vector<Vec2>& points, std::vector<int> chain,
                              std::vector<std::vector<int>> hole_chains) {
  std::sort(hole_chains.begin(), hole_chains.end(),
            [&points](const std::vector<int>& a, const std::vector<int>& b) {
              double ax = -std::numeric_limits<double>::infinity();
              double bx = -std::numeric_limits<double>::infinity();
              for (int i : a) ax = std::max(ax, points[i].x);
              for (int i : b) bx = std::max(bx, points[i].x);
              return ax > bx;
            });

  for (const std::vector<int>& hole : hole_chains) {
    // Rightmost hole vertex (ties: lowest y, then smallest index).
    std::size_t mi = 0;
    for (std::size_t i = 1; i < hole.size(); ++i) {
      const Vec2 p = points[hole[i]];
      const Vec2 q = points[hole[mi]];
      if (p.x > q.x || (p.x == q.x && p.y < q.y)) mi = i;
    }
    const Vec2 m = points[hole[mi]];

    // Closest intersection of the +x ray from m with the current chain.
    double best_t = std::numeric_limits<double>::infinity();
    std::size_t best_edge = SIZE_MAX;
    Vec2 ipt;
    const std::size_t n = chain.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = points[chain[i]];
      const Vec2 b = points[chain[(i + 1) % n]];
      if ((a.y > m.y) == (b.y > m.y)) continue;
      const double t = a.x + (m.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (t >= m.x && t < best_t) {
        best_t = t;
        best_edge = i;
        ipt = {t, m.y};
      }
    }
    if (best_edge == SIZE_MAX) throw std::runtime_error("triangulate: hole bridge failed");

    // Candidate visible vertex: endpoint of the hit edge with larger x.
    const Vec2 ea = points[chain[best_edge]];
    const Vec2 eb = points[chain[(best_edge + 1) % n]];
    std::size_t cand = (ea.x > eb.x) ? best_edge : (best_edge + 1) % n;

    // Any reflex chain vertex strictly inside triangle (m, ipt, cand) blocks
    // visibility; take the blocker minimizing the angle to the ray.
    const Vec2 cpt = points[chain[cand]];
    double best_metric = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == cand) continue;
      const Vec2 p = points[chain[i]];
      if (p.x < m.x) continue;
      if (!point_in_triangle(p, m, ipt, cpt, 0.0) && !point_in_triangle(p, m, cpt, ipt, 0.0)) {
        continue;
      }
      if (dist(p, cpt) < 1e-15 || dist(p, m) < 1e-15) continue;
      const double dx = p.x - m.x;
      const double dy = std::abs(p.y - m.y);
      const double metric = dx == 0.0 && dy == 0.0
                                ? std::numeric_limits<double>::infinity()
                                : std::atan2(dy, dx) + 1e-12 * dist(p, m);
      if (metric < best_metric) {
        best_metric = metric;
        cand = i;
      }
    }

    // Splice: ... cand, [hole from mi around], mi, cand, ...
    std::vector<int> merged;
    merged.reserve(chain.size() + hole.size() + 2);
    for (std::size_t i = 0; i <= cand; ++i) merged.push_back(chain[i]);
    for (std::size_t i = 0; i <= hole.size(); ++i) {
      merged.push_back(hole[(mi + i) % hole.size()]);
    }
    merged.push_back(chain[cand]);
    for (std::size_t i = cand + 1; i < chain.size(); ++i) merged.push_back(chain[i]);
    chain = std::move(merged);
  }
  return chain;
}

constexpr double kTargetHFloor = 1e-4;

}  // namespace

Mesh triangulate(const PolygonalDomain& domain, double target_h) {
  domain.validate();
  if (target_h <= 0.0) throw std::invalid_argument("triangulate: target_h must be positive");
  if (target_h < kTargetHFloor) {
    throw std::invalid_argument("triangulate: target_h below the configured floor of 1e-4");
  }

  Mesh mesh;
  mesh.nodes = domain.outer;
  std::vector<int> chain(domain.outer.size());
  for (std::size_t i = 0; i < chain.size(); ++i) chain[i] = static_cast<int>(i);

  std::vector<std::vector<int>> hole_chains;
  for (const Ring& h : domain.holes) {
    std::vector<int> hc;
    for (const Vec2& v : h) {
      hc.push_back(static_cast<int>(mesh.nodes.size()));
      mesh.nodes.push_back(v);
    }
    hole_chains.push_back(std::move(hc));
  }
  if (!hole_chains.empty()) {
    chain = bridge_holes(mesh.nodes, std::move(chain), std::move(hole_chains));
  }
  mesh.triangles = ear_clip(mesh.nodes, std::move(chain));

  // Every domain edge is a mesh boundary edge: no boundary Steiner points.
  for (int e = 0; e < domain.edge_count(); ++e) {
    const auto [pa, pb] = domain.edge(e);
    int ia = -1, ib = -1;
    for (int i = 0; i < mesh.node_count(); ++i) {
      if (dist(mesh.nodes[i], pa) < 1e-14) ia = i;
      if (dist(mesh.nodes[i], pb) < 1e-14) ib = i;
    }
    mesh.boundary_edges.push_back({ia, ib, domain.edge_labels[e]});
  }

  classify_nodes(mesh);
  mesh.h_max = compute_h_max(mesh);

  const double poly_area = domain.area();
  if (std::abs(mesh.total_area() - poly_area) > 1e-10 * std::max(1.0, poly_area)) {
    throw std::runtime_error("triangulate: triangulation does not tile the polygon");
  }
  mesh.validate();

  while (mesh.h_max > target_h * (1.0 + 1e-12)) {
    mesh = refine(mesh);
  }
  return mesh;
}

Mesh refine(const Mesh& mesh) {
  mesh.validate();
  Mesh out;
  out.nodes = mesh.nodes;

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find({key.first, key.second});
    if (it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(out.nodes.size());
    out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    midpoint[{key.first, key.second}] = idx;
    return idx;
  };

  for (const auto& t : mesh.triangles) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({ca, bc, t[2]});
    out.triangles.push_back({ab, bc, ca});
  }
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    const int m = mid(e.a, e.b);
    out.boundary_edges.push_back({e.a, m, e.label});
    out.boundary_edges.push_back({m, e.b, e.label});
  }
  classify_nodes(out);
  out.h_max = compute_h_max(out);
  return out;
}

void Mesh::validate() const {
  for (int t = 0; t < triangle_count(); ++t) {
    const auto& tri = triangles[t];
    for (int v : tri) {
      if (v < 0 || v >= node_count()) throw std::runtime_error("mesh: bad node index");
    }
    if (triangle_area(t) <= 0.0) {
      throw std::runtime_error("mesh: zero or negative triangle area");
    }
  }
  // Conformity: every undirected edge in at most two triangles; edges in
  // exactly one triangle must be the labeled boundary edges.
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      const auto key = std::minmax(tri[k], tri[(k + 1) % 3]);
      edge_use[{key.first, key.second}]++;
    }
  }
  std::map<std::pair<int, int>, int> boundary_seen;
  for (const BoundaryEdge& e : boundary_edges) {
    const auto key = std::minmax(e.a, e.b);
    boundary_seen[{key.first, key.second}]++;
  }
  for (const auto& [edge, count] : edge_use) {
    if (count > 2) throw std::runtime_error("mesh: non-conforming edge");
    if (count == 1 && boundary_seen.find(edge) == boundary_seen.end()) {
      throw std::runtime_error("mesh: unlabeled boundary edge");
    }
  }
  for (const auto& [edge, count] : boundary_seen) {
    if (count != 1) throw std::runtime_error("mesh: duplicated boundary edge label");
    auto it = edge_use.find(edge);
    if (it == edge_use.end() || it->second != 1) {
      throw std::runtime_error("mesh: boundary edge not on the mesh boundary");
    }
  }
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  out << "nodes " << mesh.node_count() << "\n";
  for (const Vec2& v : mesh.nodes) out << v.x << ' ' << v.y << "\n";
  out << "tris " << mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  out << "bedges " << mesh.boundary_edges.size() << "\n";
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    out << e.a << ' ' << e.b << ' ' << (e.label == BoundaryLabel::Dirichlet ? 'D' : 'N') << "\n";
  }
}

Mesh read_mesh(std::istream& in) {
  Mesh mesh;
  std::string tag;
  int count = 0;
  if (!(in >> tag >> count) || tag != "nodes") throw std::runtime_error("mesh file: bad header");
  mesh.nodes.resize(count);
  for (Vec2& v : mesh.nodes) in >> v.x >> v.y;
  if (!(in >> tag >> count) || tag != "tris") throw std::runtime_error("mesh file: bad tris");
  mesh.triangles.resize(count);
  for (auto& t : mesh.triangles) in >> t[0] >> t[1] >> t[2];
  if (!(in >> tag >> count) || tag != "bedges") throw std::runtime_error("mesh file: bad bedges");
  mesh.boundary_edges.resize(count);
  for (BoundaryEdge& e : mesh.boundary_edges) {
    char label;
    in >> e.a >> e.b >> label;
    if (label != 'D' && label != 'N') throw std::runtime_error("mesh file: bad edge label");
    e.label = label == 'D' ? BoundaryLabel::Dirichlet : BoundaryLabel::Neumann;
  }
  if (!in) throw std::runtime_error("mesh file: truncated");
  classify_nodes(mesh);
  mesh.h_max = compute_h_max(mesh);
  mesh.validate();
  return mesh;
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open mesh file for writing: " + path);
  write_mesh(out, mesh);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh(in);
}

TriLocator::TriLocator(const Mesh& mesh) : mesh_(&mesh) {
  lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  hi_ = {-lo_.x, -lo_.y};
  for (const Vec2& v : mesh.nodes) {
    lo_.x = std::min(lo_.x, v.x);
    lo_.y = std::min(lo_.y, v.y);
    hi_.x = std::max(hi_.x, v.x);
    hi_.y = std::max(hi_.y, v.y);
  }
  const int cells = std::max(1, static_cast<int>(std::sqrt(mesh.triangle_count() / 2.0)));
  nx_ = ny_ = cells;
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  const double wx = (hi_.x - lo_.x) / nx_;
  const double wy = (hi_.y - lo_.y) / ny_;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    Vec2 tlo = mesh.nodes[tri[0]], thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo.x = std::min(tlo.x, mesh.nodes[tri[k]].x);
      tlo.y = std::min(tlo.y, mesh.nodes[tri[k]].y);
      thi.x = std::max(thi.x, mesh.nodes[tri[k]].x);
      thi.y = std::max(thi.y, mesh.nodes[tri[k]].y);
    }
    const int ix0 = std::clamp(static_cast<int>((tlo.x - lo_.x) / wx), 0, nx_ - 1);
    const int ix1 = std::clamp(static_cast<int>((thi.x - lo_.x) / wx), 0, nx_ - 1);
    const int iy0 = std::clamp(static_cast<int>((tlo.y - lo_.y) / wy), 0, ny_ - 1);
    const int iy1 = std::clamp(static_cast<int>((thi.y - lo_.y) / wy), 0, ny_ - 1);
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        buckets_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(t);
      }
    }
  }
}

std::optional<TriLocator::Hit> TriLocator::locate(Vec2 p) const {
  const double wx = (hi_.x - lo_.x) / nx_;
  const double wy = (hi_.y - lo_.y) / ny_;
  const int ix = std::clamp(static_cast<int>((p.x - lo_.x) / wx), 0, nx_ - 1);
  const int iy = std::clamp(static_cast<int>((p.y - lo_.y) / wy), 0, ny_ - 1);
  const double tol = 1e-12 * (1.0 + mesh_->h_max);
  for (int t : buckets_[static_cast<std::size_t>(iy) * nx_ + ix]) {
    const auto& tri = mesh_->triangles[t];
    const Vec2 a = mesh_->nodes[tri[0]];
    const Vec2 b = mesh_->nodes[tri[1]];
    const Vec2 c = mesh_->nodes[tri[2]];
    const double area2 = cross(b - a, c - a);
    const double l0 = cross(b - p, c - p) / area2;
    const double l1 = cross(c - p, a - p) / area2;
    const double l2 = cross(a - p, b - p) / area2;
    if (l0 >= -tol && l1 >= -tol && l2 >= -tol) {
      return Hit{t, {l0, l1, l2}};
    }
  }
  return std::nullopt;
}

}  // namespace elastheat
