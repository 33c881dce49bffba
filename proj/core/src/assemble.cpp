#include "elastheat/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace elastheat {

std::array<Vec2, 3> p1_gradients(const Mesh& mesh, int triangle) {
  const auto& tri = mesh.triangles[triangle];
  const Vec2 p0 = mesh.nodes[tri[0]];
  const Vec2 p1 = mesh.nodes[tri[1]];
  const Vec2 p2 = mesh.nodes[tri[2]];
  const double a2 = cross(p1 - p0, p2 - p0);  // 2 * area
  if (a2 <= 0.0) throw std::runtime_error("p1_gradients: degenerate triangle");
  return {Vec2{(p1.y - p2.y) / a2, (p2.x - p1.x) / a2},
          Vec2{(p2.y - p0.y) / a2, (p0.x - p2.x) / a2},
          Vec2{(p0.y - p1.y) / a2, (p1.x - p0.x) / a2}};
}

Mat2 p1_gradient(const Mesh& mesh, int triangle, std::span<const double> u) {
  const auto g = p1_gradients(mesh, triangle);
  const auto& tri = mesh.triangles[triangle];
  Mat2 grad;
  for (int k = 0; k < 3; ++k) {
    for (int c = 0; c < 2; ++c) {
      const double v = u[2 * tri[k] + c];
      grad(c, 0) += v * g[k].x;
      grad(c, 1) += v * g[k].y;
    }
  }
  return grad;
}

Mat2 strain(const Mesh& mesh, int triangle, std::span<const double> u) {
  return p1_gradient(mesh, triangle, u).sym();
}

namespace {

// Element average of the tensor: centroid value when piecewise constant,
// edge-midpoint three-point rule otherwise.
Tensor4 element_tensor(const Mesh& mesh, int t, const ElasticityTensor& tensor) {
  if (tensor.piecewise_constant()) {
    return tensor.at(mesh.centroid(t), t);
  }
  const auto& tri = mesh.triangles[t];
  Tensor4 avg;
  for (int e = 0; e < 3; ++e) {
    const Vec2 m = 0.5 * (mesh.nodes[tri[e]] + mesh.nodes[tri[(e + 1) % 3]]);
    const Tensor4 a = tensor.at(m, t);
    for (int al = 0; al < 2; ++al) {
      for (int be = 0; be < 2; ++be) {
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) avg(al, be, i, j) += a(al, be, i, j) / 3.0;
        }
      }
    }
  }
  return avg;
}

SparseSym assemble_stiffness(const Mesh& mesh, const ElasticityTensor* tensor,
                             const Tensor4* constant) {
  const int n = 2 * mesh.node_count();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 36);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    const auto g = p1_gradients(mesh, t);
    Tensor4 a;
    try {
      a = constant != nullptr ? *constant : element_tensor(mesh, t, *tensor);
    } catch (const std::exception& e) {
      throw std::runtime_error("assemble: tensor evaluation failed on triangle " +
                               std::to_string(t) + ": " + e.what());
    }
    for (int na = 0; na < 3; ++na) {
      for (int nb = 0; nb < 3; ++nb) {
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) {
            double v = 0.0;
            for (int al = 0; al < 2; ++al) {
              for (int be = 0; be < 2; ++be) {
                const double gb = be == 0 ? g[nb].x : g[nb].y;
                const double ga = al == 0 ? g[na].x : g[na].y;
                v += a(al, be, c, d) * gb * ga;
              }
            }
            trip.push_back({2 * tri[na] + c, 2 * tri[nb] + d, area * v});
          }
        }
      }
    }
  }
  return SparseSym::from_triplets(n, std::move(trip));
}

}  // namespace

SparseSym assemble_contraction(const Mesh& mesh, const Tensor4& contraction) {
  return assemble_stiffness(mesh, nullptr, &contraction);
}

SparseSym assemble_mass(const Mesh& mesh) {
  const int n = 2 * mesh.node_count();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 18);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double a12 = mesh.triangle_area(t) / 12.0;
    for (int na = 0; na < 3; ++na) {
      for (int nb = 0; nb < 3; ++nb) {
        const double v = a12 * (na == nb ? 2.0 : 1.0);
        for (int c = 0; c < 2; ++c) {
          trip.push_back({2 * tri[na] + c, 2 * tri[nb] + c, v});
        }
      }
    }
  }
  return SparseSym::from_triplets(n, std::move(trip));
}

SparseSym gradient_gram(const Mesh& mesh) {
  Tensor4 laplace;
  for (int al = 0; al < 2; ++al) {
    for (int i = 0; i < 2; ++i) laplace(al, al, i, i) = 1.0;
  }
  return assemble_contraction(mesh, laplace);
}

SparseSym strain_gram(const Mesh& mesh) {
  // eps(u):eps(v) equals the isotropic density with mu = 1/2, lambda = 0.
  return assemble_contraction(mesh, lame_tensor_entries(0.5, 0.0));
}

DiscreteOperator assemble(std::shared_ptr<const Mesh> mesh,
                          std::shared_ptr<const ElasticityTensor> tensor) {
  DiscreteOperator op;
  op.mesh = mesh;
  op.tensor = tensor;
  op.stiffness_ptr = std::make_shared<SparseSym>(assemble_stiffness(*mesh, tensor.get(), nullptr));
  op.mass_ptr = std::make_shared<SparseSym>(assemble_mass(*mesh));
  op.h = mesh->h_max;
  op.mesh_id = mesh->content_hash();
  op.tensor_id = tensor->description();

  for (int i = 0; i < mesh->node_count(); ++i) {
    const NodeClass c = mesh->node_class[i];
    if (c == NodeClass::Dirichlet || c == NodeClass::Junction) {
      op.constrained_dofs.push_back(2 * i);
      op.constrained_dofs.push_back(2 * i + 1);
    }
  }
  op.mask = DofMask::from_indices(op.dofs(), op.constrained_dofs);

  if (!mesh->has_dirichlet_nodes()) {
    auto basis = std::make_shared<RigidBasis>(rigid_basis(*mesh));
    op.rigid = basis;
    op.deflation.m = op.mass_ptr.get();
    op.deflation.modes = basis->nodal;
  }
  return op;
}

std::vector<double> load_vector(const DiscreteOperator& op, std::span<const double> f_nodal) {
  if (static_cast<int>(f_nodal.size()) != op.dofs()) {
    throw std::invalid_argument("load_vector: size mismatch");
  }
  return op.mass().multiply(f_nodal);
}

bool ConstrainedSystem::rhs_compatible(std::span<const double> b, double tol) const {
  if (!op->pure_neumann()) return true;
  const double bn = std::sqrt(dot_vec(b, b));
  for (const auto& mode : op->deflation.modes) {
    if (std::abs(dot_vec(mode, b)) > tol * std::max(1.0, bn)) return false;
  }
  return true;
}

std::vector<double> ConstrainedSystem::project_rhs(std::span<const double> b) const {
  std::vector<double> out(b.begin(), b.end());
  if (!op->pure_neumann()) {
    op->mask.apply(out);
    return out;
  }
  for (const auto& mode : op->deflation.modes) {
    const double c = dot_vec(mode, out);
    const std::vector<double> mr = op->mass().multiply(mode);
    axpy(-c, mr, out);
  }
  return out;
}

CgResult ConstrainedSystem::solve(std::span<const double> b, const CgOptions& opts,
                                  std::span<const double> x0) const {
  return cg_solve(op->stiffness(), b, opts, op->mask_ptr(), op->deflation_ptr(), x0);
}

ConstrainedSystem apply_constraints(const DiscreteOperator& op) { return {&op}; }

StaticSolveResult solve_static(const DiscreteOperator& op, std::span<const double> b,
                               const CgOptions& opts, bool project_incompatible) {
  ConstrainedSystem sys = apply_constraints(op);
  StaticSolveResult res;
  std::vector<double> rhs(b.begin(), b.end());
  if (!sys.rhs_compatible(rhs)) {
    res.compatibility_flagged = true;
    if (!project_incompatible) {
      throw std::invalid_argument("solve_static: load incompatible with the rigid kernel");
    }
    rhs = sys.project_rhs(rhs);
  } else if (op.mask.any()) {
    op.mask.apply(rhs);
  }
  res.cg = sys.solve(rhs, opts);
  res.u = res.cg.x;
  return res;
}

namespace {

KornLevel korn_level(const Mesh& mesh, bool dirichlet_everywhere) {
  KornLevel level;
  level.h = mesh.h_max;
  level.dofs = 2 * mesh.node_count();

  const SparseSym g = gradient_gram(mesh);
  const SparseSym e = strain_gram(mesh);
  const SparseSym m = assemble_mass(mesh);

  // Constraint data mirrors assemble().
  std::vector<int> pinned;
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (mesh.node_class[i] == NodeClass::Dirichlet || mesh.node_class[i] == NodeClass::Junction) {
      pinned.push_back(2 * i);
      pinned.push_back(2 * i + 1);
    }
  }
  DofMask mask = DofMask::from_indices(2 * mesh.node_count(), pinned);
  const DofMask* mask_ptr = mask.any() ? &mask : nullptr;

  RigidBasis basis;
  Deflation deflation;
  const Deflation* deflation_ptr = nullptr;
  if (!mask.any()) {
    basis = rigid_basis(mesh);
    deflation.m = &m;
    deflation.modes = basis.nodal;
    deflation_ptr = &deflation;
  }

  // korn2: max (|u|^2 + |Du|^2) / (|u|^2 + |eps|^2) over the whole space.
  auto plus = [](const SparseSym& a, const SparseSym& b) {
    std::vector<Triplet> trip;
    for (int i = 0; i < a.size(); ++i) {
      for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
        trip.push_back({i, a.cols()[k], a.values()[k]});
      }
      for (int k = b.row_ptr()[i]; k < b.row_ptr()[i + 1]; ++k) {
        trip.push_back({i, b.cols()[k], b.values()[k]});
      }
    }
    return SparseSym::from_triplets(a.size(), std::move(trip));
  };
  const SparseSym mg = plus(m, g);
  const SparseSym me = plus(m, e);
  level.korn2_constant = std::sqrt(largest_eig(mg, me));

  EigOptions eig_opts;
  const EigResult fried = smallest_eigs(g, m, 1, eig_opts, mask_ptr, deflation_ptr);
  level.friedrichs_constant = 1.0 / std::sqrt(std::max(fried.eigenvalues[0], 1e-300));
  const EigResult coer = smallest_eigs(e, m, 1, eig_opts, mask_ptr, deflation_ptr);
  level.coercivity_rho = 1.0 / std::sqrt(std::max(coer.eigenvalues[0], 1e-300));

  if (dirichlet_everywhere) {
    level.first_korn_ratio = largest_eig(g, e, mask_ptr, nullptr);
  }
  return level;
}

}  // namespace

KornReport estimate_constants(const DiscreteOperator& op, int ladder_depth) {
  if (ladder_depth < 2) {
    throw std::invalid_argument("estimate_constants: need at least 2 ladder levels");
  }
  bool dirichlet_everywhere = true;
  for (const BoundaryEdge& e : op.mesh->boundary_edges) {
    if (e.label != BoundaryLabel::Dirichlet) dirichlet_everywhere = false;
  }

  KornReport report;
  report.first_korn_applicable = dirichlet_everywhere;
  Mesh level_mesh = *op.mesh;
  for (int level = 0; level < ladder_depth; ++level) {
    report.levels.push_back(korn_level(level_mesh, dirichlet_everywhere));
    if (level + 1 < ladder_depth) level_mesh = refine(level_mesh);
  }
  return report;
}

}  // namespace elastheat
