#ifndef ELASTHEAT_RIGID_HPP
#define ELASTHEAT_RIGID_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "elastheat/mesh.hpp"
#include "elastheat/sparse.hpp"
#include "elastheat/tensor.hpp"

namespace elastheat {

/// Affine field c * (-y, x) + shift: the general rigid displacement in 2D.
struct RigidField {
  double rot = 0.0;
  Vec2 shift;

  Vec2 at(Vec2 p) const { return {shift.x - rot * p.y, shift.y + rot * p.x}; }
};

/// L2(Omega)-orthonormal basis of the rigid displacements over a mesh,
/// dimension n(n+1)/2 = 3 for n = 2. Deterministic Gram-Schmidt order:
/// translations first, then the rotation.
struct RigidBasis {
  std::vector<RigidField> fields;
  std::vector<std::vector<double>> nodal;  // P1 interpolants (exact: fields are affine)
  std::uint64_t mesh_hash = 0;

  int size() const { return static_cast<int>(fields.size()); }
};

RigidBasis rigid_basis(const Mesh& mesh);

/// Exact L2 inner product of two affine fields over the mesh (midpoint rule
/// per triangle, exact for quadratics).
double affine_l2_inner(const Mesh& mesh, const RigidField& u, const RigidField& v);

/// Mass-weighted L2 projection of a nodal field onto the rigid space.
std::vector<double> project_rigid(std::span<const double> u, const RigidBasis& basis,
                                  const SparseSym& mass);
std::vector<double> rigid_coefficients(std::span<const double> u, const RigidBasis& basis,
                                       const SparseSym& mass);

/// Columns of the matrix field T_y: column k is sum_i omega_i^k(y) omega_i
/// when there is no Dirichlet set, zero otherwise. Basis fields are
/// evaluated at y exactly from their affine form.
std::array<std::vector<double>, 2> point_rigid_projection(Vec2 y, const RigidBasis& basis,
                                                          bool has_dirichlet);

/// Exact rigid equilibrium matrix sum_i omega_i(x) omega_i(y)^T.
Mat2 rigid_equilibrium_matrix(const RigidBasis& basis, Vec2 x, Vec2 y);

}  // namespace elastheat

#endif
