#ifndef ELASTHEAT_ASSEMBLE_HPP
#define ELASTHEAT_ASSEMBLE_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "elastheat/mesh.hpp"
#include "elastheat/rigid.hpp"
#include "elastheat/solvers.hpp"
#include "elastheat/sparse.hpp"
#include "elastheat/tensor.hpp"

namespace elastheat {

/// Constant gradients of the three P1 hat functions on a triangle.
std::array<Vec2, 3> p1_gradients(const Mesh& mesh, int triangle);

/// Gradient of a P1 vector field on a triangle (entry (i,j) = du^i/dx_j).
Mat2 p1_gradient(const Mesh& mesh, int triangle, std::span<const double> u);

/// Symmetrized gradient on a triangle; rejects degenerate triangles.
Mat2 strain(const Mesh& mesh, int triangle, std::span<const double> u);

/// Assembled pair (stiffness, mass) for P1 vector elements with the boundary
/// partition baked in: Dirichlet and junction nodes are the constraint set;
/// the discrete rigid basis is attached iff there is no Dirichlet part.
/// Dof numbering: dof = 2 * node + component.
struct DiscreteOperator {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const ElasticityTensor> tensor;
  // Matrices live behind stable pointers so the deflation view survives
  // copies and moves of the operator struct.
  std::shared_ptr<const SparseSym> stiffness_ptr;
  std::shared_ptr<const SparseSym> mass_ptr;
  std::vector<int> constrained_dofs;  // sorted
  DofMask mask;
  std::shared_ptr<const RigidBasis> rigid;  // present iff D = empty
  Deflation deflation;                      // rigid modes, M-orthonormal
  double h = 0.0;
  std::uint64_t mesh_id = 0;
  std::string tensor_id;

  const SparseSym& stiffness() const { return *stiffness_ptr; }
  const SparseSym& mass() const { return *mass_ptr; }
  int dofs() const { return stiffness().size(); }
  bool pure_neumann() const { return rigid != nullptr; }
  const DofMask* mask_ptr() const { return mask.any() ? &mask : nullptr; }
  const Deflation* deflation_ptr() const {
    return deflation.modes.empty() ? nullptr : &deflation;
  }
};

DiscreteOperator assemble(std::shared_ptr<const Mesh> mesh,
                          std::shared_ptr<const ElasticityTensor> tensor);

/// Raw assembler over an arbitrary constant 4-index contraction (no symmetry
/// requirement); backs the gradient and strain Gram matrices.
SparseSym assemble_contraction(const Mesh& mesh, const Tensor4& contraction);

SparseSym assemble_mass(const Mesh& mesh);
SparseSym gradient_gram(const Mesh& mesh);  // int Du : Dv
SparseSym strain_gram(const Mesh& mesh);    // int eps(u) : eps(v)

/// Consistent load vector for a nodal (P1) force density: b = M f.
std::vector<double> load_vector(const DiscreteOperator& op, std::span<const double> f_nodal);

/// The constrained/deflated view of the operator used by every solve.
struct ConstrainedSystem {
  const DiscreteOperator* op;

  /// For a pure-traction operator: whether the load is orthogonal to every
  /// rigid mode (the solvability condition).
  bool rhs_compatible(std::span<const double> b, double tol = 1e-9) const;
  /// Removes the rigid part of the load (b <- b - sum (r'b) M r).
  std::vector<double> project_rhs(std::span<const double> b) const;

  CgResult solve(std::span<const double> b, const CgOptions& opts = {},
                 std::span<const double> x0 = {}) const;
};

ConstrainedSystem apply_constraints(const DiscreteOperator& op);

/// One solve with the compatibility policy from the caller: incompatible
/// pure-traction loads are either projected (project_incompatible) or
/// rejected.
struct StaticSolveResult {
  std::vector<double> u;
  bool compatibility_flagged = false;
  CgResult cg;
};
StaticSolveResult solve_static(const DiscreteOperator& op, std::span<const double> b,
                               const CgOptions& opts = {}, bool project_incompatible = true);

struct KornLevel {
  double h = 0.0;
  int dofs = 0;
  double korn2_constant = 0.0;      // sqrt(max (|u|^2+|Du|^2)/(|u|^2+|eps|^2))
  double friedrichs_constant = 0.0; // 1/sqrt(min |Du|^2/|u|^2) on V_h
  double coercivity_rho = 0.0;      // 1/sqrt(min |eps|^2/|u|^2) on V_h
  double first_korn_ratio = 0.0;    // max |Du|^2/|eps|^2, full-Dirichlet meshes only
};

struct KornReport {
  std::vector<KornLevel> levels;
  bool first_korn_applicable = false;
};

/// Generalized-eigenvalue constants on a refinement ladder starting at the
/// operator's mesh. Reported values are the measured discrete constants.
KornReport estimate_constants(const DiscreteOperator& op, int ladder_depth);

}  // namespace elastheat

#endif
