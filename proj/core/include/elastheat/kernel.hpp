#ifndef ELASTHEAT_KERNEL_HPP
#define ELASTHEAT_KERNEL_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "elastheat/parabolic.hpp"

namespace elastheat {

/// Smooth bump scaled to eps: value(x) = eps^{-2} Phi((x - center)/eps) with
/// Phi supported in the unit ball, 0 <= Phi <= 2, unit integral.
struct Mollifier {
  Vec2 center;
  double epsilon = 0.0;

  double value(Vec2 x) const;
  /// Profile on the unit ball as a function of |z|^2.
  static double profile(double r2);
};

/// Nodal interpolant of Phi_{y,eps} e_k, rescaled so the mass-weighted
/// integral of component k is exactly 1 (and 0 in the other component).
std::vector<double> mollified_initial(const DiscreteOperator& op, Vec2 y, double eps, int k);

/// Sampled heat-kernel columns from one source point: node x time-grid
/// matrix values. `corrected` marks the rigid-projected variant used in the
/// pure-traction case (time slices stay M-orthogonal to the rigid modes).
struct KernelField {
  Vec2 y;
  double epsilon = 0.0;
  bool corrected = false;
  std::vector<double> times;
  std::array<std::vector<std::vector<double>>, 2> columns;  // [k][slice][dof]
  std::uint64_t mesh_id = 0;
  std::string tensor_id;
};

struct KernelBuildOptions {
  bool corrected = false;
  CgOptions cg;
  int store_stride = 1;
};

/// One column of the mollified kernel: the parabolic solve with initial data
/// Phi_{y,eps} e_k (rigid-projected when corrected). Rejects sources past
/// the boundary margin (eps > d(y)) and unresolved mollifiers (eps < 2h).
Trajectory build_kernel_column(const DiscreteOperator& op, Vec2 y, double eps, int k,
                               const TimeGrid& grid, const KernelBuildOptions& opts = {});

KernelField build_kernel_field(const DiscreteOperator& op, Vec2 y, double eps,
                               const TimeGrid& grid, const KernelBuildOptions& opts = {});

/// P1-in-space, linear-in-time evaluation of the matrix K(x, y, t).
Mat2 kernel_at(const KernelField& field, const Mesh& mesh, const TriLocator& locator, Vec2 x,
               double t);

struct EpsLadderReport {
  std::vector<double> epsilons;
  /// Max over probe points of |K_eps_i - K_eps_{i+1}| per ladder rung.
  std::vector<double> cauchy_differences;
  bool cauchy_decreasing = false;
};

struct ProbePoint {
  Vec2 x;
  double t;
};

/// Builds fields along a decreasing epsilon ladder, reports Cauchy
/// differences at the probes, and returns the finest-epsilon field.
std::pair<KernelField, EpsLadderReport> epsilon_extrapolate(
    const DiscreteOperator& op, Vec2 y, const TimeGrid& grid,
    const std::vector<double>& eps_ladder, const std::vector<ProbePoint>& probes,
    const KernelBuildOptions& opts = {});

struct SymmetryCheckResult {
  double pairing_max_rel = 0.0;    // mollified duality pairing asymmetry
  double pointwise_max_abs = 0.0;  // |K(x,y,t) - K(y,x,t)^T| over pairs
  bool pass = false;
};

/// Duality pairing both ways: (M phi_x)' P(t) phi_y versus the transpose
/// ordering; exact up to solver tolerance because M P(t) is symmetric.
/// Pointwise symmetry is compared at interpolation accuracy.
SymmetryCheckResult symmetry_check(const DiscreteOperator& op, const std::vector<Vec2>& x_list,
                                   const std::vector<Vec2>& y_list,
                                   const std::vector<double>& t_list, double eps,
                                   const TimeGrid& grid, double pairing_tol = 1e-9);

}  // namespace elastheat

#endif
