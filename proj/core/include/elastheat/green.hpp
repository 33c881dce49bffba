#ifndef ELASTHEAT_GREEN_HPP
#define ELASTHEAT_GREEN_HPP

#include <array>
#include <string>
#include <vector>

#include "elastheat/estimates.hpp"
#include "elastheat/kernel.hpp"

namespace elastheat {

/// Time integral of the (rigid-corrected) kernel from one source point, with
/// a certified truncation: the integral up to T is the exact step-wise sum
/// of the integrator, the discarded tail is both bounded by the measured
/// spectral decay rate and added back through one direct solve.
struct GreenField {
  Vec2 y;
  double epsilon = 0.0;
  std::array<std::vector<double>, 2> columns;  // nodal G(., y) e_k
  double truncation_time = 0.0;
  double tail_bound = 0.0;           // |u(T)|_M / lambda_1
  double tail_bound_pointwise = 0.0; // tail_bound / sqrt(min lumped nodal mass)
  double lambda1 = 0.0;
  int steps = 0;
  std::string quadrature;
};

struct GreenOptions {
  double tau_min = 0.0;  // 0: eps^2 / 8
  double ratio = 1.2;
  double tau_max = 0.0;  // 0: 2 / lambda_1 (the step sum is exact for any tau)
  /// Stop once |u(T)|_M / lambda_1 <= tail_tol * |accumulated|_M. With the
  /// tail correction enabled this only splits trajectory work from the one
  /// closing solve; the result is tau- and T-independent up to CG.
  double tail_tol = 1e-10;
  double t_cap = 1e4;
  CgOptions cg;
  bool add_tail_correction = true;
  double lambda1_hint = 0.0;  // skip the eigensolve when the caller knows it
};

GreenField build_green(const DiscreteOperator& op, Vec2 y, double eps,
                       const GreenOptions& opts = {});

Mat2 green_at(const GreenField& field, const Mesh& mesh, const TriLocator& locator, Vec2 x);

struct CrosscheckResult {
  double relative_error = 0.0;  // |pairing - direct| / |direct| over sources
  double absolute_error = 0.0;
  double reference_norm = 0.0;  // l2 of the direct values at the sources
  bool compatibility_flagged = false;
  int sources = 0;
};

/// Property-iii check: pairing f against the Green columns reproduces the
/// direct constrained/deflated solve of the static problem at every source
/// point.
CrosscheckResult static_crosscheck(const DiscreteOperator& op,
                                   const std::vector<GreenField>& fields,
                                   std::span<const double> f_nodal, const CgOptions& cg = {});

/// Max |G(x,y) - G(y,x)^T| over source pairs (fields built at both points).
double green_symmetry_mismatch(const DiscreteOperator& op, const GreenField& at_x,
                               const GreenField& at_y);

struct GreenBoundsOptions {
  int ray_count = 8;
  int radii = 10;
  double r_min = 0.0;
  double r_max = 0.0;
  double r2_threshold = 0.95;
  double mu1 = 0.0;  // imported from the kernel Hoelder probe
};

/// n = 2 bound: |G(x,y)| against ln(1/|x-y|) by linear regression over a
/// probe cloud around the source; positive slope with high R^2 near the
/// diagonal, flat far pairs, plus the Hoelder-increment exponent fit.
std::vector<EstimateReport> green_bounds(const DiscreteOperator& op, const GreenField& field,
                                         double diam, const GreenBoundsOptions& opts);

}  // namespace elastheat

#endif
