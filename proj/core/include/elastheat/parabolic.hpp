#ifndef ELASTHEAT_PARABOLIC_HPP
#define ELASTHEAT_PARABOLIC_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "elastheat/assemble.hpp"

namespace elastheat {

enum class Scheme { BackwardEuler, CrankNicolson, CrankNicolsonBeStartup };

struct TimeGrid {
  double t0 = 0.0;
  std::vector<double> tau;  // strictly positive step sizes
  Scheme scheme = Scheme::BackwardEuler;

  double t_end() const;
  void validate() const;

  static TimeGrid uniform(double t0, double t_end, int steps, Scheme scheme);
  /// Steps grow geometrically from tau_min by `ratio` up to tau_max, then
  /// stay uniform; the last step is clipped to land on t_end exactly.
  static TimeGrid graded(double t0, double t_end, double tau_min, double ratio, double tau_max,
                         Scheme scheme);
};

/// Nodal force density at time t, written into `out` (P1 coefficients).
using ForcingSampler = std::function<void(double t, std::span<double> out)>;

struct EnergyEntry {
  double t = 0.0;
  double mass_norm_sq = 0.0;      // |u|_M^2
  double stiffness_energy = 0.0;  // u'Au
  std::vector<double> rigid_moments;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<EnergyEntry> energy_log;
  /// Measured constant of the discrete energy inequality
  /// max_t |u|_M^2 + sum tau u'Au <= C (|psi|_M^2 + (sum tau |f|_M)^2).
  double measured_energy_constant = 0.0;
};

struct StepOptions {
  /// Pure-traction runs: constrain the evolution to the complement of the
  /// rigid space (initial data must be compatible) instead of carrying the
  /// rigid components.
  bool v_mode = false;
  CgOptions cg;
  int store_stride = 1;
};

/// Low-level integrator shared by trajectory runs, kernel columns and the
/// time-integrated Green construction. In the pure-traction case the rigid
/// components are propagated exactly (they satisfy a decoupled identity) and
/// the deflated remainder is advanced by CG, so rigid moments are conserved
/// to round-off.
class ParabolicStepper {
 public:
  ParabolicStepper(const DiscreteOperator& op, Scheme scheme, const StepOptions& opts);

  void set_state(std::vector<double> u, double t);
  void step(double tau, const ForcingSampler* forcing);

  /// Current full state (rigid part re-added in the pure-traction case).
  std::vector<double> state() const;
  double time() const { return t_; }
  const std::vector<double>& rigid_coefficients() const { return rigid_coef_; }
  int steps_taken() const { return steps_; }

 private:
  const DiscreteOperator* op_;
  Scheme scheme_;
  StepOptions opts_;
  std::vector<double> u_;           // deflated part (pure traction) or full state
  std::vector<double> rigid_coef_;  // exact rigid coordinates (pure traction)
  double t_ = 0.0;
  int steps_ = 0;
  std::vector<double> warm_;

  struct CachedMatrix {
    double coef = -1.0;
    SparseSym m_plus;
  };
  CachedMatrix cache_;
  const SparseSym& shifted(double coef);
};

/// Integrates u_t + Au = f (weak form, mass-weighted) from psi over the
/// grid, recording states and the energy log. Initial data must satisfy the
/// Dirichlet constraints; v_mode additionally requires compatibility.
Trajectory step_parabolic(const DiscreteOperator& op, const TimeGrid& grid,
                          std::span<const double> psi, const ForcingSampler* forcing = nullptr,
                          const StepOptions& opts = {});

/// Space-time test field phi(x, t) = w(x) g(t) with exact time derivative.
struct SpaceTimeTestField {
  std::vector<double> w;
  std::function<double(double)> g;
  std::function<double(double)> g_dot;
};

/// Residuals of the discrete weak space-time identity
///   -int u phi_t + int B(u, phi) - int f phi - (psi, phi(0))
/// per test field; the phi_t term uses exact g-increments so stationary
/// states cancel to round-off. Test fields must vanish on D-dofs and at the
/// final time.
std::vector<double> weak_residual(const Trajectory& traj, const DiscreteOperator& op,
                                  const ForcingSampler* forcing,
                                  const std::vector<SpaceTimeTestField>& test_fields);

struct DecayFit {
  double fitted_rate = 0.0;
  double lambda1 = 0.0;
  double relative_gap = 0.0;
  int window_begin = 0;
};

/// Least-squares fit of log |u(t)|_M over the trajectory tail against the
/// smallest constrained/deflated eigenvalue.
DecayFit decay_rate(const DiscreteOperator& op, const Trajectory& traj);

}  // namespace elastheat

#endif
