#include "elastheat/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace elastheat {

double TimeGrid::t_end() const {
  double t = t0;
  for (double s : tau) t += s;
  return t;
}

void TimeGrid::validate() const {
  if (tau.empty()) throw std::invalid_argument("TimeGrid: no steps");
  for (double s : tau) {
    if (!(s > 0.0)) throw std::invalid_argument("TimeGrid: steps must be positive");
  }
}

TimeGrid TimeGrid::uniform(double t0, double t_end, int steps, Scheme scheme) {
  if (steps <= 0 || t_end <= t0) throw std::invalid_argument("TimeGrid::uniform: bad arguments");
  TimeGrid g;
  g.t0 = t0;
  g.scheme = scheme;
  g.tau.assign(steps, (t_end - t0) / steps);
  return g;
}

TimeGrid TimeGrid::graded(double t0, double t_end, double tau_min, double ratio, double tau_max,
                          Scheme scheme) {
  if (t_end <= t0 || tau_min <= 0.0 || ratio < 1.0 || tau_max < tau_min) {
    throw std::invalid_argument("TimeGrid::graded: bad arguments");
  }
  TimeGrid g;
  g.t0 = t0;
  g.scheme = scheme;
  double t = t0;
  double s = tau_min;
  while (t < t_end - 1e-15 * (t_end - t0)) {
    const double step = std::min(s, t_end - t);
    g.tau.push_back(step);
    t += step;
    s = std::min(s * ratio, tau_max);
  }
  return g;
}

ParabolicStepper::ParabolicStepper(const DiscreteOperator& op, Scheme scheme,
                                   const StepOptions& opts)
    : op_(&op), scheme_(scheme), opts_(opts) {
  u_.assign(op.dofs(), 0.0);
  if (op.pure_neumann()) rigid_coef_.assign(op.rigid->size(), 0.0);
}

void ParabolicStepper::set_state(std::vector<double> u, double t) {
  if (static_cast<int>(u.size()) != op_->dofs()) {
    throw std::invalid_argument("ParabolicStepper: state size mismatch");
  }
  t_ = t;
  steps_ = 0;
  warm_.clear();
  if (op_->mask.any()) op_->mask.apply(u);
  if (op_->pure_neumann()) {
    rigid_coef_ = elastheat::rigid_coefficients(u, *op_->rigid, op_->mass());
    if (opts_.v_mode) {
      double scale = std::sqrt(std::max(dot_vec(u, u), 1e-300));
      for (double c : rigid_coef_) {
        if (std::abs(c) > 1e-9 * std::max(1.0, scale)) {
          throw std::invalid_argument(
              "ParabolicStepper: initial data incompatible with the rigid-orthogonal mode");
        }
      }
      std::fill(rigid_coef_.begin(), rigid_coef_.end(), 0.0);
    }
    for (int i = 0; i < op_->rigid->size(); ++i) {
      axpy(-rigid_coef_[i], op_->rigid->nodal[i], u);
    }
  }
  u_ = std::move(u);
}

const SparseSym& ParabolicStepper::shifted(double coef) {
  if (cache_.coef == coef) return cache_.m_plus;
  const SparseSym& a = op_->stiffness();
  const SparseSym& m = op_->mass();
  std::vector<Triplet> trip;
  trip.reserve(a.nnz() + m.nnz());
  for (int i = 0; i < a.size(); ++i) {
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      trip.push_back({i, a.cols()[k], coef * a.values()[k]});
    }
    for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) {
      trip.push_back({i, m.cols()[k], m.values()[k]});
    }
  }
  cache_.coef = coef;
  cache_.m_plus = SparseSym::from_triplets(a.size(), std::move(trip));
  return cache_.m_plus;
}

void ParabolicStepper::step(double tau, const ForcingSampler* forcing) {
  const SparseSym& a = op_->stiffness();
  const SparseSym& m = op_->mass();
  const int n = op_->dofs();

  const bool cn = scheme_ == Scheme::CrankNicolson ||
                  (scheme_ == Scheme::CrankNicolsonBeStartup && steps_ > 0);
  if (scheme_ == Scheme::CrankNicolsonBeStartup && steps_ == 0) {
    // Two backward-Euler half-steps damp rough initial data before the
    // trapezoidal rule takes over.
    Scheme saved = scheme_;
    scheme_ = Scheme::BackwardEuler;
    step(0.5 * tau, forcing);
    step(0.5 * tau, forcing);
    scheme_ = saved;
    steps_ = 1;  // startup counts as one grid step
    return;
  }

  std::vector<double> f(n, 0.0);
  const double t_sample = cn ? t_ + 0.5 * tau : t_ + tau;
  if (forcing != nullptr) (*forcing)(t_sample, f);

  std::vector<double> rhs(n, 0.0);
  if (cn) {
    // (M + tau A / 2) u+ = (M - tau A / 2) u + tau M f(mid)
    std::vector<double> au = a.multiply(u_);
    rhs = m.multiply(u_);
    axpy(-0.5 * tau, au, rhs);
  } else {
    rhs = m.multiply(u_);
  }
  if (forcing != nullptr) {
    std::vector<double> fd = f;
    if (op_->pure_neumann()) {
      // Rigid load components advance the rigid coordinates exactly.
      const std::vector<double> fc = elastheat::rigid_coefficients(f, *op_->rigid, op_->mass());
      if (!opts_.v_mode) {
        for (int i = 0; i < op_->rigid->size(); ++i) rigid_coef_[i] += tau * fc[i];
      }
      for (int i = 0; i < op_->rigid->size(); ++i) axpy(-fc[i], op_->rigid->nodal[i], fd);
    }
    const std::vector<double> mf = m.multiply(fd);
    axpy(tau, mf, rhs);
  }

  if (op_->mask.any()) op_->mask.apply(rhs);
  if (op_->pure_neumann()) op_->deflation.project(rhs);

  const SparseSym& lhs = shifted(cn ? 0.5 * tau : tau);
  CgResult sol = cg_solve(lhs, rhs, opts_.cg, op_->mask_ptr(), op_->deflation_ptr(),
                          warm_.empty() ? std::span<const double>{} : warm_);
  if (!sol.converged) {
    throw std::runtime_error("ParabolicStepper: inner solve failed at step " +
                             std::to_string(steps_ + 1));
  }
  u_ = std::move(sol.x);
  warm_ = u_;
  t_ += tau;
  ++steps_;
}

std::vector<double> ParabolicStepper::state() const {
  std::vector<double> out = u_;
  if (op_->pure_neumann()) {
    for (int i = 0; i < op_->rigid->size(); ++i) {
      axpy(rigid_coef_[i], op_->rigid->nodal[i], out);
    }
  }
  return out;
}

namespace {

EnergyEntry energy_entry(const DiscreteOperator& op, double t, std::span<const double> u) {
  EnergyEntry e;
  e.t = t;
  e.mass_norm_sq = m_inner(op.mass(), u, u);
  const std::vector<double> au = op.stiffness().multiply(u);
  e.stiffness_energy = dot_vec(u, au);
  if (op.pure_neumann()) {
    e.rigid_moments = rigid_coefficients(u, *op.rigid, op.mass());
  }
  return e;
}

}  // namespace

Trajectory step_parabolic(const DiscreteOperator& op, const TimeGrid& grid,
                          std::span<const double> psi, const ForcingSampler* forcing,
                          const StepOptions& opts) {
  grid.validate();
  if (static_cast<int>(psi.size()) != op.dofs()) {
    throw std::invalid_argument("step_parabolic: initial data size mismatch");
  }

  ParabolicStepper stepper(op, grid.scheme, opts);
  stepper.set_state(std::vector<double>(psi.begin(), psi.end()), grid.t0);

  Trajectory traj;
  std::vector<double> state = stepper.state();
  traj.times.push_back(grid.t0);
  traj.states.push_back(state);
  traj.energy_log.push_back(energy_entry(op, grid.t0, state));

  double f_l1 = 0.0;  // sum tau |f|_M, the L_{2,1} surrogate
  std::vector<double> f(op.dofs(), 0.0);
  double sup_mass = traj.energy_log.back().mass_norm_sq;
  double dissipation = 0.0;

  for (std::size_t k = 0; k < grid.tau.size(); ++k) {
    const double tau = grid.tau[k];
    if (forcing != nullptr) {
      (*forcing)(stepper.time() + 0.5 * tau, f);
      f_l1 += tau * m_norm(op.mass(), f);
    }
    stepper.step(tau, forcing);
    state = stepper.state();
    const EnergyEntry e = energy_entry(op, stepper.time(), state);
    sup_mass = std::max(sup_mass, e.mass_norm_sq);
    dissipation += tau * e.stiffness_energy;
    if ((static_cast<int>(k + 1) % std::max(1, opts.store_stride)) == 0 ||
        k + 1 == grid.tau.size()) {
      traj.times.push_back(stepper.time());
      traj.states.push_back(state);
      traj.energy_log.push_back(e);
    }
  }

  const double psi_m2 = m_inner(op.mass(), psi, psi);
  const double rhs_scale = psi_m2 + f_l1 * f_l1;
  traj.measured_energy_constant = rhs_scale > 0.0 ? (sup_mass + dissipation) / rhs_scale : 0.0;
  return traj;
}

std::vector<double> weak_residual(const Trajectory& traj, const DiscreteOperator& op,
                                  const ForcingSampler* forcing,
                                  const std::vector<SpaceTimeTestField>& test_fields) {
  if (traj.times.size() < 2) throw std::invalid_argument("weak_residual: trajectory too short");
  const double t_end = traj.times.back();
  std::vector<double> residuals;
  std::vector<double> f(op.dofs(), 0.0);

  for (const SpaceTimeTestField& phi : test_fields) {
    if (std::abs(phi.g(t_end)) > 1e-13) {
      throw std::invalid_argument("weak_residual: test field must vanish at the final time");
    }
    std::vector<double> w = phi.w;
    if (op.mask.any()) {
      std::vector<double> masked = w;
      op.mask.apply(masked);
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (masked[i] != w[i]) {
          throw std::invalid_argument("weak_residual: test field must vanish on D-dofs");
        }
      }
    }
    const std::vector<double> mw = op.mass().multiply(w);
    const std::vector<double> aw = op.stiffness().multiply(w);

    double r = 0.0;
    for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
      const double ta = traj.times[k];
      const double tb = traj.times[k + 1];
      const double tau = tb - ta;
      const double g_mid = 0.5 * (phi.g(ta) + phi.g(tb));
      // -int (u, w) g' dt with the exact increment of g on the panel.
      const double u_mw_mid =
          0.5 * (dot_vec(traj.states[k], mw) + dot_vec(traj.states[k + 1], mw));
      r -= u_mw_mid * (phi.g(tb) - phi.g(ta));
      // + int B(u, w) g dt (trapezoid).
      const double u_aw_mid =
          0.5 * (dot_vec(traj.states[k], aw) + dot_vec(traj.states[k + 1], aw));
      r += tau * g_mid * u_aw_mid;
      // - int (f, w) g dt.
      if (forcing != nullptr) {
        (*forcing)(0.5 * (ta + tb), f);
        r -= tau * g_mid * dot_vec(f, mw);
      }
    }
    // - (psi, w) g(t0).
    r -= dot_vec(traj.states.front(), mw) * phi.g(traj.times.front());
    residuals.push_back(r);
  }
  return residuals;
}

DecayFit decay_rate(const DiscreteOperator& op, const Trajectory& traj) {
  DecayFit fit;
  const EigResult eig = smallest_eigs(op.stiffness(), op.mass(), 1, {}, op.mask_ptr(),
                                      op.deflation_ptr());
  fit.lambda1 = eig.eigenvalues[0];

  // Fit window: second half of the trajectory, stopping at the solver floor.
  std::vector<double> ts, logs;
  const std::size_t begin = traj.times.size() / 2;
  fit.window_begin = static_cast<int>(begin);
  for (std::size_t k = begin; k < traj.times.size(); ++k) {
    const double nrm = std::sqrt(std::max(traj.energy_log[k].mass_norm_sq, 0.0));
    if (nrm < 1e-14) break;
    ts.push_back(traj.times[k]);
    logs.push_back(std::log(nrm));
  }
  if (ts.size() < 3) throw std::invalid_argument("decay_rate: window too short");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sx += ts[i];
    sy += logs[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * logs[i];
  }
  const double nn = static_cast<double>(ts.size());
  fit.fitted_rate = -(nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  fit.relative_gap = std::abs(fit.fitted_rate - fit.lambda1) / std::max(fit.lambda1, 1e-300);
  return fit;
}

}  // namespace elastheat
