#include "elastheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace elastheat {

namespace {

// Unit-ball bump normalization: Phi(z) = c exp(-1/(1-|z|^2)), with c chosen
// so the plane integral is 1. The radial integral pi*int_0^1 exp(-1/u) du is
// computed once by Simpson refinement.
double bump_normalizer() {
  static const double c = [] {
    auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
    const int n = 1 << 16;
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) s += f(static_cast<double>(i) / n) * (i % 2 == 1 ? 4.0 : 2.0);
    const double integral = 3.141592653589793 * s / (3.0 * n);
    return 1.0 / integral;
  }();
  return c;
}

}  // namespace

double Mollifier::profile(double r2) {
  if (r2 >= 1.0) return 0.0;
  return bump_normalizer() * std::exp(-1.0 / (1.0 - r2));
}

double Mollifier::value(Vec2 x) const {
  const Vec2 z = (1.0 / epsilon) * (x - center);
  return profile(dot(z, z)) / (epsilon * epsilon);
}

std::vector<double> mollified_initial(const DiscreteOperator& op, Vec2 y, double eps, int k) {
  if (k < 0 || k > 1) throw std::invalid_argument("mollified_initial: component out of range");
  const Mesh& mesh = *op.mesh;
  Mollifier phi{y, eps};
  std::vector<double> psi(op.dofs(), 0.0);
  for (int i = 0; i < mesh.node_count(); ++i) {
    psi[2 * i + k] = phi.value(mesh.nodes[i]);
  }
  // Rescale so the discrete mass-weighted integral of component k is 1.
  std::vector<double> ones(op.dofs(), 0.0);
  for (int i = 0; i < mesh.node_count(); ++i) ones[2 * i + k] = 1.0;
  const double integral = m_inner(op.mass(), ones, psi);
  if (integral <= 0.0) {
    throw std::invalid_argument("mollified_initial: mollifier not resolved by the mesh");
  }
  for (double& v : psi) v /= integral;
  return psi;
}

namespace {

void check_kernel_pre(const DiscreteOperator& op, Vec2 y, double eps) {
  const Mesh& mesh = *op.mesh;
  if (eps < 2.0 * mesh.h_max) {
    throw std::invalid_argument("build_kernel_column: mollifier under-resolved (eps < 2h)");
  }
  // Exact point-to-segment distance to the polygonal boundary.
  double d = std::numeric_limits<double>::infinity();
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    d = std::min(d, point_segment_distance(y, mesh.nodes[e.a], mesh.nodes[e.b]));
  }
  if (eps > d) {
    throw std::invalid_argument("build_kernel_column: source too close to the boundary");
  }
}

}  // namespace

Trajectory build_kernel_column(const DiscreteOperator& op, Vec2 y, double eps, int k,
                               const TimeGrid& grid, const KernelBuildOptions& opts) {
  check_kernel_pre(op, y, eps);
  std::vector<double> psi = mollified_initial(op, y, eps, k);
  if (op.mask.any()) op.mask.apply(psi);

  StepOptions sopts;
  sopts.cg = opts.cg;
  sopts.store_stride = opts.store_stride;
  if (opts.corrected && op.pure_neumann()) {
    // Subtract the discrete rigid projection at t = 0 and keep iterates
    // deflated.
    const std::vector<double> pr = project_rigid(psi, *op.rigid, op.mass());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] -= pr[i];
    sopts.v_mode = true;
  }
  return step_parabolic(op, grid, psi, nullptr, sopts);
}

KernelField build_kernel_field(const DiscreteOperator& op, Vec2 y, double eps,
                               const TimeGrid& grid, const KernelBuildOptions& opts) {
  KernelField field;
  field.y = y;
  field.epsilon = eps;
  field.corrected = opts.corrected && op.pure_neumann();
  field.mesh_id = op.mesh_id;
  field.tensor_id = op.tensor_id;
  for (int k = 0; k < 2; ++k) {
    Trajectory traj = build_kernel_column(op, y, eps, k, grid, opts);
    if (k == 0) field.times = traj.times;
    field.columns[k] = std::move(traj.states);
  }
  return field;
}

Mat2 kernel_at(const KernelField& field, const Mesh& mesh, const TriLocator& locator, Vec2 x,
               double t) {
  if (field.times.empty()) throw std::invalid_argument("kernel_at: empty field");
  const double t0 = field.times.front();
  const double t1 = field.times.back();
  if (t < t0 - 1e-12 || t > t1 + 1e-12 * std::max(1.0, t1)) {
    throw std::invalid_argument("kernel_at: time outside the stored grid");
  }
  t = std::clamp(t, t0, t1);
  const auto hit = locator.locate(x);
  if (!hit) throw std::invalid_argument("kernel_at: point outside the mesh");

  const auto it = std::upper_bound(field.times.begin(), field.times.end(), t);
  std::size_t hi = std::min<std::size_t>(it - field.times.begin(), field.times.size() - 1);
  std::size_t lo = hi == 0 ? 0 : hi - 1;
  const double ta = field.times[lo];
  const double tb = field.times[hi];
  const double w = tb > ta ? (t - ta) / (tb - ta) : 0.0;

  const auto& tri = mesh.triangles[hit->triangle];
  Mat2 k_val;
  for (int k = 0; k < 2; ++k) {
    for (int c = 0; c < 2; ++c) {
      double va = 0.0, vb = 0.0;
      for (int local = 0; local < 3; ++local) {
        const double bary = hit->bary[local];
        va += bary * field.columns[k][lo][2 * tri[local] + c];
        vb += bary * field.columns[k][hi][2 * tri[local] + c];
      }
      k_val(c, k) = (1.0 - w) * va + w * vb;
    }
  }
  return k_val;
}

std::pair<KernelField, EpsLadderReport> epsilon_extrapolate(
    const DiscreteOperator& op, Vec2 y, const TimeGrid& grid,
    const std::vector<double>& eps_ladder, const std::vector<ProbePoint>& probes,
    const KernelBuildOptions& opts) {
  if (eps_ladder.size() < 2) {
    throw std::invalid_argument("epsilon_extrapolate: ladder needs at least 2 rungs");
  }
  for (std::size_t i = 1; i < eps_ladder.size(); ++i) {
    if (eps_ladder[i] >= eps_ladder[i - 1]) {
      throw std::invalid_argument("epsilon_extrapolate: ladder must decrease");
    }
  }
  EpsLadderReport report;
  report.epsilons = eps_ladder;
  TriLocator locator(*op.mesh);

  std::vector<KernelField> fields;
  for (double eps : eps_ladder) fields.push_back(build_kernel_field(op, y, eps, grid, opts));
  for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
    double worst = 0.0;
    for (const ProbePoint& p : probes) {
      const Mat2 a = kernel_at(fields[i], *op.mesh, locator, p.x, p.t);
      const Mat2 b = kernel_at(fields[i + 1], *op.mesh, locator, p.x, p.t);
      double diff = 0.0;
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) diff = std::max(diff, std::abs(a(r, c) - b(r, c)));
      }
      worst = std::max(worst, diff);
    }
    report.cauchy_differences.push_back(worst);
  }
  report.cauchy_decreasing = true;
  for (std::size_t i = 1; i < report.cauchy_differences.size(); ++i) {
    if (report.cauchy_differences[i] > report.cauchy_differences[i - 1]) {
      report.cauchy_decreasing = false;
    }
  }
  KernelField finest = std::move(fields.back());
  return {std::move(finest), std::move(report)};
}

SymmetryCheckResult symmetry_check(const DiscreteOperator& op, const std::vector<Vec2>& x_list,
                                   const std::vector<Vec2>& y_list,
                                   const std::vector<double>& t_list, double eps,
                                   const TimeGrid& grid, double pairing_tol) {
  SymmetryCheckResult res;
  TriLocator locator(*op.mesh);
  KernelBuildOptions opts;
  opts.corrected = false;

  for (std::size_t p = 0; p < x_list.size(); ++p) {
    const Vec2 x = x_list[p];
    const Vec2 y = y_list[p];
    KernelField from_y = build_kernel_field(op, y, eps, grid, opts);
    KernelField from_x = build_kernel_field(op, x, eps, grid, opts);

    std::array<std::vector<double>, 2> phi_x, phi_y;
    for (int k = 0; k < 2; ++k) {
      phi_x[k] = mollified_initial(op, x, eps, k);
      phi_y[k] = mollified_initial(op, y, eps, k);
      if (op.mask.any()) {
        op.mask.apply(phi_x[k]);
        op.mask.apply(phi_y[k]);
      }
    }

    for (double t : t_list) {
      // Locate the time slice index (exact grid times expected).
      const auto it = std::lower_bound(from_y.times.begin(), from_y.times.end(),
                                       t - 1e-12 * std::max(1.0, t));
      if (it == from_y.times.end()) throw std::invalid_argument("symmetry_check: bad time");
      const std::size_t slice = it - from_y.times.begin();

      // Pairing p_{lk} = (phi_x e_l, P(t) phi_y e_k)_M and its transpose.
      double scale = 0.0;
      double worst = 0.0;
      for (int l = 0; l < 2; ++l) {
        for (int k = 0; k < 2; ++k) {
          const double plk = m_inner(op.mass(), phi_x[l], from_y.columns[k][slice]);
          const double qkl = m_inner(op.mass(), phi_y[k], from_x.columns[l][slice]);
          worst = std::max(worst, std::abs(plk - qkl));
          scale = std::max({scale, std::abs(plk), std::abs(qkl)});
        }
      }
      res.pairing_max_rel = std::max(res.pairing_max_rel, worst / std::max(scale, 1e-300));

      const Mat2 kxy = kernel_at(from_y, *op.mesh, locator, x, t);
      const Mat2 kyx = kernel_at(from_x, *op.mesh, locator, y, t);
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          res.pointwise_max_abs =
              std::max(res.pointwise_max_abs, std::abs(kxy(r, c) - kyx(c, r)));
        }
      }
    }
  }
  res.pass = res.pairing_max_rel <= pairing_tol;
  return res;
}

}  // namespace elastheat
