// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criterion tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "elastheat/estimates.hpp"
#include "elastheat/green.hpp"
#include "elastheat/kernel.hpp"
#include "elastheat/report.hpp"
#include "elastheat/rng.hpp"
#include "elastheat/runner.hpp"

using namespace elastheat;

namespace {

std::string g_configs_dir = "configs";
int g_failures = 0;

void criterion(int number, const std::string& label, const std::function<bool()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string error;
  try {
    ok = body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number, label.c_str(),
              secs, error.empty() ? "" : " error: ", error.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::shared_ptr<const Mesh> square_mesh(const std::vector<BoundaryLabel>& labels, double h) {
  return std::make_shared<const Mesh>(
      triangulate(PolygonalDomain::rectangle({0, 0}, {1, 1}, labels), h));
}

std::shared_ptr<const ElasticityTensor> lame11() {
  return std::make_shared<const ElasticityTensor>(make_lame_tensor(1.0, 1.0));
}

const std::vector<BoundaryLabel> kAllD = {BoundaryLabel::Dirichlet, BoundaryLabel::Dirichlet,
                                          BoundaryLabel::Dirichlet, BoundaryLabel::Dirichlet};
const std::vector<BoundaryLabel> kAllN = {BoundaryLabel::Neumann, BoundaryLabel::Neumann,
                                          BoundaryLabel::Neumann, BoundaryLabel::Neumann};
const std::vector<BoundaryLabel> kMixed = {BoundaryLabel::Dirichlet, BoundaryLabel::Neumann,
                                           BoundaryLabel::Neumann, BoundaryLabel::Neumann};

double rel_m_err(const SparseSym& m, std::span<const double> got, std::span<const double> want) {
  std::vector<double> d(got.size());
  for (std::size_t i = 0; i < got.size(); ++i) d[i] = got[i] - want[i];
  return m_norm(m, d) / std::max(m_norm(m, want), 1e-300);
}

// 1. Semigroup oracle equivalence: both schemes at t in {0.01, 0.1, 1},
// relative M-norm error <= 2e-3 at baseline tau, orders 1 and 2 (+-0.2)
// under tau-halving. Mixed square, <= 600 dofs: with D nonempty the slowest
// mode survives to t = 1 at e^{-lambda_1}, so every time has an asymptotic
// window where the scheme error is measurable above the solver floor.
bool criterion_1() {
  const DiscreteOperator op = assemble(square_mesh(kMixed, 0.09), lame11());
  if (op.dofs() > 600) return false;
  std::vector<double> psi = mollified_initial(op, {0.5, 0.5}, 0.25, 0);
  op.mask.apply(psi);
  const ExpmOracle oracle(op.stiffness(), op.mass(), op.mask_ptr());

  StepOptions sopts;
  sopts.cg.tol = 1e-13;
  auto err = [&](Scheme scheme, double t, int steps) {
    const Trajectory traj =
        step_parabolic(op, TimeGrid::uniform(0.0, t, steps, scheme), psi, nullptr, sopts);
    return rel_m_err(op.mass(), traj.states.back(), oracle.apply(t, {psi})[0]);
  };

  const double times[3] = {0.01, 0.1, 1.0};
  const int be_steps[3] = {512, 2048, 8192};
  const int cn_steps[3] = {64, 64, 128};
  bool ok = true;
  for (int i = 0; i < 3; ++i) {
    const double be_a = err(Scheme::BackwardEuler, times[i], be_steps[i]);
    const double be_b = err(Scheme::BackwardEuler, times[i], 2 * be_steps[i]);
    const double be_order = std::log2(be_a / be_b);
    const double cn_a = err(Scheme::CrankNicolsonBeStartup, times[i], cn_steps[i]);
    const double cn_b = err(Scheme::CrankNicolsonBeStartup, times[i], 2 * cn_steps[i]);
    const double cn_order = std::log2(cn_a / cn_b);
    std::printf("     t=%-5g BE err %.2e order %.2f | CN err %.2e order %.2f\n", times[i], be_a,
                be_order, cn_a, cn_order);
    if (be_a > 2e-3 || cn_a > 2e-3) ok = false;
    if (std::abs(be_order - 1.0) > 0.2 || std::abs(cn_order - 2.0) > 0.2) ok = false;
  }
  return ok;
}

// 2. Green oracle equivalence (pure Dirichlet): build_green equals the
// direct discrete-delta solve to <= 1e-6 relative on a <= 600 dof mesh.
bool criterion_2() {
  const DiscreteOperator op = assemble(square_mesh(kAllD, 0.09), lame11());
  if (op.dofs() > 600) return false;
  const Vec2 y = {0.5, 0.5};
  const double eps = 0.25;
  GreenOptions opts;
  opts.cg.tol = 1e-12;
  opts.tail_tol = 1e-9;
  const GreenField field = build_green(op, y, eps, opts);

  CgOptions cg;
  cg.tol = 1e-13;
  bool ok = true;
  for (int k = 0; k < 2; ++k) {
    std::vector<double> psi = mollified_initial(op, y, eps, k);
    op.mask.apply(psi);
    std::vector<double> rhs = op.mass().multiply(psi);
    op.mask.apply(rhs);
    const CgResult direct = cg_solve(op.stiffness(), rhs, cg, op.mask_ptr(), nullptr);
    const double rel = rel_m_err(op.mass(), field.columns[k], direct.x);
    std::printf("     column %d relative error %.2e\n", k, rel);
    if (rel > 1e-6) ok = false;
  }
  return ok;
}

// 3. Exact discrete conservation over >= 1000 pure-traction steps.
bool criterion_3() {
  const DiscreteOperator op = assemble(square_mesh(kAllN, 0.2), lame11());
  Rng rng(0xc3);
  std::vector<double> psi(op.dofs());
  for (double& v : psi) v = rng.normal();
  const Trajectory traj =
      step_parabolic(op, TimeGrid::uniform(0.0, 2.0, 1000, Scheme::BackwardEuler), psi);
  const auto& m0 = traj.energy_log.front().rigid_moments;
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.energy_log.size(); ++k) {
    for (int i = 0; i < 3; ++i) {
      const double drift = std::abs(traj.energy_log[k].rigid_moments[i] -
                                    traj.energy_log[k - 1].rigid_moments[i]);
      worst = std::max(worst, drift / (std::abs(m0[i]) + 1e-14 / 1e-12));
    }
  }
  std::printf("     worst per-step relative drift %.2e over %zu steps\n", worst,
              traj.energy_log.size() - 1);
  return worst <= 1e-12;
}

// 4. Symmetry: duality pairings <= 1e-9 relative on every test mesh;
// pointwise kernel and Green mismatches decrease along an h-halving ladder.
bool criterion_4() {
  bool ok = true;
  std::vector<double> kernel_mismatch, green_mismatch;
  for (double h : {0.18, 0.09, 0.045}) {
    const auto mesh = square_mesh(kMixed, h);
    const DiscreteOperator op = assemble(mesh, lame11());
    const double eps = 2.05 * mesh->h_max;
    const TimeGrid grid =
        TimeGrid::graded(0.0, 0.06, 5e-4, 1.3, 5e-3, Scheme::CrankNicolsonBeStartup);
    KernelBuildOptions kopts;
    kopts.cg.tol = 1e-12;
    const SymmetryCheckResult sym =
        symmetry_check(op, {{0.45, 0.42}}, {{0.56, 0.58}}, {0.03, 0.06}, eps, grid);
    if (sym.pairing_max_rel > 1e-9) ok = false;
    kernel_mismatch.push_back(sym.pointwise_max_abs);

    GreenOptions gopts;
    gopts.cg.tol = 1e-12;
    gopts.tail_tol = 1e-8;
    const GreenField gx = build_green(op, {0.45, 0.42}, eps, gopts);
    const GreenField gy = build_green(op, {0.56, 0.58}, eps, gopts);
    green_mismatch.push_back(green_symmetry_mismatch(op, gx, gy));
    std::printf("     h=%.3f pairing %.2e kernel pointwise %.3e green pointwise %.3e\n",
                mesh->h_max, sym.pairing_max_rel, kernel_mismatch.back(),
                green_mismatch.back());
  }
  for (std::size_t i = 1; i < kernel_mismatch.size(); ++i) {
    if (kernel_mismatch[i] >= kernel_mismatch[i - 1]) ok = false;
    if (green_mismatch[i] >= green_mismatch[i - 1]) ok = false;
  }
  return ok;
}

struct FineCtx {
  std::shared_ptr<const Mesh> mesh;
  DiscreteOperator op;
};
FineCtx& fine_ctx() {
  static FineCtx ctx = [] {
    FineCtx c;
    c.mesh = square_mesh(kMixed, 0.0111);
    c.op = assemble(c.mesh, lame11());
    return c;
  }();
  return ctx;
}

// 5. Theorem-1 scalings on the mixed unit square: L1 cylinder slope 2 +- 0.3
// over r in {d_y/8, d_y/4, d_y/2}; on-diagonal |K(y,y,t)| slope -1 +- 0.15.
bool criterion_5() {
  const DiscreteOperator& op = fine_ctx().op;
  const Vec2 y = {0.5, 0.5};
  const double d_y = 0.5;
  const double eps = 0.0225;
  const TimeGrid grid =
      TimeGrid::graded(0.0, 0.0675, 1e-4, 1.2, 1e-3, Scheme::BackwardEuler);
  KernelBuildOptions kopts;
  kopts.cg.tol = 1e-10;
  const KernelField field = build_kernel_field(op, y, eps, grid, kopts);

  EstimateOptions opts;
  opts.r_ladder = {d_y / 8.0, d_y / 4.0, d_y / 2.0};
  const auto reports = estimate_suite(field, op, d_y, opts);
  double l1_slope = 0.0;
  for (const EstimateReport& r : reports) {
    if (r.id == "thm1-lp-p1") l1_slope = r.constants.at("slope");
  }

  std::vector<double> diag_times;
  for (int i = 0; i < 7; ++i) diag_times.push_back(2.5e-3 * std::pow(10.0, 1.08 * i / 6.0));
  const EstimateReport diag = on_diagonal_slope(field, op, diag_times, std::sqrt(2.0), 0.15);
  const double diag_slope = diag.constants.at("slope");
  std::printf("     L1 slope %.3f (target 2 +- 0.3), on-diagonal slope %.3f (target -1 +- 0.15)\n",
              l1_slope, diag_slope);
  return std::abs(l1_slope - 2.0) <= 0.3 && std::abs(diag_slope + 1.0) <= 0.15;
}

// 6. Gaussian bound: theta > 0 with zero violations over a cloud spanning
// |x-y|^2/t in [0, 16]; flat tail beyond diam^2.
bool criterion_6() {
  const DiscreteOperator op = assemble(square_mesh(kMixed, 0.0222), lame11());
  const Vec2 y = {0.5, 0.5};
  const double eps = 0.045;
  const double diam = std::sqrt(2.0);
  const double t_end = 1.25 * diam * diam;
  const TimeGrid grid = TimeGrid::graded(0.0, t_end, 1e-4, 1.25, 0.05 * diam * diam,
                                         Scheme::CrankNicolsonBeStartup);
  KernelBuildOptions kopts;
  kopts.cg.tol = 1e-10;
  const KernelField field = build_kernel_field(op, y, eps, grid, kopts);

  TriLocator locator(*op.mesh);
  std::vector<ProbePoint> samples;
  double max_ratio = 0.0;
  for (double dd : {0.15, 0.25, 0.36, 0.45}) {
    for (int dir = 0; dir < 4; ++dir) {
      const double ang = 1.5707963267948966 * dir + 0.4;
      const Vec2 x = y + Vec2{dd * std::cos(ang), dd * std::sin(ang)};
      if (!locator.locate(x)) continue;
      for (double rho : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0, 16.0}) {
        const double t = dd * dd / rho;
        if (t <= 4.0 * eps * eps || t > t_end) continue;
        samples.push_back({x, t});
        max_ratio = std::max(max_ratio, rho);
      }
    }
  }
  for (int i = 0; i < 7; ++i) {
    samples.push_back({y, 6.0 * eps * eps * std::pow(10.0, 1.2 * i / 6.0)});
  }
  GaussianOptions gopts;
  gopts.c_ceiling = 1e3;
  const EstimateReport fit = gaussian_fit(field, op, samples, diam, gopts);

  std::vector<ProbePoint> tail;
  for (double dd : {0.0, 0.2, 0.4}) {
    tail.push_back({y + Vec2{dd, 0.0}, 1.05 * diam * diam});
    tail.push_back({y + Vec2{0.0, dd}, 1.2 * diam * diam});
  }
  const EstimateReport flat = gaussian_flat_tail(field, op, tail, diam, 1e3);
  std::printf("     theta %.4f over ratios up to %.0f, flat-tail sup %.3e\n",
              fit.constants.at("theta"), max_ratio, flat.constants.at("sup_scaled"));
  return fit.pass && max_ratio >= 16.0 && flat.pass;
}

// 7. Theorem-4 log bound: near-diagonal regression positive with R^2 >= 0.95
// over a cloud spanning 1.5 decades; far pairs flat.
bool criterion_7() {
  const DiscreteOperator& op = fine_ctx().op;
  const Vec2 y = {0.2, 0.2};
  GreenOptions gopts;
  gopts.cg.tol = 1e-9;
  gopts.tail_tol = 1e-5;
  const GreenField field = build_green(op, y, 0.0225, gopts);

  GreenBoundsOptions bopts;
  bopts.r_min = 0.0335;
  bopts.r_max = 1.07;
  bopts.radii = 14;
  const auto reports = green_bounds(op, field, std::sqrt(2.0), bopts);
  bool ok = true;
  for (const EstimateReport& r : reports) {
    if (r.id == "thm4-log-bound") {
      std::printf("     slope %.4f r2 %.4f far slope %.4f\n", r.constants.at("slope"),
                  r.constants.at("r_squared"),
                  r.constants.count("far_slope") ? r.constants.at("far_slope") : 0.0);
      if (!r.pass) ok = false;
    }
  }
  return ok;
}

// 8. Korn suite: pure-Dirichlet first Korn ratio <= 2 + 1e-9 on every level;
// pure-Neumann deflated coercivity positive and ladder-stable.
bool criterion_8() {
  const DiscreteOperator dop = assemble(square_mesh(kAllD, 0.25), lame11());
  const KornReport dirichlet = estimate_constants(dop, 3);
  bool ok = dirichlet.first_korn_applicable;
  for (const KornLevel& l : dirichlet.levels) {
    std::printf("     D-level h=%.3f first-korn %.12f\n", l.h, l.first_korn_ratio);
    if (l.first_korn_ratio > 2.0 + 1e-9) ok = false;
  }
  const DiscreteOperator nop = assemble(square_mesh(kAllN, 0.25), lame11());
  const KornReport neumann = estimate_constants(nop, 3);
  for (const KornLevel& l : neumann.levels) {
    if (!(l.coercivity_rho > 0.0)) ok = false;
  }
  const double a = neumann.levels[1].coercivity_rho;
  const double b = neumann.levels[2].coercivity_rho;
  std::printf("     N coercivity rho ladder change %.4f\n", std::abs(b - a) / b);
  if (std::abs(b - a) / b >= 0.1) ok = false;
  return ok;
}

// 9. Decay rate matches lambda_1 within 5% for generic data.
bool criterion_9() {
  const DiscreteOperator op = assemble(square_mesh(kAllD, 0.09), lame11());
  Rng rng(0xc9);
  std::vector<double> psi(op.dofs());
  for (double& v : psi) v = rng.normal();
  op.mask.apply(psi);
  const EigResult eig = smallest_eigs(op.stiffness(), op.mass(), 1, {}, op.mask_ptr(), nullptr);
  StepOptions sopts;
  sopts.cg.tol = 1e-13;
  // The fit window is the second half of the run: the Dirichlet square has
  // lambda_2 - lambda_1 of order half of lambda_1, so six e-foldings of the
  // gap are needed before the tail looks single-mode.
  const double t_end = 12.0 / eig.eigenvalues[0];
  const Trajectory traj = step_parabolic(
      op, TimeGrid::uniform(0.0, t_end, 1024, Scheme::CrankNicolsonBeStartup), psi, nullptr,
      sopts);
  const DecayFit fit = decay_rate(op, traj);
  std::printf("     fitted %.4f lambda1 %.4f gap %.4f\n", fit.fitted_rate, fit.lambda1,
              fit.relative_gap);
  return fit.relative_gap <= 0.05;
}

// 10. Initial trace: monotone recovery of a smooth field along the t-ladder
// {1e-2, 1e-3, 1e-4} d^2 with final error <= 1e-2 |psi|_inf.
bool criterion_10() {
  const DiscreteOperator op = assemble(square_mesh(kMixed, 0.05), lame11());
  std::vector<double> psi(op.dofs());
  for (int i = 0; i < op.mesh->node_count(); ++i) {
    const Vec2 p = op.mesh->nodes[i];
    psi[2 * i] = std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
    psi[2 * i + 1] = 4.0 * p.x * (1.0 - p.x) * p.y * (1.0 - p.y);
  }
  op.mask.apply(psi);
  const Vec2 x0 = {0.3, 0.4};
  const double d0 = 0.3;
  const Vec2 exact = {std::sin(M_PI * 0.3) * std::sin(M_PI * 0.4), 4.0 * 0.3 * 0.7 * 0.4 * 0.6};
  TriLocator locator(*op.mesh);
  StepOptions sopts;
  sopts.cg.tol = 1e-12;
  std::vector<double> errors;
  for (double scale : {1e-2, 1e-3, 1e-4}) {
    const double t = scale * d0 * d0;
    const TimeGrid grid =
        TimeGrid::graded(0.0, t, t / 64.0, 1.3, t / 8.0, Scheme::CrankNicolsonBeStartup);
    const Trajectory traj = step_parabolic(op, grid, psi, nullptr, sopts);
    const auto hit = locator.locate(x0);
    const auto& tri = op.mesh->triangles[hit->triangle];
    Vec2 val;
    for (int local = 0; local < 3; ++local) {
      val.x += hit->bary[local] * traj.states.back()[2 * tri[local]];
      val.y += hit->bary[local] * traj.states.back()[2 * tri[local] + 1];
    }
    errors.push_back(std::hypot(val.x - exact.x, val.y - exact.y));
  }
  std::printf("     trace errors %.3e -> %.3e -> %.3e (|psi|_inf = 1)\n", errors[0], errors[1],
              errors[2]);
  return errors[1] < errors[0] && errors[2] < errors[1] && errors[2] <= 1e-2;
}

// 11. Hoelder probes: interior and boundary exponents positive, stable
// within +-20% under one refinement.
bool criterion_11() {
  std::vector<double> interior_fits, boundary_fits;
  for (double h : {0.03, 0.015}) {
    const auto mesh = square_mesh(kMixed, h);
    const DiscreteOperator op = assemble(mesh, lame11());
    std::vector<double> f(op.dofs(), 0.0);
    Mollifier bump{{0.8, 0.8}, 0.12};
    for (int i = 0; i < mesh->node_count(); ++i) {
      const double v = bump.value(mesh->nodes[i]);
      f[2 * i] = v;
      f[2 * i + 1] = 0.5 * v;
    }
    CgOptions cg;
    cg.tol = 1e-11;
    const StaticSolveResult sol = solve_static(op, load_vector(op, f), cg);
    HolderProbeOptions hopts;
    const EstimateReport interior =
        holder_probe_interior(*mesh, sol.u, {0.35, 0.35}, 0.25, hopts);
    const EstimateReport boundary = holder_probe_boundary(*mesh, sol.u, {0.4, 0.0}, 0.25, hopts);
    interior_fits.push_back(interior.constants.at("mu0"));
    boundary_fits.push_back(boundary.constants.at("mu0"));
    std::printf("     h=%.4f interior mu0 %.3f boundary mu0 %.3f\n", mesh->h_max,
                interior_fits.back(), boundary_fits.back());
  }
  bool ok = true;
  for (double v : interior_fits) {
    if (!(v > 0.0)) ok = false;
  }
  for (double v : boundary_fits) {
    if (!(v > 0.0)) ok = false;
  }
  if (std::abs(interior_fits[1] - interior_fits[0]) > 0.2 * std::abs(interior_fits[1])) ok = false;
  if (std::abs(boundary_fits[1] - boundary_fits[0]) > 0.2 * std::abs(boundary_fits[1])) ok = false;
  return ok;
}

// 12. End-to-end determinism of the bundled config.
bool criterion_12() {
  const ExperimentConfig config = load_config_file(g_configs_dir + "/square_mixed.cfg");
  RunOptions opts;
  opts.write_data = false;
  opts.out_dir_override = "/tmp/elastheat_accept_run1";
  const RunResult r1 = run_experiment(config, opts);
  opts.out_dir_override = "/tmp/elastheat_accept_run2";
  const RunResult r2 = run_experiment(config, opts);
  const bool identical = report_without_timing(r1.report) == report_without_timing(r2.report);
  std::printf("     bundled suites all pass: %s, reports byte-identical modulo timing: %s\n",
              r1.all_pass ? "yes" : "no", identical ? "yes" : "no");
  return identical && r1.all_pass && r2.all_pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_configs_dir = argv[1];
  criterion(1, "semigroup oracle equivalence, orders 1 and 2", criterion_1);
  criterion(2, "Green oracle equivalence, pure Dirichlet, 1e-6", criterion_2);
  criterion(3, "exact rigid-moment conservation over 1000 steps", criterion_3);
  criterion(4, "duality-pairing symmetry and pointwise h-ladder decay", criterion_4);
  criterion(5, "kernel L1-cylinder and on-diagonal scalings", criterion_5);
  criterion(6, "Gaussian bound feasibility and flat tail", criterion_6);
  criterion(7, "Green log bound regression", criterion_7);
  criterion(8, "Korn constants: first ratio <= 2, deflated coercivity stable", criterion_8);
  criterion(9, "decay rate vs smallest eigenvalue within 5%", criterion_9);
  criterion(10, "initial-trace recovery along the t-ladder", criterion_10);
  criterion(11, "Hoelder probes positive and refinement-stable", criterion_11);
  criterion(12, "end-to-end determinism of the bundled config", criterion_12);
  std::printf("%d of 12 criteria passed\n", 12 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
