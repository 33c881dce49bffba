#include "elastheat/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include "elastheat/report.hpp"

namespace elastheat {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < n; i += jobs) fn(i);
    });
  }
  for (std::thread& t : workers) t.join();
}

struct SuiteContext {
  const ExperimentConfig* config;
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const ElasticityTensor> tensor;
  DiscreteOperator op;
  double diam = 0.0;
  int jobs = 1;
  std::string out_dir;
  bool write_data = true;
  mutable double lambda1_cache = 0.0;

  double lambda1() const {
    if (lambda1_cache == 0.0) {
      const EigResult eig = smallest_eigs(op.stiffness(), op.mass(), 1, {}, op.mask_ptr(),
                                          op.deflation_ptr());
      lambda1_cache = eig.eigenvalues[0];
    }
    return lambda1_cache;
  }
};

double source_margin(const SuiteContext& ctx, Vec2 y) {
  return ctx.config->domain.distance_to_boundary(y);
}

nlohmann::json suite_korn(const SuiteContext& ctx) {
  nlohmann::json j;
  // The ladder refines its own coarse start so depth stays affordable even
  // when the kernel suites run on a fine mesh.
  const auto korn_mesh = std::make_shared<const Mesh>(
      triangulate(ctx.config->domain, ctx.config->korn_target_h));
  const DiscreteOperator korn_op = assemble(korn_mesh, ctx.tensor);
  const KornReport report = estimate_constants(korn_op, ctx.config->korn_depth);
  j["report"] = to_json(report);
  bool pass = true;
  for (const KornLevel& l : report.levels) {
    if (!(l.korn2_constant > 0.0) || !(l.friedrichs_constant > 0.0) ||
        !(l.coercivity_rho > 0.0)) {
      pass = false;
    }
    if (report.first_korn_applicable && l.first_korn_ratio > 2.0 + 1e-9) pass = false;
  }
  if (report.levels.size() >= 2) {
    const double a = report.levels[report.levels.size() - 2].coercivity_rho;
    const double b = report.levels.back().coercivity_rho;
    const double change = std::abs(b - a) / std::max(std::abs(b), 1e-300);
    j["coercivity_ladder_change"] = change;
    if (change >= 0.1) pass = false;
  }
  j["pass"] = pass;
  return j;
}

nlohmann::json suite_parabolic(const SuiteContext& ctx) {
  nlohmann::json j;
  Rng rng(ctx.config->seed ^ 0x70617261ull);
  std::vector<double> psi(ctx.op.dofs());
  for (double& v : psi) v = rng.normal();
  if (ctx.op.mask.any()) ctx.op.mask.apply(psi);

  // Long enough that the fit window (the second half) sits past the
  // second-mode transient.
  const double t_end = 12.0 / std::max(ctx.lambda1(), 1e-6);
  StepOptions sopts;
  sopts.v_mode = ctx.op.pure_neumann();
  if (sopts.v_mode) {
    const std::vector<double> pr = project_rigid(psi, *ctx.op.rigid, ctx.op.mass());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] -= pr[i];
  }
  const TimeGrid grid = TimeGrid::uniform(0.0, t_end, 512, Scheme::CrankNicolsonBeStartup);
  const Trajectory traj = step_parabolic(ctx.op, grid, psi, nullptr, sopts);

  bool monotone = true;
  for (std::size_t k = 1; k < traj.energy_log.size(); ++k) {
    if (traj.energy_log[k].mass_norm_sq >
        traj.energy_log[k - 1].mass_norm_sq * (1.0 + 1e-12)) {
      monotone = false;
    }
  }
  const DecayFit fit = decay_rate(ctx.op, traj);
  j["mass_norm_monotone"] = monotone;
  j["fitted_rate"] = fit.fitted_rate;
  j["lambda1"] = fit.lambda1;
  j["relative_gap"] = fit.relative_gap;
  j["measured_energy_constant"] = traj.measured_energy_constant;
  if (ctx.write_data) {
    write_text_file(ctx.out_dir + "/parabolic_energy.csv", energy_csv(traj));
    if (ctx.config->dump_trajectories) {
      write_text_file(ctx.out_dir + "/parabolic_trajectory.csv", trajectory_csv(traj));
    }
  }
  j["pass"] = monotone && fit.relative_gap <= 0.05;
  return j;
}

nlohmann::json suite_kernel(const SuiteContext& ctx) {
  nlohmann::json j;
  if (ctx.config->sources.empty() || ctx.config->epsilon_ladder.size() < 2) {
    throw std::runtime_error("kernel suite: needs sources and an epsilon ladder (>= 2 rungs)");
  }
  const TimeGrid grid = TimeGrid::graded(0.0, ctx.config->t_end, ctx.config->tau_min,
                                         ctx.config->grading_ratio, ctx.config->tau_max,
                                         Scheme::CrankNicolsonBeStartup);
  bool pass = true;
  nlohmann::json per_source = nlohmann::json::array();
  std::vector<nlohmann::json> slots(ctx.config->sources.size());

  parallel_for(static_cast<int>(ctx.config->sources.size()), ctx.jobs, [&](int si) {
    const Vec2 y = ctx.config->sources[si];
    const double d_y = source_margin(ctx, y);
    nlohmann::json js;
    js["source"] = {y.x, y.y};
    js["d_y"] = d_y;

    std::vector<ProbePoint> probes;
    for (int d = 0; d < 6; ++d) {
      const double ang = 1.0471975511965976 * d + 0.2;
      const double rr = 0.55 * d_y;
      probes.push_back({y + Vec2{rr * std::cos(ang), rr * std::sin(ang)},
                        0.25 * d_y * d_y});
    }
    KernelBuildOptions kopts;
    kopts.corrected = ctx.op.pure_neumann();
    auto [field, ladder] = epsilon_extrapolate(ctx.op, y, grid, ctx.config->epsilon_ladder,
                                               probes, kopts);
    js["epsilon_ladder"] = to_json(ladder);

    EstimateOptions eopts;
    eopts.r_ladder = {d_y / 8.0, d_y / 4.0, d_y / 2.0};
    const std::vector<EstimateReport> reports = estimate_suite(field, ctx.op, d_y, eopts);
    js["estimates"] = nlohmann::json::array();
    for (const EstimateReport& r : reports) js["estimates"].push_back(to_json(r));

    if (ctx.write_data) {
      std::vector<ProbePoint> csv_probes = probes;
      const double t_last = ctx.config->t_end;
      for (double t : {0.8 * t_last, 0.3 * t_last}) csv_probes.push_back({y, t});
      write_text_file(ctx.out_dir + "/kernel_samples_" + std::to_string(si) + ".csv",
                      kernel_csv(field, *ctx.mesh, csv_probes));
    }
    slots[si] = std::move(js);
  });

  for (nlohmann::json& js : slots) {
    for (const auto& est : js["estimates"]) {
      if (!est.at("pass").get<bool>()) pass = false;
    }
    if (!js["epsilon_ladder"].at("pass").get<bool>()) pass = false;
    per_source.push_back(std::move(js));
  }
  j["sources"] = std::move(per_source);

  // Mollified duality pairing symmetry at one pair of interior points.
  const Vec2 y0 = ctx.config->sources.front();
  const Vec2 x0 = y0 + Vec2{0.2 * source_margin(ctx, y0), 0.1 * source_margin(ctx, y0)};
  const double eps = ctx.config->epsilon_ladder.back();
  const SymmetryCheckResult sym = symmetry_check(
      ctx.op, {x0}, {y0}, {0.25 * ctx.config->t_end, 0.5 * ctx.config->t_end}, eps, grid);
  j["symmetry"] = to_json(sym);
  if (!sym.pass) pass = false;

  j["pass"] = pass;
  return j;
}

nlohmann::json suite_gaussian(const SuiteContext& ctx) {
  nlohmann::json j;
  const Vec2 y = ctx.config->sources.front();
  const double d_y = source_margin(ctx, y);
  const double eps = ctx.config->epsilon_ladder.back();
  const double diam = ctx.diam;

  const double t_end = 1.25 * diam * diam;
  const TimeGrid grid = TimeGrid::graded(0.0, t_end, ctx.config->tau_min,
                                         ctx.config->grading_ratio, 0.05 * diam * diam,
                                         Scheme::CrankNicolsonBeStartup);
  KernelBuildOptions kopts;
  kopts.corrected = ctx.op.pure_neumann();
  const KernelField field = build_kernel_field(ctx.op, y, eps, grid, kopts);

  // Sample cloud spanning |x - y|^2 / t in (0, 16], plus on-diagonal times.
  std::vector<ProbePoint> samples;
  const std::vector<double> dists = {0.25 * d_y, 0.5 * d_y, 0.8 * d_y, 1.1 * d_y};
  const std::vector<double> ratios = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0, 16.0};
  TriLocator locator(*ctx.mesh);
  for (double dd : dists) {
    for (int dir = 0; dir < 4; ++dir) {
      const double ang = 1.5707963267948966 * dir + 0.4;
      const Vec2 x = y + Vec2{dd * std::cos(ang), dd * std::sin(ang)};
      if (!locator.locate(x)) continue;
      for (double rho : ratios) {
        const double t = dd * dd / rho;
        if (t <= 4.0 * eps * eps || t > t_end) continue;
        samples.push_back({x, t});
      }
    }
  }
  std::vector<double> diag_times;
  for (int i = 0; i < 7; ++i) {
    diag_times.push_back(6.0 * eps * eps * std::pow(10.0, 1.2 * i / 6.0));
  }
  for (double t : diag_times) samples.push_back({y, t});

  GaussianOptions gopts;
  gopts.c_ceiling = ctx.config->gaussian_c_ceiling;
  const EstimateReport fit = gaussian_fit(field, ctx.op, samples, diam, gopts);
  const EstimateReport diag = on_diagonal_slope(field, ctx.op, diag_times, diam, 0.2);

  std::vector<ProbePoint> tail;
  for (double dd : {0.0, 0.3 * d_y, 0.6 * d_y}) {
    tail.push_back({y + Vec2{dd, 0.0}, 1.05 * diam * diam});
    tail.push_back({y + Vec2{0.0, dd}, 1.2 * diam * diam});
  }
  const double c_tail = fit.constants.count("c_min_theta0") > 0
                            ? std::max(ctx.config->gaussian_c_ceiling,
                                       fit.constants.at("c_min_theta0"))
                            : ctx.config->gaussian_c_ceiling;
  const EstimateReport flat = gaussian_flat_tail(field, ctx.op, tail, diam, c_tail);

  j["gaussian"] = to_json(fit);
  j["on_diagonal"] = to_json(diag);
  j["flat_tail"] = to_json(flat);
  j["pass"] = fit.pass && diag.pass && flat.pass;
  return j;
}

nlohmann::json suite_holder(const SuiteContext& ctx) {
  nlohmann::json j;
  // Static solution with the body force supported away from both probe
  // regions, so the probed field solves the homogeneous system there.
  std::vector<double> f(ctx.op.dofs(), 0.0);
  const Vec2 bump_c = {0.8 * ctx.diam / std::sqrt(2.0), 0.8 * ctx.diam / std::sqrt(2.0)};
  Mollifier bump{bump_c, 0.12 * ctx.diam};
  for (int i = 0; i < ctx.mesh->node_count(); ++i) {
    const double v = bump.value(ctx.mesh->nodes[i]);
    f[2 * i] = v;
    f[2 * i + 1] = 0.5 * v;
  }
  const StaticSolveResult sol = solve_static(ctx.op, load_vector(ctx.op, f));

  const double scale = ctx.diam / std::sqrt(2.0);
  HolderProbeOptions hopts;
  hopts.seed = ctx.config->seed ^ 0x686f6cULL;
  const EstimateReport interior =
      holder_probe_interior(*ctx.mesh, sol.u, {0.35 * scale, 0.35 * scale}, 0.25 * scale, hopts);

  // Boundary probe on a Dirichlet edge midpoint when one exists.
  nlohmann::json jb;
  bool have_boundary = false;
  for (int e = 0; e < ctx.config->domain.edge_count(); ++e) {
    if (ctx.config->domain.edge_labels[e] == BoundaryLabel::Dirichlet) {
      const auto [a, b] = ctx.config->domain.edge(e);
      const Vec2 mid = 0.5 * (a + b);
      const EstimateReport boundary =
          holder_probe_boundary(*ctx.mesh, sol.u, mid, 0.25 * scale, hopts);
      jb = to_json(boundary);
      have_boundary = true;
      j["pass"] = interior.pass && boundary.pass;
      break;
    }
  }
  if (!have_boundary) j["pass"] = interior.pass;
  j["interior"] = to_json(interior);
  if (have_boundary) j["boundary"] = jb;
  return j;
}

nlohmann::json suite_green(const SuiteContext& ctx) {
  nlohmann::json j;
  const Vec2 y = ctx.config->green_source.value_or(ctx.config->sources.front());
  const double eps = ctx.config->epsilon_ladder.back();

  GreenOptions gopts;
  gopts.lambda1_hint = ctx.lambda1();
  gopts.tail_tol = 1e-5;
  gopts.cg.tol = 1e-9;
  const GreenField field = build_green(ctx.op, y, eps, gopts);
  j["lambda1"] = field.lambda1;
  j["truncation_time"] = field.truncation_time;
  j["tail_bound"] = field.tail_bound;
  j["steps"] = field.steps;

  // Smooth compatible forcing for the crosscheck.
  std::vector<double> f(ctx.op.dofs(), 0.0);
  const double s = ctx.diam / std::sqrt(2.0);
  for (int i = 0; i < ctx.mesh->node_count(); ++i) {
    const Vec2 p = ctx.mesh->nodes[i];
    f[2 * i] = std::sin(3.141592653589793 * p.x / s) * std::sin(3.141592653589793 * p.y / s);
    f[2 * i + 1] = p.x / s * (1.0 - p.x / s) * p.y / s;
  }
  if (ctx.op.mask.any()) ctx.op.mask.apply(f);
  const CrosscheckResult cross = static_crosscheck(ctx.op, {field}, f);
  j["crosscheck"] = to_json(cross);

  GreenBoundsOptions bopts;
  double far = 0.0;
  for (const Vec2& corner : ctx.config->domain.outer) far = std::max(far, dist(corner, y));
  bopts.r_max = 0.95 * far;
  const std::vector<EstimateReport> bounds = green_bounds(ctx.op, field, ctx.diam, bopts);
  j["bounds"] = nlohmann::json::array();
  bool bounds_pass = true;
  for (const EstimateReport& r : bounds) {
    j["bounds"].push_back(to_json(r));
    if (!r.pass) bounds_pass = false;
  }

  if (ctx.write_data) {
    std::vector<Vec2> probes;
    TriLocator locator(*ctx.mesh);
    for (int d = 0; d < 16; ++d) {
      const double ang = 0.39269908169872414 * d;
      const Vec2 x = y + Vec2{0.3 * std::cos(ang), 0.3 * std::sin(ang)};
      if (locator.locate(x)) probes.push_back(x);
    }
    write_text_file(ctx.out_dir + "/green_samples.csv", green_csv(field, *ctx.mesh, probes));
  }

  j["pass"] = cross.relative_error <= 1e-2 && bounds_pass;
  return j;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts) {
  const auto t_start = Clock::now();
  RunResult result;

  SuiteContext ctx;
  ctx.config = &config;
  ctx.jobs = std::max(1, opts.jobs);
  ctx.out_dir = opts.out_dir_override.empty() ? config.out_dir : opts.out_dir_override;
  ctx.write_data = opts.write_data;
  std::filesystem::create_directories(ctx.out_dir);

  nlohmann::json& report = result.report;
  report["config_digest"] = config_digest(config);
  report["versions"] = {{"elastheat", kVersion}, {"report_schema", kReportSchema}};
  report["suites"] = nlohmann::json::object();
  nlohmann::json timing = nlohmann::json::object();

  {
    const auto t0 = Clock::now();
    Mesh mesh = triangulate(config.domain, config.target_h);
    for (int i = 0; i < config.refine_steps; ++i) mesh = refine(mesh);
    ctx.mesh = std::make_shared<const Mesh>(std::move(mesh));
    ctx.tensor = config.tensor;
    ctx.op = assemble(ctx.mesh, ctx.tensor);
    ctx.diam = config.domain.diameter();
    timing["setup_seconds"] = seconds_since(t0);
    report["mesh"] = {{"nodes", ctx.mesh->node_count()},
                      {"triangles", ctx.mesh->triangle_count()},
                      {"h_max", ctx.mesh->h_max},
                      {"dofs", ctx.op.dofs()}};
  }

  bool all_pass = true;
  for (const std::string& suite : config.suites) {
    const auto t0 = Clock::now();
    nlohmann::json out;
    try {
      if (suite == "korn") {
        out = suite_korn(ctx);
      } else if (suite == "parabolic") {
        out = suite_parabolic(ctx);
      } else if (suite == "kernel") {
        out = suite_kernel(ctx);
      } else if (suite == "gaussian") {
        out = suite_gaussian(ctx);
      } else if (suite == "holder") {
        out = suite_holder(ctx);
      } else if (suite == "green") {
        out = suite_green(ctx);
      } else {
        throw std::runtime_error("unknown suite '" + suite + "'");
      }
    } catch (const std::exception& e) {
      out = {{"pass", false}, {"error", e.what()}};
    }
    timing[suite + "_seconds"] = seconds_since(t0);
    if (!out.value("pass", false)) all_pass = false;
    report["suites"][suite] = std::move(out);
  }

  timing["total_seconds"] = seconds_since(t_start);
  report["timing"] = std::move(timing);
  report["pass"] = all_pass;
  result.all_pass = all_pass;

  result.report_path = ctx.out_dir + "/report.json";
  write_text_file(result.report_path, report.dump(2) + "\n");
  return result;
}

namespace {

void diff_json(const nlohmann::json& a, const nlohmann::json& b, const std::string& path,
               double rel_tol, CompareResult& out) {
  if (path.size() >= 7 && path.compare(path.size() - 7, 7, "/timing") == 0) return;
  if (a.type() != b.type()) {
    out.match = false;
    out.differences.push_back(path + ": type mismatch");
    return;
  }
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      const std::string sub = path + "/" + it.key();
      if (!b.contains(it.key())) {
        if (it.key() != "timing") {
          out.match = false;
          out.differences.push_back(sub + ": missing on the right");
        }
        continue;
      }
      diff_json(it.value(), b.at(it.key()), sub, rel_tol, out);
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!a.contains(it.key()) && it.key() != "timing") {
        out.match = false;
        out.differences.push_back(path + "/" + it.key() + ": missing on the left");
      }
    }
    return;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      out.match = false;
      out.differences.push_back(path + ": array length");
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff_json(a[i], b[i], path + "/" + std::to_string(i), rel_tol, out);
    }
    return;
  }
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>();
    const double y = b.get<double>();
    const double denom = std::max({std::abs(x), std::abs(y), 1e-300});
    if (std::abs(x - y) > rel_tol * denom && x != y) {
      out.match = false;
      out.differences.push_back(path + ": " + std::to_string(x) + " vs " + std::to_string(y));
    }
    return;
  }
  if (a != b) {
    out.match = false;
    out.differences.push_back(path + ": value mismatch");
  }
}

}  // namespace

CompareResult compare_reports(const nlohmann::json& a, const nlohmann::json& b, double rel_tol) {
  if (!a.contains("versions") || !b.contains("versions") ||
      a.at("versions") != b.at("versions")) {
    throw std::runtime_error("compare: report schema/version mismatch");
  }
  CompareResult out;
  diff_json(a, b, "", rel_tol, out);
  return out;
}

std::string report_without_timing(const nlohmann::json& report) {
  nlohmann::json clean = report;
  clean.erase("timing");
  return clean.dump(2) + "\n";
}

}  // namespace elastheat
