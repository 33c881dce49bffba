#include <doctest.h>

#include <cmath>
#include <memory>

#include "elastheat/assemble.hpp"
#include "elastheat/rng.hpp"

using namespace elastheat;

namespace {

std::shared_ptr<const Mesh> make_mesh(const std::vector<BoundaryLabel>& labels, double h,
                                      Vec2 lo = {0, 0}, Vec2 hi = {1, 1}) {
  return std::make_shared<const Mesh>(triangulate(PolygonalDomain::rectangle(lo, hi, labels), h));
}

std::shared_ptr<const ElasticityTensor> lame(double mu, double lambda) {
  return std::make_shared<const ElasticityTensor>(make_lame_tensor(mu, lambda));
}

const std::vector<BoundaryLabel> kAllD = {BoundaryLabel::Dirichlet, BoundaryLabel::Dirichlet,
                                          BoundaryLabel::Dirichlet, BoundaryLabel::Dirichlet};
const std::vector<BoundaryLabel> kAllN = {BoundaryLabel::Neumann, BoundaryLabel::Neumann,
                                          BoundaryLabel::Neumann, BoundaryLabel::Neumann};
const std::vector<BoundaryLabel> kMixed = {BoundaryLabel::Dirichlet, BoundaryLabel::Neumann,
                                           BoundaryLabel::Neumann, BoundaryLabel::Neumann};

// Dense per-triangle quadrature oracle, independent loop structure: builds
// the full dense stiffness with a 3-point edge-midpoint rule and explicit
// density contractions.
DenseMat dense_stiffness_oracle(const Mesh& mesh, const ElasticityTensor& tensor) {
  const int n = 2 * mesh.node_count();
  DenseMat a(n, n);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto g = p1_gradients(mesh, t);
    const auto& tri = mesh.triangles[t];
    const double w = mesh.triangle_area(t) / 3.0;
    for (int e = 0; e < 3; ++e) {
      const Vec2 q = 0.5 * (mesh.nodes[tri[e]] + mesh.nodes[tri[(e + 1) % 3]]);
      const Tensor4 at = tensor.at(q, t);
      for (int na = 0; na < 3; ++na) {
        for (int c = 0; c < 2; ++c) {
          Mat2 gv;
          gv(c, 0) = g[na].x;
          gv(c, 1) = g[na].y;
          for (int nb = 0; nb < 3; ++nb) {
            for (int d = 0; d < 2; ++d) {
              Mat2 gu;
              gu(d, 0) = g[nb].x;
              gu(d, 1) = g[nb].y;
              a(2 * tri[na] + c, 2 * tri[nb] + d) += w * bform_density(at, gu, gv);
            }
          }
        }
      }
    }
  }
  return a;
}

}  // namespace

TEST_CASE("assemble: two-triangle square matches the dense quadrature oracle") {
  const auto mesh = make_mesh(kAllD, 2.0);
  const auto tensor = lame(0.5, 0.0);
  const DiscreteOperator op = assemble(mesh, tensor);
  const DenseMat oracle = dense_stiffness_oracle(*mesh, *tensor);
  const DenseMat got = DenseMat::from_sparse(op.stiffness());
  double worst = 0.0;
  for (int i = 0; i < op.dofs(); ++i) {
    for (int j = 0; j < op.dofs(); ++j) worst = std::max(worst, std::abs(got(i, j) - oracle(i, j)));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("assemble: refined mixed square still matches the oracle") {
  const auto mesh = make_mesh(kMixed, 0.5);
  const auto tensor = lame(1.0, 1.0);
  const DiscreteOperator op = assemble(mesh, tensor);
  const DenseMat oracle = dense_stiffness_oracle(*mesh, *tensor);
  const DenseMat got = DenseMat::from_sparse(op.stiffness());
  double worst = 0.0;
  for (int i = 0; i < op.dofs(); ++i) {
    for (int j = 0; j < op.dofs(); ++j) worst = std::max(worst, std::abs(got(i, j) - oracle(i, j)));
  }
  CHECK(worst <= 1e-13);
  CHECK(op.stiffness().value_symmetric(0.0));
}

TEST_CASE("mass matrix: total sum is n |Omega| and row sums lump areas") {
  const auto mesh = make_mesh(kAllD, 2.0);
  const DiscreteOperator op = assemble(mesh, lame(1, 1));
  CHECK(op.mass().sum_entries() == doctest::Approx(2.0 * 1.0).epsilon(1e-14));
  // Row sums equal the nodal lumped areas (partition of unity).
  const auto sums = op.mass().row_sums();
  double total = 0.0;
  for (double s : sums) {
    CHECK(s > 0.0);
    total += s;
  }
  CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("pure Neumann: rigid modes span the kernel") {
  const auto mesh = make_mesh(kAllN, 0.5);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  REQUIRE(op.pure_neumann());
  REQUIRE(op.rigid->size() == 3);
  const double scale = op.stiffness().inf_norm();
  for (const auto& r : op.rigid->nodal) {
    const auto ar = op.stiffness().multiply(r);
    double worst = 0.0;
    for (double v : ar) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-10 * scale);
  }
  // Kernel dimension is exactly 3: the fourth eigenvalue is positive.
  const EigResult eig = smallest_eigs(op.stiffness(), op.mass(), 4);
  CHECK(std::abs(eig.eigenvalues[0]) <= 1e-10 * scale);
  CHECK(std::abs(eig.eigenvalues[2]) <= 1e-10 * scale);
  CHECK(eig.eigenvalues[3] > 1e-6);
}

TEST_CASE("Dirichlet operator is positive definite on the free dofs") {
  const auto mesh = make_mesh(kAllD, 0.5);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  CHECK_FALSE(op.pure_neumann());
  CHECK(op.mask.any());
  const EigResult eig = smallest_eigs(op.stiffness(), op.mass(), 1, {}, op.mask_ptr(), nullptr);
  CHECK(eig.eigenvalues[0] > 0.0);
}

TEST_CASE("galerkin consistency: v'Au equals the density quadrature") {
  const auto mesh = make_mesh(kMixed, 0.5);
  const auto tensor = lame(1.0, 1.0);
  const DiscreteOperator op = assemble(mesh, tensor);
  Rng rng(31);
  std::vector<double> u(op.dofs()), v(op.dofs());
  for (double& x : u) x = rng.normal();
  for (double& x : v) x = rng.normal();
  const auto au = op.stiffness().multiply(u);
  const double quad_form = dot_vec(v, au);
  double direct = 0.0;
  for (int t = 0; t < mesh->triangle_count(); ++t) {
    const Mat2 gu = p1_gradient(*mesh, t, u);
    const Mat2 gv = p1_gradient(*mesh, t, v);
    direct += mesh->triangle_area(t) * bform_density(tensor->at(mesh->centroid(t), t), gu, gv);
  }
  CHECK(quad_form == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("apply_constraints: homogeneous Dirichlet solve of zero is zero") {
  const auto mesh = make_mesh(kAllD, 0.5);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  std::vector<double> zero(op.dofs(), 0.0);
  const StaticSolveResult res = solve_static(op, zero);
  for (double v : res.u) CHECK(v == 0.0);
}

TEST_CASE("apply_constraints: rigid forcing is flagged and projected away") {
  const auto mesh = make_mesh(kAllN, 0.5);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  // rhs = M r for a rigid mode r: incompatible load.
  const std::vector<double> b = op.mass().multiply(op.rigid->nodal[2]);
  const ConstrainedSystem sys = apply_constraints(op);
  CHECK_FALSE(sys.rhs_compatible(b));
  const StaticSolveResult res = solve_static(op, b, {}, /*project_incompatible=*/true);
  CHECK(res.compatibility_flagged);
  double worst = 0.0;
  for (double v : res.u) worst = std::max(worst, std::abs(v));
  CHECK(worst <= 1e-10);
  CHECK_THROWS(solve_static(op, b, {}, /*project_incompatible=*/false));
}

TEST_CASE("mixed square: cg solution matches the dense factorization oracle") {
  const auto mesh = make_mesh(kMixed, 0.5);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  std::vector<double> f(op.dofs());
  for (int i = 0; i < mesh->node_count(); ++i) {
    f[2 * i] = 1.0;  // constant body force in x
    f[2 * i + 1] = 0.5;
  }
  std::vector<double> b = load_vector(op, f);
  op.mask.apply(b);
  CgOptions cg;
  cg.tol = 1e-12;
  const StaticSolveResult res = solve_static(op, b, cg);

  // Dense oracle: eliminate constrained dofs, factor, solve.
  std::vector<int> free;
  for (int i = 0; i < op.dofs(); ++i) {
    if (!op.mask.pinned[i]) free.push_back(i);
  }
  const int nf = static_cast<int>(free.size());
  DenseMat a(nf, nf);
  const DenseMat full = DenseMat::from_sparse(op.stiffness());
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) a(i, j) = full(free[i], free[j]);
  }
  std::vector<double> bf(nf);
  for (int i = 0; i < nf; ++i) bf[i] = b[free[i]];
  const DenseMat l = cholesky(std::move(a));
  cholesky_solve(l, bf);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < nf; ++i) {
    num += (res.u[free[i]] - bf[i]) * (res.u[free[i]] - bf[i]);
    den += bf[i] * bf[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-10);
}

TEST_CASE("korn report: pure Dirichlet first Korn ratio is below 2") {
  const auto mesh = make_mesh(kAllD, 1.0);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  const KornReport report = estimate_constants(op, 3);
  REQUIRE(report.first_korn_applicable);
  REQUIRE(report.levels.size() == 3);
  for (const KornLevel& l : report.levels) {
    CHECK(l.first_korn_ratio <= 2.0 + 1e-9);
    CHECK(l.first_korn_ratio > 1.0);
    CHECK(l.korn2_constant > 0.0);
    CHECK(l.friedrichs_constant > 0.0);
    CHECK(l.coercivity_rho > 0.0);
  }
}

TEST_CASE("korn report: deflated pure-Neumann coercivity is positive and settles") {
  const auto mesh = make_mesh(kAllN, 1.0);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  const KornReport report = estimate_constants(op, 3);
  CHECK_FALSE(report.first_korn_applicable);
  for (const KornLevel& l : report.levels) CHECK(l.coercivity_rho > 0.0);
  const double a = report.levels[1].coercivity_rho;
  const double b = report.levels[2].coercivity_rho;
  CHECK(std::abs(b - a) / b < 0.1);
  CHECK_THROWS(estimate_constants(op, 1));
}

TEST_CASE("korn ladder converges on the mixed square") {
  const auto mesh = make_mesh(kMixed, 1.0);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  const KornReport report = estimate_constants(op, 3);
  const double d01 = std::abs(report.levels[1].coercivity_rho - report.levels[0].coercivity_rho);
  const double d12 = std::abs(report.levels[2].coercivity_rho - report.levels[1].coercivity_rho);
  CHECK(d12 < d01 + 1e-12);
  CHECK(std::abs(report.levels[2].coercivity_rho - report.levels[1].coercivity_rho) /
            report.levels[2].coercivity_rho <
        0.1);
}

TEST_CASE("matrix coordinate export parses back") {
  const auto mesh = make_mesh(kAllD, 2.0);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 0.0));
  const std::string text = op.stiffness().to_coordinate_text();
  CHECK(text.find(' ') != std::string::npos);
  // Row count: one line per stored entry.
  std::size_t lines = 0;
  for (char c : text) lines += (c == '\n');
  CHECK(lines == op.stiffness().nnz());
}

TEST_CASE("smallest_eigs agrees with the dense pencil decomposition, k = 6") {
  const auto mesh = make_mesh(kMixed, 0.35);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  REQUIRE(op.dofs() <= 600);

  // Dense oracle restricted to the free dofs.
  std::vector<int> free;
  for (int i = 0; i < op.dofs(); ++i) {
    if (!op.mask.pinned[i]) free.push_back(i);
  }
  const int nf = static_cast<int>(free.size());
  DenseMat a(nf, nf), m(nf, nf);
  const DenseMat af = DenseMat::from_sparse(op.stiffness());
  const DenseMat mf = DenseMat::from_sparse(op.mass());
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) {
      a(i, j) = af(free[i], free[j]);
      m(i, j) = mf(free[i], free[j]);
    }
  }
  const DenseSpectral dense = sym_eig_pencil(std::move(a), std::move(m));

  const EigResult sparse = smallest_eigs(op.stiffness(), op.mass(), 6, {}, op.mask_ptr(),
                                         nullptr);
  REQUIRE(sparse.converged);
  for (int k = 0; k < 6; ++k) {
    CHECK(sparse.eigenvalues[k] == doctest::Approx(dense.eigenvalues[k]).epsilon(1e-8));
  }
}

TEST_CASE("expm oracle preserves rigid modes in the pure-traction case") {
  const auto mesh = make_mesh(kAllN, 0.5);
  const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
  const ExpmOracle oracle(op.stiffness(), op.mass(), op.mask_ptr());
  for (const auto& r : op.rigid->nodal) {
    const auto out = oracle.apply(3.7, {r});
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(out[0][i] == doctest::Approx(r[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("discrete coercivity: u'Au controls the gradient Gram on the solve subspace") {
  for (const auto& labels : {kMixed, kAllN}) {
    const auto mesh = make_mesh(labels, 0.35);
    const DiscreteOperator op = assemble(mesh, lame(1.0, 1.0));
    const SparseSym g = gradient_gram(*mesh);
    const EigResult eig = smallest_eigs(op.stiffness(), g, 1, {}, op.mask_ptr(),
                                        op.deflation_ptr());
    CHECK(eig.eigenvalues[0] > 0.0);
  }
}
