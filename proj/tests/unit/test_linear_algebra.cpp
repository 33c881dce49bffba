#include <doctest.h>

#include <cmath>

#include "elastheat/dense.hpp"
#include "elastheat/rng.hpp"
#include "elastheat/solvers.hpp"
#include "elastheat/sparse.hpp"

using namespace elastheat;

namespace {

SparseSym random_spd(int n, Rng& rng) {
  // Diagonally dominant band matrix.
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 4.0 + rng.uniform()});
    if (i + 1 < n) {
      const double v = -rng.uniform();
      t.push_back({i, i + 1, v});
      t.push_back({i + 1, i, v});
    }
  }
  return SparseSym::from_triplets(n, std::move(t));
}

// 1D Laplacian stencil with known eigenvalues 2 - 2 cos(k pi / (n+1)).
SparseSym laplace_1d(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i + 1 < n) {
      t.push_back({i, i + 1, -1.0});
      t.push_back({i + 1, i, -1.0});
    }
  }
  return SparseSym::from_triplets(n, std::move(t));
}

}  // namespace

TEST_CASE("sparse builder symmetrizes and sorts") {
  // (A_raw + A_raw^T)/2 semantics: symmetric scatter pairs keep their value.
  std::vector<Triplet> t = {{0, 1, 0.5}, {1, 0, 0.5}, {0, 0, 2.0}, {1, 1, 2.0}, {0, 1, 0.25},
                            {1, 0, 0.25}};
  const SparseSym m = SparseSym::from_triplets(2, std::move(t));
  CHECK(m.value_symmetric(0.0));
  std::vector<double> x = {1.0, 2.0};
  const auto y = m.multiply(x);
  CHECK(y[0] == doctest::Approx(2.0 + 0.75 * 2.0));
  CHECK(y[1] == doctest::Approx(0.75 + 4.0));
}

TEST_CASE("dense symmetric eigendecomposition against analytic spectrum") {
  const int n = 24;
  const DenseMat a = DenseMat::from_sparse(laplace_1d(n));
  const DenseSpectral s = sym_eig(a);
  for (int k = 0; k < n; ++k) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1) * M_PI / (n + 1));
    CHECK(s.eigenvalues[k] == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(spectral_residual(s, a, nullptr) <= 1e-10 * 4.0);
}

TEST_CASE("pencil eigendecomposition reconstructs and M-orthonormalizes") {
  Rng rng(7);
  const int n = 30;
  const SparseSym a_s = random_spd(n, rng);
  const SparseSym m_s = random_spd(n, rng);
  const DenseMat a = DenseMat::from_sparse(a_s);
  const DenseMat m = DenseMat::from_sparse(m_s);
  const DenseSpectral s = sym_eig_pencil(a, m);
  CHECK(spectral_residual(s, a, &m) <= 1e-10 * a_s.inf_norm());
  // V' M V = I.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) v += s.vectors(r, i) * m(r, c) * s.vectors(c, j);
      }
      CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("cg: identity system converges in one iteration") {
  const SparseSym eye = SparseSym::identity(5);
  std::vector<double> b = {1, 2, 3, 4, 5};
  const CgResult r = cg_solve(eye, b);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  for (int i = 0; i < 5; ++i) CHECK(r.x[i] == doctest::Approx(b[i]));
}

TEST_CASE("cg matches dense cholesky and decreases the energy monotonically") {
  Rng rng(3);
  const int n = 40;
  const SparseSym a = random_spd(n, rng);
  std::vector<double> b(n);
  for (double& v : b) v = rng.normal();
  CgOptions opts;
  opts.tol = 1e-12;
  const CgResult r = cg_solve(a, b, opts);
  CHECK(r.converged);
  CHECK(r.energy_monotone);

  DenseMat ad = DenseMat::from_sparse(a);
  const DenseMat l = cholesky(std::move(ad));
  std::vector<double> x = b;
  cholesky_solve(l, x);
  for (int i = 0; i < n; ++i) CHECK(r.x[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("cg rejects an indefinite matrix") {
  std::vector<Triplet> t = {{0, 0, 1.0}, {1, 1, -1.0}};
  const SparseSym a = SparseSym::from_triplets(2, std::move(t));
  std::vector<double> b = {0.0, 1.0};
  CHECK_THROWS(cg_solve(a, b));
}

TEST_CASE("deflated cg keeps iterates orthogonal to the modes") {
  // Singular system: A = laplacian with Neumann-like kernel of constants.
  const int n = 20;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    if (i > 0) {
      t.push_back({i, i - 1, -1.0});
      d += 1.0;
    }
    if (i + 1 < n) {
      t.push_back({i, i + 1, -1.0});
      d += 1.0;
    }
    t.push_back({i, i, d});
  }
  const SparseSym a = SparseSym::from_triplets(n, std::move(t));
  const SparseSym m = SparseSym::identity(n);
  Deflation deflation;
  deflation.m = &m;
  deflation.modes = {std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n)))};

  Rng rng(11);
  std::vector<double> b(n);
  for (double& v : b) v = rng.normal();
  // Make b compatible.
  double mean = 0.0;
  for (double v : b) mean += v / n;
  for (double& v : b) v -= mean;

  CgOptions opts;
  opts.tol = 1e-12;
  const CgResult r = cg_solve(a, b, opts, nullptr, &deflation);
  CHECK(r.converged);
  double c = 0.0;
  for (double v : r.x) c += v / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(c) <= 1e-12);
}

TEST_CASE("smallest_eigs finds the bottom of the 1D laplacian spectrum") {
  const int n = 40;
  const SparseSym a = laplace_1d(n);
  const SparseSym m = SparseSym::identity(n);
  const EigResult r = smallest_eigs(a, m, 3);
  CHECK(r.converged);
  for (int k = 0; k < 3; ++k) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1) * M_PI / (n + 1));
    CHECK(r.eigenvalues[k] == doctest::Approx(exact).epsilon(1e-7));
  }
}

TEST_CASE("largest_eig on an identity pencil") {
  const int n = 25;
  const SparseSym a = laplace_1d(n);
  const SparseSym m = SparseSym::identity(n);
  const double top = largest_eig(a, m);
  const double exact = 2.0 - 2.0 * std::cos(n * M_PI / (n + 1));
  CHECK(top == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("expm oracle: identity at t = 0 and the semigroup property") {
  Rng rng(5);
  const int n = 24;
  const SparseSym a = random_spd(n, rng);
  const SparseSym m = random_spd(n, rng);
  std::vector<std::vector<double>> b(2, std::vector<double>(n));
  for (auto& col : b) {
    for (double& v : col) v = rng.normal();
  }
  const ExpmOracle oracle(a, m);
  const auto at0 = oracle.apply(0.0, b);
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < n; ++i) CHECK(at0[c][i] == doctest::Approx(b[c][i]).epsilon(1e-11));
  }
  // exp(-(s+t)) = exp(-s) exp(-t).
  const auto full = oracle.apply(0.7, b);
  const auto half = oracle.apply(0.35, oracle.apply(0.35, b));
  for (int c = 0; c < 2; ++c) {
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(full[c][i]));
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(full[c][i] - half[c][i]) <= 1e-11 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("expm oracle rejects dimensions above the cap") {
  const SparseSym a = laplace_1d(10);
  const SparseSym m = SparseSym::identity(10);
  CHECK_THROWS(ExpmOracle(a, m, nullptr, 5));
}
