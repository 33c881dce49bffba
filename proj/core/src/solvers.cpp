#include "elastheat/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace elastheat {

double dot_vec(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double m_inner(const SparseSym& m, std::span<const double> a, std::span<const double> b) {
  std::vector<double> mb(b.size());
  m.multiply(b, mb);
  return dot_vec(a, mb);
}

double m_norm(const SparseSym& m, std::span<const double> a) {
  return std::sqrt(std::max(0.0, m_inner(m, a, a)));
}

DofMask DofMask::from_indices(int n, const std::vector<int>& pinned_dofs) {
  DofMask mask{std::vector<unsigned char>(n, 0)};
  for (int d : pinned_dofs) mask.pinned[d] = 1;
  return mask;
}

bool DofMask::any() const {
  for (unsigned char p : pinned) {
    if (p) return true;
  }
  return false;
}

void DofMask::apply(std::span<double> v) const {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (pinned[i]) v[i] = 0.0;
  }
}

int DofMask::free_count() const {
  int c = 0;
  for (unsigned char p : pinned) c += (p == 0);
  return c;
}

void Deflation::project(std::span<double> v) const {
  if (modes.empty()) return;
  std::vector<double> mv(v.size());
  m->multiply(v, mv);
  for (const auto& mode : modes) {
    const double c = dot_vec(mode, mv);
    axpy(-c, mode, v);
  }
}

namespace {

void constrain(std::span<double> v, const DofMask* mask, const Deflation* deflation) {
  if (mask != nullptr) mask->apply(v);
  if (deflation != nullptr) deflation->project(v);
}

}  // namespace

CgResult cg_solve(const SparseSym& a, std::span<const double> b, const CgOptions& opts,
                  const DofMask* mask, const Deflation* deflation, std::span<const double> x0) {
  const int n = a.size();
  CgResult res;
  res.x.assign(b.begin(), b.end());
  std::vector<double>& x = res.x;
  std::vector<double> bb(b.begin(), b.end());
  constrain(bb, mask, deflation);

  if (x0.empty()) {
    std::fill(x.begin(), x.end(), 0.0);
  } else {
    x.assign(x0.begin(), x0.end());
    constrain(x, mask, deflation);
  }

  std::vector<double> precond(n, 1.0);
  if (opts.jacobi) {
    const std::vector<double> diag = a.diagonal();
    for (int i = 0; i < n; ++i) precond[i] = diag[i] > 0.0 ? 1.0 / diag[i] : 1.0;
  }

  std::vector<double> r(n), z(n), p(n), ap(n), ax(n);
  a.multiply(x, ax);
  constrain(ax, mask, deflation);
  for (int i = 0; i < n; ++i) r[i] = bb[i] - ax[i];
  constrain(r, mask, deflation);

  const double bnorm = std::sqrt(dot_vec(bb, bb));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }

  auto energy = [&](void) {
    // f(x) = x'Ax/2 - b'x; a decreasing f is CG's A-norm error monotonicity.
    return 0.5 * dot_vec(x, ax) - dot_vec(bb, x);
  };

  for (int i = 0; i < n; ++i) z[i] = precond[i] * r[i];
  constrain(z, mask, deflation);
  p = z;
  double rz = dot_vec(r, z);
  double f_prev = energy();

  for (int it = 1; it <= opts.max_iterations; ++it) {
    a.multiply(p, ap);
    constrain(ap, mask, deflation);
    const double pap = dot_vec(p, ap);
    if (pap <= 0.0) {
      if (std::sqrt(dot_vec(r, r)) <= opts.tol * bnorm) break;
      throw std::runtime_error("cg_solve: matrix not positive definite on the subspace");
    }
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(alpha, ap, ax);
    axpy(-alpha, ap, r);
    constrain(x, mask, deflation);
    constrain(r, mask, deflation);
    res.iterations = it;

    const double f_now = energy();
    if (f_now > f_prev + 1e-14 * (1.0 + std::abs(f_prev))) res.energy_monotone = false;
    f_prev = f_now;

    const double rnorm = std::sqrt(dot_vec(r, r));
    res.relative_residual = rnorm / bnorm;
    if (rnorm <= opts.tol * bnorm) {
      res.converged = true;
      break;
    }
    for (int i = 0; i < n; ++i) z[i] = precond[i] * r[i];
    constrain(z, mask, deflation);
    const double rz_new = dot_vec(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (res.relative_residual <= opts.tol) res.converged = true;
  return res;
}

namespace {

// M-orthonormalize the columns of q (modified Gram-Schmidt, two passes).
void m_orthonormalize(std::vector<std::vector<double>>& q, const SparseSym& m) {
  for (std::size_t j = 0; j < q.size(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const double c = m_inner(m, q[i], q[j]);
        axpy(-c, q[i], q[j]);
      }
    }
    const double nrm = m_norm(m, q[j]);
    if (nrm <= 1e-300) throw std::runtime_error("eig: rank-deficient subspace block");
    for (double& v : q[j]) v /= nrm;
  }
}

}  // namespace

EigResult smallest_eigs(const SparseSym& a, const SparseSym& m, int k, const EigOptions& opts,
                        const DofMask* mask, const Deflation* deflation) {
  const int n = a.size();
  if (k <= 0 || k > n) throw std::invalid_argument("smallest_eigs: bad k");
  int free_dim = mask != nullptr ? mask->free_count() : n;
  if (deflation != nullptr) free_dim -= static_cast<int>(deflation->modes.size());
  if (k > free_dim) {
    throw std::invalid_argument("smallest_eigs: k exceeds the free subspace dimension");
  }
  const int block = std::min(free_dim, k + std::min(k, 4) + 2);

  // Shifted operator A + cM is definite on the subspace even when A has a
  // nontrivial kernel there.
  const std::vector<double> da = a.diagonal();
  const std::vector<double> dm = m.diagonal();
  double ta = 0.0;
  double tm = 0.0;
  for (int i = 0; i < n; ++i) {
    if (mask != nullptr && mask->pinned[i]) continue;
    ta += std::abs(da[i]);
    tm += std::abs(dm[i]);
  }
  const double c = std::max(1e-300, opts.shift_scale * ta / std::max(tm, 1e-300));

  std::vector<Triplet> shifted_t;
  for (int i = 0; i < n; ++i) {
    for (int kk = a.row_ptr()[i]; kk < a.row_ptr()[i + 1]; ++kk) {
      shifted_t.push_back({i, a.cols()[kk], a.values()[kk]});
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int kk = m.row_ptr()[i]; kk < m.row_ptr()[i + 1]; ++kk) {
      shifted_t.push_back({i, m.cols()[kk], c * m.values()[kk]});
    }
  }
  const SparseSym shifted = SparseSym::from_triplets(n, std::move(shifted_t));

  const double a_scale = std::max(a.inf_norm(), 1e-300);

  // Deterministic pseudo-random start block.
  std::vector<std::vector<double>> q(block, std::vector<double>(n));
  std::uint64_t s = 0x2545f4914f6cdd1dull;
  for (int j = 0; j < block; ++j) {
    for (int i = 0; i < n; ++i) {
      s ^= s << 13;
      s ^= s >> 7;
      s ^= s << 17;
      q[j][i] = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
    }
    constrain(q[j], mask, deflation);
  }
  m_orthonormalize(q, m);

  EigResult out;
  CgOptions cg_opts;
  cg_opts.tol = opts.cg_tol;
  double current_residual = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> warm = q;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    // Inexact inverse iteration: the inner solves only need to stay ahead
    // of the outer residual until the last sweeps.
    cg_opts.tol = std::max(opts.cg_tol,
                           std::min(1e-6, 1e-3 * current_residual / a_scale));
    // Inverse step: q_j <- (A + cM)^{-1} M q_j.
    for (int j = 0; j < block; ++j) {
      std::vector<double> rhs = m.multiply(q[j]);
      constrain(rhs, mask, deflation);
      CgResult sol = cg_solve(shifted, rhs, cg_opts, mask, deflation, warm[j]);
      q[j] = sol.x;
      warm[j] = q[j];
    }
    m_orthonormalize(q, m);

    // Rayleigh-Ritz on the block.
    DenseMat qaq(block, block);
    DenseMat qmq(block, block);
    std::vector<std::vector<double>> aq(block);
    for (int j = 0; j < block; ++j) {
      aq[j] = a.multiply(q[j]);
      constrain(aq[j], mask, deflation);
    }
    for (int i = 0; i < block; ++i) {
      for (int j = 0; j < block; ++j) {
        qaq(i, j) = dot_vec(q[i], aq[j]);
        qmq(i, j) = m_inner(m, q[i], q[j]);
      }
    }
    DenseSpectral ritz = sym_eig_pencil(qaq, qmq);

    // Rotate the block to the Ritz basis.
    std::vector<std::vector<double>> rotated(block, std::vector<double>(n, 0.0));
    for (int j = 0; j < block; ++j) {
      for (int i = 0; i < block; ++i) {
        axpy(ritz.vectors(i, j), q[i], rotated[j]);
      }
    }
    q = rotated;

    // Residuals for the k wanted pairs.
    out.eigenvalues.assign(ritz.eigenvalues.begin(), ritz.eigenvalues.begin() + k);
    out.vectors.assign(q.begin(), q.begin() + k);
    out.residuals.assign(k, 0.0);
    bool done = true;
    current_residual = 0.0;
    for (int j = 0; j < k; ++j) {
      std::vector<double> r = a.multiply(q[j]);
      constrain(r, mask, deflation);
      const std::vector<double> mv = m.multiply(q[j]);
      for (int i = 0; i < n; ++i) r[i] -= ritz.eigenvalues[j] * mv[i];
      constrain(r, mask, deflation);
      out.residuals[j] = std::sqrt(dot_vec(r, r));
      current_residual = std::max(current_residual, out.residuals[j]);
      if (out.residuals[j] > opts.tol * a_scale) done = false;
    }
    if (done && iter >= 1) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double largest_eig(const SparseSym& a, const SparseSym& b, const DofMask* mask,
                   const Deflation* deflation, double tol, int maxit) {
  const int n = a.size();
  std::vector<double> x(n);
  std::uint64_t s = 0x9e3779b97f4a7c15ull;
  for (int i = 0; i < n; ++i) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    x[i] = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
  }
  constrain(x, mask, deflation);
  const double bn = m_norm(b, x);
  if (bn == 0.0) throw std::runtime_error("largest_eig: start vector annihilated");
  for (double& v : x) v /= bn;

  CgOptions cg_opts;
  cg_opts.tol = 1e-12;
  double lambda = 0.0;
  std::vector<double> warm = x;
  for (int it = 0; it < maxit; ++it) {
    std::vector<double> ax = a.multiply(x);
    constrain(ax, mask, deflation);
    CgResult sol = cg_solve(b, ax, cg_opts, mask, deflation, warm);
    std::vector<double> y = sol.x;
    warm = y;
    const double yn = m_norm(b, y);
    if (yn == 0.0) break;
    for (double& v : y) v /= yn;
    std::vector<double> ay = a.multiply(y);
    constrain(ay, mask, deflation);
    const double lambda_new = dot_vec(y, ay) / std::max(m_inner(b, y, y), 1e-300);
    const bool settled = std::abs(lambda_new - lambda) <= tol * std::max(1.0, std::abs(lambda_new));
    lambda = lambda_new;
    x = std::move(y);
    if (settled && it >= 3) break;
  }
  return lambda;
}

ExpmOracle::ExpmOracle(const SparseSym& a, const SparseSym& m, const DofMask* mask,
                       int dimension_cap) {
  n_full_ = a.size();
  for (int i = 0; i < n_full_; ++i) {
    if (mask == nullptr || !mask->pinned[i]) free_.push_back(i);
  }
  const int nf = static_cast<int>(free_.size());
  if (nf > dimension_cap) {
    throw std::invalid_argument("ExpmOracle: dimension exceeds the dense oracle cap");
  }
  std::vector<int> full_to_free(n_full_, -1);
  for (int i = 0; i < nf; ++i) full_to_free[free_[i]] = i;

  DenseMat ad(nf, nf);
  m_free_ = DenseMat(nf, nf);
  for (int i = 0; i < n_full_; ++i) {
    if (full_to_free[i] < 0) continue;
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const int j = full_to_free[a.cols()[k]];
      if (j >= 0) ad(full_to_free[i], j) = a.values()[k];
    }
    for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) {
      const int j = full_to_free[m.cols()[k]];
      if (j >= 0) m_free_(full_to_free[i], j) = m.values()[k];
    }
  }
  DenseSpectral s = sym_eig_pencil(std::move(ad), m_free_);
  eigenvalues_ = std::move(s.eigenvalues);
  vectors_ = std::move(s.vectors);
}

std::vector<std::vector<double>> ExpmOracle::apply(
    double t, const std::vector<std::vector<double>>& b) const {
  if (t < 0.0) throw std::invalid_argument("ExpmOracle: negative time");
  const int nf = static_cast<int>(free_.size());
  std::vector<std::vector<double>> out;
  out.reserve(b.size());
  for (const auto& col : b) {
    // Coefficients c = V' M x (M-orthonormal eigenbasis), decay, reassemble.
    std::vector<double> xf(nf);
    for (int i = 0; i < nf; ++i) xf[i] = col[free_[i]];
    std::vector<double> mx(nf, 0.0);
    for (int i = 0; i < nf; ++i) {
      double si = 0.0;
      for (int j = 0; j < nf; ++j) si += m_free_(i, j) * xf[j];
      mx[i] = si;
    }
    std::vector<double> coef(nf, 0.0);
    for (int j = 0; j < nf; ++j) {
      double si = 0.0;
      for (int i = 0; i < nf; ++i) si += vectors_(i, j) * mx[i];
      coef[j] = si * std::exp(-eigenvalues_[j] * t);
    }
    std::vector<double> full(n_full_, 0.0);
    for (int j = 0; j < nf; ++j) {
      if (coef[j] == 0.0) continue;
      for (int i = 0; i < nf; ++i) full[free_[i]] += vectors_(i, j) * coef[j];
    }
    out.push_back(std::move(full));
  }
  return out;
}

std::vector<std::vector<double>> dense_expm_action(const SparseSym& a, const SparseSym& m,
                                                   double t,
                                                   const std::vector<std::vector<double>>& b,
                                                   const DofMask* mask, int dimension_cap) {
  return ExpmOracle(a, m, mask, dimension_cap).apply(t, b);
}

}  // namespace elastheat
