#include "elastheat/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace elastheat {

DenseMat DenseMat::from_sparse(const SparseSym& s) {
  DenseMat d(s.size(), s.size());
  for (int i = 0; i < s.size(); ++i) {
    for (int k = s.row_ptr()[i]; k < s.row_ptr()[i + 1]; ++k) {
      d(i, s.cols()[k]) = s.values()[k];
    }
  }
  return d;
}

namespace {

double hypot2(double a, double b) { return std::hypot(a, b); }

// Householder reduction of a real symmetric matrix to tridiagonal form with
// accumulated transformation (EISPACK tred2 lineage).
void tred2(DenseMat& z, std::vector<double>& d, std::vector<double>& e) {
  const int n = z.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);

  for (int i = n - 1; i > 0; --i) {
    const int l = i - 1;
    double h = 0.0;
    double scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }

  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
        for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
  }
}

// Implicit-shift QL on the tridiagonal (d, e) with eigenvector accumulation.
void tql2(std::vector<double>& d, std::vector<double>& e, DenseMat& z) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("sym_eig: QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = hypot2(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = hypot2(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  // Sort ascending, reordering columns.
  for (int i = 0; i < n - 1; ++i) {
    int k = i;
    double p = d[i];
    for (int j = i + 1; j < n; ++j) {
      if (d[j] < p) {
        k = j;
        p = d[j];
      }
    }
    if (k != i) {
      std::swap(d[k], d[i]);
      for (int j = 0; j < n; ++j) std::swap(z(j, i), z(j, k));
    }
  }
}

}  // namespace

DenseSpectral sym_eig(DenseMat a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: square matrix required");
  DenseSpectral s;
  std::vector<double> e;
  tred2(a, s.eigenvalues, e);
  tql2(s.eigenvalues, e, a);
  s.vectors = std::move(a);
  s.tag = PencilTag::single;
  return s;
}

DenseMat cholesky(DenseMat a) {
  const int n = a.rows();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  // Zero the strict upper triangle.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) a(i, j) = 0.0;
  }
  return a;
}

void cholesky_solve(const DenseMat& l, std::span<double> x) {
  const int n = l.rows();
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
}

DenseSpectral sym_eig_pencil(DenseMat a, DenseMat m) {
  const int n = a.rows();
  const DenseMat l = cholesky(std::move(m));

  // C = L^{-1} A L^{-T}, built by forward solves on both sides.
  DenseMat c = std::move(a);
  // Left: solve L X = C column-wise (operate on rows of C per column of L).
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double s = c(i, j);
      for (int k = 0; k < i; ++k) s -= l(i, k) * c(k, j);
      c(i, j) = s / l(i, i);
    }
  }
  // Right: C <- C L^{-T}  (same solve applied to rows).
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = c(i, j);
      for (int k = 0; k < j; ++k) s -= l(j, k) * c(i, k);
      c(i, j) = s / l(j, j);
    }
  }
  // Symmetrize away the round-off skew before QL.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = c(j, i) = v;
    }
  }

  DenseSpectral s = sym_eig(std::move(c));
  // Back-transform eigenvectors: V = L^{-T} W.
  for (int j = 0; j < s.vectors.cols(); ++j) {
    for (int i = n - 1; i >= 0; --i) {
      double v = s.vectors(i, j);
      for (int k = i + 1; k < n; ++k) v -= l(k, i) * s.vectors(k, j);
      s.vectors(i, j) = v / l(i, i);
    }
  }
  s.tag = PencilTag::pencil;
  return s;
}

double spectral_residual(const DenseSpectral& s, const DenseMat& a, const DenseMat* m) {
  const int n = a.rows();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double av = 0.0;
      double mv = 0.0;
      for (int k = 0; k < n; ++k) {
        av += a(i, k) * s.vectors(k, j);
        if (m != nullptr) mv += (*m)(i, k) * s.vectors(k, j);
      }
      if (m == nullptr) mv = s.vectors(i, j);
      const double r = av - s.eigenvalues[j] * mv;
      r2 += r * r;
    }
    worst = std::max(worst, std::sqrt(r2));
  }
  return worst;
}

}  // namespace elastheat
