#ifndef ELASTHEAT_DENSE_HPP
#define ELASTHEAT_DENSE_HPP

#include <span>
#include <string>
#include <vector>

#include "elastheat/sparse.hpp"

namespace elastheat {

/// Row-major dense matrix.
class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  static DenseMat from_sparse(const SparseSym& s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

enum class PencilTag { single, pencil };

/// Eigen-decomposition of a symmetric matrix A (tag single) or of the
/// symmetric-definite pencil (A, M) (tag pencil). Eigenvalues ascend;
/// column j of `vectors` is the eigenvector of eigenvalues[j], orthonormal
/// in the Euclidean (single) or M (pencil) inner product.
struct DenseSpectral {
  std::vector<double> eigenvalues;
  DenseMat vectors;
  PencilTag tag = PencilTag::single;
};

/// Householder tridiagonalization followed by implicit-shift QL.
DenseSpectral sym_eig(DenseMat a);

/// Pencil (A, M) with M positive definite, via Cholesky reduction.
DenseSpectral sym_eig_pencil(DenseMat a, DenseMat m);

/// In-place lower Cholesky; throws if the matrix is not positive definite.
DenseMat cholesky(DenseMat a);
void cholesky_solve(const DenseMat& l, std::span<double> x);

/// Worst reconstruction residual max_j |A v_j - lambda_j (M) v_j|_2, for
/// validating a decomposition against its source pair.
double spectral_residual(const DenseSpectral& s, const DenseMat& a, const DenseMat* m);

}  // namespace elastheat

#endif
