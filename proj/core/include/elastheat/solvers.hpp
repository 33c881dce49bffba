#ifndef ELASTHEAT_SOLVERS_HPP
#define ELASTHEAT_SOLVERS_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "elastheat/dense.hpp"
#include "elastheat/sparse.hpp"

namespace elastheat {

/// Homogeneous essential constraints as a 0/1 mask over dofs (1 = pinned to
/// zero). Masked dofs are treated as eliminated: operators act as identity
/// there and vectors carry zeros.
struct DofMask {
  std::vector<unsigned char> pinned;

  static DofMask none(int n) { return {std::vector<unsigned char>(n, 0)}; }
  static DofMask from_indices(int n, const std::vector<int>& pinned_dofs);

  bool any() const;
  void apply(std::span<double> v) const;
  int free_count() const;
};

/// Deflation subspace: modes orthonormal in the M inner product. Projection
/// removes the M-components of a vector along every mode.
struct Deflation {
  const SparseSym* m = nullptr;
  std::vector<std::vector<double>> modes;

  void project(std::span<double> v) const;
};

struct CgOptions {
  double tol = 1e-10;        // relative residual target
  int max_iterations = 10000;
  bool jacobi = true;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  bool energy_monotone = true;  // quadratic form decreased every iteration
};

/// Preconditioned CG for A x = b on the masked/deflated subspace. Throws on
/// detected indefiniteness (p'Ap <= 0); returns the best iterate with
/// converged=false when max_iterations runs out.
CgResult cg_solve(const SparseSym& a, std::span<const double> b, const CgOptions& opts = {},
                  const DofMask* mask = nullptr, const Deflation* deflation = nullptr,
                  std::span<const double> x0 = {});

struct EigOptions {
  double shift_scale = 1e-5;    // c = shift_scale * (trace A / trace M)
  double tol = 1e-9;            // residual target relative to |A|_inf
  int max_iterations = 300;
  double cg_tol = 1e-12;
};

struct EigResult {
  std::vector<double> eigenvalues;          // ascending
  std::vector<std::vector<double>> vectors; // M-orthonormal
  std::vector<double> residuals;            // |A v - lambda M v|_2 per pair
  bool converged = false;
};

/// k smallest eigenvalues of the pencil (A, M) on the masked/deflated
/// subspace, by shift-inverted block subspace iteration with full
/// M-reorthogonalization and Rayleigh-Ritz extraction.
EigResult smallest_eigs(const SparseSym& a, const SparseSym& m, int k, const EigOptions& opts = {},
                        const DofMask* mask = nullptr, const Deflation* deflation = nullptr);

/// Largest eigenvalue of the pencil (A, B) (both positive semi-definite, B
/// definite on the subspace) by power iteration on B^{-1} A.
double largest_eig(const SparseSym& a, const SparseSym& b, const DofMask* mask = nullptr,
                   const Deflation* deflation = nullptr, double tol = 1e-10, int maxit = 500);

/// Dense semigroup oracle: columns of exp(-t M^{-1} A) B on the free dofs of
/// the pencil (A, M), exact up to the eigensolve. The decomposition is done
/// once at construction; dimension is capped because the cost is O(n^3).
class ExpmOracle {
 public:
  static constexpr int kDefaultCap = 600;

  ExpmOracle(const SparseSym& a, const SparseSym& m, const DofMask* mask = nullptr,
             int dimension_cap = kDefaultCap);

  /// B columns are full-size dof vectors; masked dofs stay zero.
  std::vector<std::vector<double>> apply(double t,
                                         const std::vector<std::vector<double>>& b) const;

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

 private:
  int n_full_ = 0;
  std::vector<int> free_;           // free dof -> full dof
  std::vector<double> eigenvalues_; // pencil eigenvalues, ascending
  DenseMat vectors_;                // M-orthonormal eigenvectors (free dofs)
  DenseMat m_free_;                 // M restricted to free dofs
};

/// One-call form of the oracle (decomposes every call).
std::vector<std::vector<double>> dense_expm_action(const SparseSym& a, const SparseSym& m,
                                                   double t,
                                                   const std::vector<std::vector<double>>& b,
                                                   const DofMask* mask = nullptr,
                                                   int dimension_cap = ExpmOracle::kDefaultCap);

// Small vector helpers shared by the solver and time-stepping code.
double dot_vec(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double m_inner(const SparseSym& m, std::span<const double> a, std::span<const double> b);
double m_norm(const SparseSym& m, std::span<const double> a);

}  // namespace elastheat

#endif
