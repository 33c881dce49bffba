#ifndef ELASTHEAT_SPARSE_HPP
#define ELASTHEAT_SPARSE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace elastheat {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Symmetric sparse matrix in CSR form. Both triangles are stored; the
/// builder mirrors canonical upper-triangle sums so that value symmetry is
/// bit-exact, column indices are sorted per row, and off-diagonal exact
/// zeros are dropped.
class SparseSym {
 public:
  SparseSym() = default;

  static SparseSym from_triplets(int n, std::vector<Triplet> triplets);
  static SparseSym identity(int n);

  int size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  std::vector<double> diagonal() const;
  double inf_norm() const;
  double sum_entries() const;

  /// Row sums, used for lumped-mass diagnostics.
  std::vector<double> row_sums() const;

  bool value_symmetric(double tol) const;

  /// Coordinate-format text: one "row col value" line per stored entry.
  std::string to_coordinate_text() const;

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int n_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<double> values_;
};

}  // namespace elastheat

#endif
