#include "elastheat/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace elastheat {

SparseSym SparseSym::from_triplets(int n, std::vector<Triplet> triplets) {
  // Builds (A_raw + A_raw^T)/2 where A_raw is the plain duplicate-summing
  // triplet matrix: off-diagonal contributions land halved in the canonical
  // upper triangle and are mirrored on output, so (i,j) and (j,i) are the
  // same double bit for bit.
  std::map<std::pair<int, int>, double> upper;
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw std::invalid_argument("SparseSym: triplet index out of range");
    }
    const int i = std::min(t.row, t.col);
    const int j = std::max(t.row, t.col);
    upper[{i, j}] += (i == j) ? t.value : 0.5 * t.value;
  }

  std::vector<std::vector<std::pair<int, double>>> rows(n);
  for (const auto& [key, v] : upper) {
    const auto [i, j] = key;
    if (i != j && v == 0.0) continue;
    rows[i].push_back({j, v});
    if (i != j) rows[j].push_back({i, v});
  }

  SparseSym m;
  m.n_ = n;
  m.row_ptr_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    m.row_ptr_[i + 1] = m.row_ptr_[i] + static_cast<int>(rows[i].size());
  }
  m.cols_.reserve(m.row_ptr_[n]);
  m.values_.reserve(m.row_ptr_[n]);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, v] : rows[i]) {
      m.cols_.push_back(j);
      m.values_.push_back(v);
    }
  }
  return m;
}

SparseSym SparseSym::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, std::move(t));
}

void SparseSym::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      s += values_[k] * x[cols_[k]];
    }
    y[i] = s;
  }
}

std::vector<double> SparseSym::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseSym::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[k] == i) d[i] = values_[k];
    }
  }
  return d;
}

double SparseSym::inf_norm() const {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

double SparseSym::sum_entries() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

std::vector<double> SparseSym::row_sums() const {
  std::vector<double> s(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s[i] += values_[k];
  }
  return s;
}

bool SparseSym::value_symmetric(double tol) const {
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const int j = cols_[k];
      // Binary search for (j, i).
      const int lo = row_ptr_[j];
      const int hi = row_ptr_[j + 1];
      const auto it = std::lower_bound(cols_.begin() + lo, cols_.begin() + hi, i);
      if (it == cols_.begin() + hi || *it != i) return false;
      const double vji = values_[it - cols_.begin()];
      if (std::abs(vji - values_[k]) > tol) return false;
    }
  }
  return true;
}

std::string SparseSym::to_coordinate_text() const {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out << i << ' ' << cols_[k] << ' ' << values_[k] << '\n';
    }
  }
  return out.str();
}

}  // namespace elastheat
