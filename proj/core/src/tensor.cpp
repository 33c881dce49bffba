#include "elastheat/tensor.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace elastheat {

double Mat2::frobenius() const {
  return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] +
                   m[1][1] * m[1][1]);
}

Mat2 Mat2::transposed() const {
  Mat2 t;
  t.m[0][0] = m[0][0];
  t.m[0][1] = m[1][0];
  t.m[1][0] = m[0][1];
  t.m[1][1] = m[1][1];
  return t;
}

Mat2 Mat2::sym() const {
  Mat2 s;
  s.m[0][0] = m[0][0];
  s.m[1][1] = m[1][1];
  s.m[0][1] = s.m[1][0] = 0.5 * (m[0][1] + m[1][0]);
  return s;
}

double Tensor4::symmetry_residual() const {
  double worst = 0.0;
  for (int al = 0; al < 2; ++al) {
    for (int be = 0; be < 2; ++be) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const double v = a[al][be][i][j];
          worst = std::max(worst, std::abs(v - a[be][al][j][i]));
          worst = std::max(worst, std::abs(v - a[i][be][al][j]));
        }
      }
    }
  }
  return worst;
}

double bform_density(const Tensor4& a, const Mat2& gu, const Mat2& gv) {
  double s = 0.0;
  for (int al = 0; al < 2; ++al) {
    for (int be = 0; be < 2; ++be) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          s += a(al, be, i, j) * gu(j, be) * gv(i, al);
        }
      }
    }
  }
  return s;
}

ElasticityTensor::ElasticityTensor(EvalFn evaluate, double kappa1, double kappa2,
                                   std::string description, bool pointwise_constant)
    : evaluate_(std::move(evaluate)),
      kappa1_(kappa1),
      kappa2_(kappa2),
      description_(std::move(description)),
      pointwise_constant_(pointwise_constant) {
  if (kappa1 <= 0.0 || kappa2 < kappa1) {
    throw std::invalid_argument("ElasticityTensor: need 0 < kappa1 <= kappa2");
  }
}

ElasticityTensor ElasticityTensor::per_cell(std::vector<Tensor4> cells, double kappa1,
                                            double kappa2, std::string description) {
  ElasticityTensor t(nullptr, kappa1, kappa2, std::move(description));
  t.cells_ = std::move(cells);
  return t;
}

Tensor4 ElasticityTensor::at(Vec2 x, int triangle) const {
  if (!cells_.empty()) {
    if (triangle < 0 || triangle >= static_cast<int>(cells_.size())) {
      throw std::invalid_argument("ElasticityTensor: cell-keyed tensor needs a valid triangle");
    }
    return cells_[triangle];
  }
  return evaluate_(x);
}

double ElasticityTensor::probe_symmetry(const std::vector<Vec2>& points) const {
  double worst = 0.0;
  if (!cells_.empty()) {
    for (const Tensor4& c : cells_) worst = std::max(worst, c.symmetry_residual());
    return worst;
  }
  for (const Vec2& p : points) worst = std::max(worst, at(p).symmetry_residual());
  return worst;
}

double ElasticityTensor::probe_ellipticity(const std::vector<Vec2>& points, int probes_per_point,
                                           Rng& rng) const {
  double worst = std::numeric_limits<double>::infinity();
  auto run = [&](const Tensor4& a) {
    for (int p = 0; p < probes_per_point; ++p) {
      Mat2 xi;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) xi(i, j) = rng.uniform(-1.0, 1.0);
      }
      Mat2 s = xi;
      s(0, 1) += xi(1, 0);
      s(1, 0) += xi(0, 1);
      s(0, 0) *= 2.0;
      s(1, 1) *= 2.0;
      const double s2 = s.frobenius() * s.frobenius();
      const double q = bform_density(a, xi, xi);
      const double low = q - 0.25 * kappa1_ * s2;
      const double high = 0.25 * kappa2_ * s2 - q;
      worst = std::min(worst, std::min(low, high) / std::max(s2, 1e-300));
    }
  };
  if (!cells_.empty()) {
    for (const Tensor4& c : cells_) run(c);
  } else {
    for (const Vec2& p : points) run(at(p));
  }
  return worst;
}

Tensor4 lame_tensor_entries(double mu, double lambda) {
  Tensor4 t;
  for (int al = 0; al < 2; ++al) {
    for (int be = 0; be < 2; ++be) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const double d_ia = i == al ? 1.0 : 0.0;
          const double d_jb = j == be ? 1.0 : 0.0;
          const double d_ij = i == j ? 1.0 : 0.0;
          const double d_ab = al == be ? 1.0 : 0.0;
          const double d_ib = i == be ? 1.0 : 0.0;
          const double d_ja = j == al ? 1.0 : 0.0;
          t(al, be, i, j) = lambda * d_ia * d_jb + mu * (d_ij * d_ab + d_ib * d_ja);
        }
      }
    }
  }
  return t;
}

ElasticityTensor make_lame_tensor(double mu, double lambda, int n) {
  if (mu <= 0.0) throw std::invalid_argument("make_lame_tensor: ellipticity needs mu > 0");
  if (lambda < 0.0) throw std::invalid_argument("make_lame_tensor: lambda must be >= 0");
  if (n != 2) throw std::invalid_argument("make_lame_tensor: only n = 2 is evaluated");
  const Tensor4 entries = lame_tensor_entries(mu, lambda);
  std::ostringstream desc;
  desc.precision(17);
  desc << "lame mu=" << mu << " lambda=" << lambda;
  ElasticityTensor t([entries](Vec2) { return entries; }, 2.0 * mu, 2.0 * mu + n * lambda,
                     desc.str(), /*pointwise_constant=*/true);
  t.set_lambda_zero_warning(lambda == 0.0);
  t.set_lame_params(mu, lambda);
  return t;
}

ElasticityTensor read_tensor_text(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  if (!(in >> kind)) throw std::runtime_error("tensor spec: empty input");
  if (kind == "lame") {
    double mu = 0.0, lambda = 0.0;
    if (!(in >> mu >> lambda)) throw std::runtime_error("tensor spec: lame needs mu lambda");
    return make_lame_tensor(mu, lambda);
  }
  if (kind == "cells") {
    int count = 0;
    if (!(in >> count) || count <= 0) throw std::runtime_error("tensor spec: bad cell count");
    std::vector<Tensor4> cells(count);
    double kappa1 = 0.0, kappa2 = 0.0;
    std::string tag;
    if (!(in >> tag >> kappa1 >> kappa2) || tag != "kappa") {
      throw std::runtime_error("tensor spec: cells format needs 'kappa k1 k2'");
    }
    for (int line = 0; line < count; ++line) {
      int tri = 0;
      if (!(in >> tri) || tri < 0 || tri >= count) {
        throw std::runtime_error("tensor spec: bad triangle index");
      }
      for (int al = 0; al < 2; ++al) {
        for (int be = 0; be < 2; ++be) {
          for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
              if (!(in >> cells[tri](al, be, i, j))) {
                throw std::runtime_error("tensor spec: truncated cell entries");
              }
            }
          }
        }
      }
    }
    ElasticityTensor t = ElasticityTensor::per_cell(std::move(cells), kappa1, kappa2,
                                                    "per-cell tensor");
    if (t.probe_symmetry({}) > 1e-12) {
      throw std::runtime_error("tensor spec: cell entries violate the index symmetry");
    }
    return t;
  }
  throw std::runtime_error("tensor spec: unknown kind '" + kind + "'");
}

std::string write_tensor_text(const ElasticityTensor& tensor, int cell_count) {
  std::ostringstream out;
  out.precision(17);
  if (tensor.lame_params()) {
    out << "lame " << tensor.lame_params()->first << ' ' << tensor.lame_params()->second << '\n';
    return out.str();
  }
  out << "cells " << cell_count << "\nkappa " << tensor.kappa1() << ' ' << tensor.kappa2()
      << '\n';
  for (int t = 0; t < cell_count; ++t) {
    out << t;
    const Tensor4 a = tensor.at({0.0, 0.0}, t);
    for (int al = 0; al < 2; ++al) {
      for (int be = 0; be < 2; ++be) {
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) out << ' ' << a(al, be, i, j);
        }
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace elastheat
