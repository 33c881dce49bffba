#ifndef ELASTHEAT_TENSOR_HPP
#define ELASTHEAT_TENSOR_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "elastheat/geometry.hpp"
#include "elastheat/rng.hpp"

namespace elastheat {

/// 2x2 matrix, used for gradients and kernel values. Entry (i, j) of a
/// gradient is du^i/dx_j.
struct Mat2 {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }
  double frobenius() const;
  Mat2 transposed() const;
  Mat2 sym() const;  // (m + m^T)/2
};

/// Fourth-order coefficient array a^{alpha beta}_{ij}, n = 2.
struct Tensor4 {
  // [alpha][beta][i][j]
  double a[2][2][2][2] = {};

  double& operator()(int al, int be, int i, int j) { return a[al][be][i][j]; }
  double operator()(int al, int be, int i, int j) const { return a[al][be][i][j]; }

  /// max deviation from a^{ab}_{ij} = a^{ba}_{ji} = a^{ib}_{aj}.
  double symmetry_residual() const;
};

/// Contraction a^{ab}_{ij} (gu)^j_b (gv)^i_a.
double bform_density(const Tensor4& a, const Mat2& gu, const Mat2& gv);

/// Coefficient field with declared ellipticity constants. Fields are either
/// point-evaluable maps or piecewise constant per mesh cell; the latter makes
/// one-point quadrature exact.
class ElasticityTensor {
 public:
  using EvalFn = std::function<Tensor4(Vec2)>;

  ElasticityTensor(EvalFn evaluate, double kappa1, double kappa2, std::string description,
                   bool pointwise_constant = false);
  static ElasticityTensor per_cell(std::vector<Tensor4> cells, double kappa1, double kappa2,
                                   std::string description);

  int dim() const { return 2; }
  double kappa1() const { return kappa1_; }
  double kappa2() const { return kappa2_; }
  /// True when a single quadrature point per cell integrates exactly.
  bool piecewise_constant() const { return pointwise_constant_ || !cells_.empty(); }
  const std::string& description() const { return description_; }
  bool lambda_zero_warning() const { return lambda_zero_warning_; }
  void set_lambda_zero_warning(bool w) { lambda_zero_warning_ = w; }
  const std::optional<std::pair<double, double>>& lame_params() const { return lame_params_; }
  void set_lame_params(double mu, double lambda) { lame_params_ = {mu, lambda}; }

  /// Evaluate at x; cell-keyed tensors require the triangle index.
  Tensor4 at(Vec2 x, int triangle = -1) const;

  /// Worst eq-symmetry residual over a probe set of points.
  double probe_symmetry(const std::vector<Vec2>& points) const;

  /// Checks (1/4) k1 |s|^2 <= a xi xi <= (1/4) k2 |s|^2 with s = xi + xi^T
  /// over random matrix probes; returns the worst signed margin (negative
  /// means a violation).
  double probe_ellipticity(const std::vector<Vec2>& points, int probes_per_point,
                           Rng& rng) const;

 private:
  EvalFn evaluate_;
  std::vector<Tensor4> cells_;
  double kappa1_;
  double kappa2_;
  std::string description_;
  bool pointwise_constant_ = false;
  bool lambda_zero_warning_ = false;
  std::optional<std::pair<double, double>> lame_params_;
};

/// Homogeneous isotropic tensor: lambda d_{ia} d_{jb} + mu (d_{ij} d_{ab} +
/// d_{ib} d_{ja}); kappa1 = 2 mu, kappa2 = 2 mu + n lambda. Requires mu > 0;
/// lambda = 0 is accepted with a warning flag. Only n = 2 is evaluated.
ElasticityTensor make_lame_tensor(double mu, double lambda, int n = 2);
Tensor4 lame_tensor_entries(double mu, double lambda);

/// Tensor-spec text format: either "lame <mu> <lambda>" or
/// "cells <count>" followed by one line per cell: triangle index then the 16
/// entries a^{ab}_{ij} in (a,b,i,j) row-major order.
ElasticityTensor read_tensor_text(const std::string& text);
std::string write_tensor_text(const ElasticityTensor& tensor, int cell_count);

}  // namespace elastheat

#endif
