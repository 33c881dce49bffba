#ifndef ELASTHEAT_ESTIMATES_HPP
#define ELASTHEAT_ESTIMATES_HPP

#include <map>
#include <string>
#include <vector>

#include "elastheat/kernel.hpp"

namespace elastheat {

/// Machine-checkable verdict for one quantitative estimate: the asserted
/// inequality/scaling holds on every sample with the fitted constants.
struct EstimateReport {
  std::string id;
  std::map<std::string, double> constants;
  bool pass = false;
  std::string samples;
  std::string worst;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
SlopeFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct EstimateOptions {
  std::vector<double> r_ladder;                    // radii, increasing
  std::vector<double> p_values = {1.0, 1.5};       // < (n+2)/n = 2
  std::vector<double> p_grad_values = {1.0, 1.2};  // < (n+2)/(n+1) = 4/3
  double lp_slope_tol = 0.3;
  double grad_slope_tol = 0.5;
  double levelset_slope_tol = 0.75;
  double tail_slope_tol = 0.5;
  double pole_stability_factor = 2.0;
};

/// Scaling checks of the kernel estimates over the r-ladder, by midpoint
/// (space) x trapezoid (time) quadrature of the sampled field:
///   lp:            |K|_{L_p(Q+(Y,r))}      ~ r^{-n + (n+2)/p}
///   grad-lp:       |DK|_{L_p(Q+(Y,r))}     ~ r^{-n - 1 + (n+2)/p}
///   level-set:     |{|K| > s}|             <= C s^{-(n+2)/n}
///   grad-level-set:|{|DK| > s}|            <= C s^{-(n+2)/(n+1)}
///   pole:          sup |K| |X - Y|_P^n over |X - Y|_P < d_y/2
///   holder:        local exponent fit of |K(X') - K(X)| vs |X' - X|_P
///   l4-tail:       |K|_{L_{2(n+2)/n}(Q \ Q+(Y,r))} ~ r^{-n/2}
///   energy-tail:   energy norm of K over Q \ Q+(Y,r) ~ r^{-n/2}
std::vector<EstimateReport> estimate_suite(const KernelField& field, const DiscreteOperator& op,
                                           double d_y, const EstimateOptions& opts);

struct GaussianOptions {
  double c_ceiling = 1e3;
  double diag_slope_tol = 0.2;  // on-diagonal slope vs -n/2
};

/// Feasibility program for |K(x,y,t)| <= C (sqrt(t) ^ diam)^{-n}
/// exp(-theta |x-y|^2 / t): with log C fixed at the ceiling the bound is
/// linear in theta, so the maximal feasible theta is exact; pass needs
/// theta > 0 with zero violations.
EstimateReport gaussian_fit(const KernelField& field, const DiscreteOperator& op,
                            const std::vector<ProbePoint>& samples, double diam,
                            const GaussianOptions& opts);

/// On-diagonal decay |K(y,y,t)| ~ t^{-n/2} over a time ladder.
EstimateReport on_diagonal_slope(const KernelField& field, const DiscreteOperator& op,
                                 const std::vector<double>& t_list, double diam,
                                 double slope_tol);

/// Flat-tail regime t > diam^2: |K| stays below C diam^{-n}.
EstimateReport gaussian_flat_tail(const KernelField& field, const DiscreteOperator& op,
                                  const std::vector<ProbePoint>& tail_samples, double diam,
                                  double c_ceiling);

struct HolderProbeOptions {
  int ladder_depth = 4;
  int pair_samples = 200;
  std::uint64_t seed = 0x5eedULL;
};

/// Interior oscillation-decay fit on a static solution: slope of
/// log max-oscillation against log pair-distance inside B(x0, r/2),
/// normalized by the L2 average over B(x0, r).
EstimateReport holder_probe_interior(const Mesh& mesh, std::span<const double> u, Vec2 x0,
                                     double r, const HolderProbeOptions& opts);

/// Boundary energy-decay fit: slope of log int_{B(x0,rho)} |Du|^2 against
/// log rho across a rho-ladder; the exponent estimates n - 2 + 2 mu0.
EstimateReport holder_probe_boundary(const Mesh& mesh, std::span<const double> u, Vec2 x0,
                                     double r, const HolderProbeOptions& opts);

}  // namespace elastheat

#endif
