#pragma once

#include <functional>
#include <vector>

namespace stfem {

using ScalarFunction = std::function<double(double)>;

// Coefficients against the orthonormal basis phi_k(x) = sqrt(2) sin(k pi x),
// k = 1..K, so the L2 norm is the euclidean norm of the coefficients.
struct SineSeries {
  std::vector<double> coefficients;

  int modes() const { return static_cast<int>(coefficients.size()); }
};

// Analytic eigenmodel of the 1D heat solution operator on (0,1): mode k is
// damped by sigma_k = exp(-k^2 pi^2 T). Eigenvalues below 1e-300 are stored
// as exact zeros, matching the sigma/rho -> 0 limit of the Tikhonov filter.
struct SpectralModel {
  int modes = 0;
  double horizon = 0.0;
  std::vector<double> sigma;

  SpectralModel(int k, double horizon_time);

  // forward evolution over the full horizon
  SineSeries evolve(const SineSeries& initial) const;
  // mode-wise Tikhonov filter sigma_k / (sigma_k^2 + rho)
  SineSeries tikhonov(const SineSeries& observed, double rho) const;
};

inline constexpr int kDefaultModes = 50;
inline constexpr int kQuadraturePanels = 200;

// Coefficients by composite 5-point Gauss quadrature on uniform panels.
SineSeries sine_coefficients(const ScalarFunction& f, int modes = kDefaultModes);

SineSeries heat_evolve(const SineSeries& series, double t);

SineSeries tikhonov_solution(const SineSeries& observed, double rho, double horizon);

double evaluate_series(const SineSeries& series, double x);
std::vector<double> evaluate_series(const SineSeries& series, const std::vector<double>& points);

double l2_norm(const SineSeries& series);
double l2_error(const SineSeries& a, const SineSeries& b);
double l2_error(const ScalarFunction& a, const ScalarFunction& b);
double l2_error(const SineSeries& a, const ScalarFunction& b);

// Composite 5-point Gauss-Legendre integral over [lo, hi].
double integrate(const ScalarFunction& f, double lo, double hi,
                 int panels = kQuadraturePanels);

}  // namespace stfem
