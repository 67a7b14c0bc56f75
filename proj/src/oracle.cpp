#include "stfem/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace stfem {

namespace {

constexpr double kGaussNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
constexpr double kGaussWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};

constexpr double kUnderflowFloor = 1e-300;

double damping_factor(int mode, double t) {
  const double exponent = -static_cast<double>(mode) * mode * M_PI * M_PI * t;
  const double s = std::exp(exponent);
  return (s < kUnderflowFloor) ? 0.0 : s;
}

}  // namespace

double integrate(const ScalarFunction& f, double lo, double hi, int panels) {
  const double width = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    double local = 0.0;
    for (int g = 0; g < 5; ++g) local += kGaussWeights[g] * f(mid + 0.5 * width * kGaussNodes[g]);
    sum += 0.5 * width * local;
  }
  return sum;
}

SpectralModel::SpectralModel(int k, double horizon_time) : modes(k), horizon(horizon_time) {
  if (k <= 0) throw std::invalid_argument("SpectralModel: mode count must be positive");
  if (!(horizon_time > 0.0)) throw std::invalid_argument("SpectralModel: horizon must be positive");
  sigma.resize(k);
  for (int m = 1; m <= k; ++m) sigma[m - 1] = damping_factor(m, horizon_time);
}

SineSeries SpectralModel::evolve(const SineSeries& initial) const {
  return heat_evolve(initial, horizon);
}

SineSeries SpectralModel::tikhonov(const SineSeries& observed, double rho) const {
  if (!(rho > 0.0)) throw std::invalid_argument("SpectralModel::tikhonov: rho must be positive");
  SineSeries out;
  out.coefficients.resize(observed.coefficients.size(), 0.0);
  for (int m = 0; m < observed.modes(); ++m) {
    const double s = (m < modes) ? sigma[m] : damping_factor(m + 1, horizon);
    out.coefficients[m] = (s == 0.0) ? 0.0 : s * observed.coefficients[m] / (s * s + rho);
  }
  return out;
}

SineSeries sine_coefficients(const ScalarFunction& f, int modes) {
  SineSeries series;
  series.coefficients.resize(modes);
  for (int m = 1; m <= modes; ++m) {
    series.coefficients[m - 1] = integrate(
        [&](double x) { return f(x) * std::sqrt(2.0) * std::sin(m * M_PI * x); }, 0.0, 1.0);
  }
  return series;
}

SineSeries heat_evolve(const SineSeries& series, double t) {
  if (t < 0.0) throw std::invalid_argument("heat_evolve: negative time");
  SineSeries out = series;
  for (int m = 0; m < out.modes(); ++m) out.coefficients[m] *= damping_factor(m + 1, t);
  return out;
}

SineSeries tikhonov_solution(const SineSeries& observed, double rho, double horizon) {
  return SpectralModel(std::max(observed.modes(), 1), horizon).tikhonov(observed, rho);
}

double evaluate_series(const SineSeries& series, double x) {
  double value = 0.0;
  for (int m = 0; m < series.modes(); ++m)
    value += series.coefficients[m] * std::sqrt(2.0) * std::sin((m + 1) * M_PI * x);
  return value;
}

std::vector<double> evaluate_series(const SineSeries& series, const std::vector<double>& points) {
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = evaluate_series(series, points[i]);
  return values;
}

double l2_norm(const SineSeries& series) {
  double s = 0.0;
  for (double c : series.coefficients) s += c * c;
  return std::sqrt(s);
}

double l2_error(const SineSeries& a, const SineSeries& b) {
  const int m = std::max(a.modes(), b.modes());
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    const double ca = (k < a.modes()) ? a.coefficients[k] : 0.0;
    const double cb = (k < b.modes()) ? b.coefficients[k] : 0.0;
    s += (ca - cb) * (ca - cb);
  }
  return std::sqrt(s);
}

double l2_error(const ScalarFunction& a, const ScalarFunction& b) {
  const double s = integrate(
      [&](double x) {
        const double d = a(x) - b(x);
        return d * d;
      },
      0.0, 1.0);
  return std::sqrt(std::max(0.0, s));
}

double l2_error(const SineSeries& a, const ScalarFunction& b) {
  return l2_error([&](double x) { return evaluate_series(a, x); }, b);
}

}  // namespace stfem
