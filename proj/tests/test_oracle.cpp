#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "stfem/oracle.hpp"

using namespace stfem;

TEST_CASE("sine coefficients recover an orthonormal mode exactly") {
  const SineSeries s =
      sine_coefficients([](double x) { return std::sqrt(2.0) * std::sin(3.0 * M_PI * x); }, 10);
  for (int m = 0; m < 10; ++m) {
    if (m == 2)
      CHECK(s.coefficients[m] == doctest::Approx(1.0).epsilon(1e-13));
    else
      CHECK(std::abs(s.coefficients[m]) <= 1e-12);
  }
}

TEST_CASE("sine coefficients of sin(pi x)") {
  const SineSeries s = sine_coefficients([](double x) { return std::sin(M_PI * x); }, 5);
  CHECK(s.coefficients[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  for (int m = 1; m < 5; ++m) CHECK(std::abs(s.coefficients[m]) <= 1e-12);
}

TEST_CASE("sine coefficients of x(1-x) match the analytic integral") {
  // int_0^1 x(1-x) sin(k pi x) dx = 2 (1 - (-1)^k) / (k pi)^3,
  // so against the orthonormal basis b_k = 2 sqrt(2) (1 - (-1)^k) / (k pi)^3
  const SineSeries s = sine_coefficients([](double x) { return x * (1.0 - x); }, 6);
  for (int k = 1; k <= 6; ++k) {
    const double exact =
        2.0 * std::sqrt(2.0) * (1.0 - std::pow(-1.0, k)) / std::pow(k * M_PI, 3);
    CHECK(s.coefficients[k - 1] == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(s.coefficients[0] == doctest::Approx(0.18244).epsilon(1e-4));
}

TEST_CASE("heat evolution at t = 0 is the identity") {
  SineSeries s;
  s.coefficients = {1.0, -2.0, 0.5};
  const SineSeries out = heat_evolve(s, 0.0);
  CHECK(out.coefficients == s.coefficients);
}

TEST_CASE("mode 1 at T = 1 is damped by exp(-pi^2)") {
  SineSeries s;
  s.coefficients = {1.0};
  const SineSeries out = heat_evolve(s, 1.0);
  CHECK(out.coefficients[0] == doctest::Approx(std::exp(-M_PI * M_PI)).epsilon(1e-14));
  CHECK(out.coefficients[0] == doctest::Approx(5.17231e-5).epsilon(1e-5));
}

TEST_CASE("mode 10 at T = 1 underflows to an exact zero") {
  SineSeries s;
  s.coefficients = std::vector<double>(10, 1.0);
  const SineSeries out = heat_evolve(s, 1.0);
  CHECK(out.coefficients[9] == 0.0);
}

TEST_CASE("spectral model sigma is decreasing with zeros only past the floor") {
  const SpectralModel model(kDefaultModes, 1.0);
  for (int m = 1; m < model.modes; ++m) {
    CHECK(model.sigma[m] <= model.sigma[m - 1]);
    if (model.sigma[m] > 0.0) {
      CHECK(model.sigma[m] < model.sigma[m - 1]);
      CHECK(model.sigma[m] < 1.0);
    }
  }
  CHECK(model.sigma[0] > 0.0);
  CHECK(model.sigma[0] < 1.0);
}

TEST_CASE("tikhonov filter recovers mode 1 up to sigma^2/(sigma^2 + rho)") {
  const double rho = 1e-14;
  const SpectralModel model(10, 1.0);
  SineSeries observed;
  observed.coefficients = std::vector<double>(10, 0.0);
  observed.coefficients[0] = model.sigma[0];  // sigma-scaled mode 1

  const SineSeries rec = model.tikhonov(observed, rho);
  const double sigma_sq = model.sigma[0] * model.sigma[0];
  const double expected = sigma_sq / (sigma_sq + rho);
  CHECK(rec.coefficients[0] == doctest::Approx(expected).epsilon(1e-13));
  CHECK(rec.coefficients[0] == doctest::Approx(0.9999963).epsilon(1e-6));
}

TEST_CASE("tikhonov filter factor obeys the 1/(2 sqrt(rho)) bound") {
  for (double rho : {1e-2, 1e-6, 1e-10, 1e-14}) {
    const SpectralModel model(kDefaultModes, 1.0);
    for (double s : model.sigma) {
      if (s == 0.0) continue;
      CHECK(s / (s * s + rho) <= 1.0 / (2.0 * std::sqrt(rho)) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("underflowed noise mode contributes exactly zero") {
  const SpectralModel model(10, 1.0);
  SineSeries observed;
  observed.coefficients = std::vector<double>(10, 0.0);
  observed.coefficients[9] = 0.5;  // large noise on mode 10
  const SineSeries rec = model.tikhonov(observed, 1e-14);
  CHECK(rec.coefficients[9] == 0.0);
}

TEST_CASE("evolution after inversion recovers observed data mode-wise") {
  const double rho = 1e-6;
  const SpectralModel model(8, 0.25);
  SineSeries data;
  data.coefficients = {0.3, -1.0, 0.7, 0.0, 2.0, -0.2, 0.9, 0.1};
  const SineSeries observed = model.evolve(data);
  const SineSeries back = model.evolve(model.tikhonov(observed, rho));
  for (int m = 0; m < 8; ++m) {
    const double s = model.sigma[m];
    const double factor = (s == 0.0) ? 0.0 : s * s / (s * s + rho);
    CHECK(back.coefficients[m] ==
          doctest::Approx(factor * observed.coefficients[m]).epsilon(1e-14));
  }
}

TEST_CASE("series evaluation of sin(pi x) at the midpoint") {
  const SineSeries s = sine_coefficients([](double x) { return std::sin(M_PI * x); }, 20);
  CHECK(evaluate_series(s, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evaluate_series(s, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("l2 error of a function against itself vanishes") {
  const auto f = [](double x) { return std::exp(x) * std::sin(2.0 * x); };
  CHECK(l2_error(f, f) == 0.0);
}

TEST_CASE("l2 error of sin(pi x) against zero is 1/sqrt(2)") {
  const auto f = [](double x) { return std::sin(M_PI * x); };
  const auto zero = [](double) { return 0.0; };
  CHECK(l2_error(f, zero) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));

  const SineSeries s = sine_coefficients(f, 10);
  CHECK(l2_norm(s) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("parseval and quadrature error paths agree") {
  const auto f = [](double x) { return x * (1.0 - x); };
  const auto g = [](double x) { return std::sin(2.0 * M_PI * x) * 0.3; };
  const SineSeries sf = sine_coefficients(f, 40);
  const SineSeries sg = sine_coefficients(g, 40);
  CHECK(l2_error(sf, sg) == doctest::Approx(l2_error(f, g)).epsilon(1e-6));
}

TEST_CASE("tikhonov error is non-increasing as rho decreases on exact data") {
  const SpectralModel model(kDefaultModes, 1.0);
  const SineSeries exact = sine_coefficients([](double x) { return std::sin(M_PI * x); });
  const SineSeries observed = model.evolve(exact);

  double previous = std::numeric_limits<double>::max();
  for (int j = 4; j <= 14; ++j) {
    const double rho = std::pow(10.0, -j);
    const double err = l2_error(model.tikhonov(observed, rho), exact);
    CHECK(err <= previous * (1.0 + 1e-12));
    previous = err;
  }
}

TEST_CASE("results are identical for 20 and 50 modes on the manufactured data") {
  const double damp = std::exp(-M_PI * M_PI);
  const auto observed = [damp](double x) {
    return damp * std::sin(M_PI * x) + 1e-3 * std::sin(10.0 * M_PI * x);
  };
  const SineSeries s20 = sine_coefficients(observed, 20);
  const SineSeries s50 = sine_coefficients(observed, 50);
  const SineSeries r20 = tikhonov_solution(s20, 1e-14, 1.0);
  const SineSeries r50 = tikhonov_solution(s50, 1e-14, 1.0);
  for (int m = 0; m < 20; ++m)
    CHECK(std::abs(r20.coefficients[m] - r50.coefficients[m]) <= 1e-14);
  for (int m = 20; m < 50; ++m) CHECK(std::abs(r50.coefficients[m]) <= 1e-14);
}
