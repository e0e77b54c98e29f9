#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gisfa/errors.hpp"
#include "gisfa/numerics.hpp"

using namespace gisfa;

TEST_CASE("gauss_legendre is exact to degree 2n-1") {
  for (int n : {1, 2, 5, 8, 16, 32}) {
    const Rule r = gauss_legendre(n);
    REQUIRE(r.size() == static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), DomainError);
}

TEST_CASE("composite rules integrate smooth functions") {
  const Rule r = composite_gauss_legendre(0.0, 2.0, 64);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::exp(r.nodes[i]);
  CHECK(s == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
  CHECK(composite_gauss_legendre(0.0, 1.0, 24).size() == 24);

  // int_{-8}^{8} dq / (1 + q^2)^2
  const Rule m = sinh_mapped_rule(-8.0, 8.0, 1.0, 128);
  double t = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) t += m.weights[i] / std::pow(1.0 + m.nodes[i] * m.nodes[i], 2);
  const double exact = 8.0 / 65.0 + std::atan(8.0);
  CHECK(t == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("uniform cubic interpolation reproduces cubics") {
  std::vector<double> y;
  auto f = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x; };
  for (int i = 0; i < 20; ++i) y.push_back(f(0.5 + 0.25 * i));
  const UniformCubic c(0.5, 0.25, y);
  for (double x : {0.5, 0.61, 1.3, 3.2, 5.25}) CHECK(c(x) == doctest::Approx(f(x)).epsilon(1e-13));
  CHECK_THROWS_AS(UniformCubic(0.0, 1.0, {1.0, 2.0}), DomainError);
}

TEST_CASE("simpson is exact for cubics with even and odd interval counts") {
  for (int n : {7, 8, 11}) {
    const double h = 1.0 / (n - 1);
    std::vector<double> y;
    for (int i = 0; i < n; ++i) {
      const double x = i * h;
      y.push_back(x * x * x - x);
    }
    CHECK(simpson(y, h) == doctest::Approx(0.25 - 0.5).epsilon(1e-14));
  }
}

TEST_CASE("trapezoid is exact for linear data on uneven nodes") {
  const std::vector<double> x = {0.0, 0.1, 0.5, 0.7, 2.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v + 1.0);
  CHECK(trapezoid(x, y) == doctest::Approx(8.0));
}
