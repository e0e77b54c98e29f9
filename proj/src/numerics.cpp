#include "gisfa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "gisfa/errors.hpp"

namespace gisfa {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  if (n == 0) return {1.0, 0.0};
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: order must be >= 1");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

namespace {

int pick_panel_order(int n_total, int panel_order) {
  for (int order : {panel_order, 16, 8, 4}) {
    if (order > 0 && order <= n_total && n_total % order == 0) return order;
  }
  return n_total;
}

}  // namespace

Rule composite_gauss_legendre(double a, double b, int n_total, int panel_order) {
  if (n_total < 1) throw DomainError("composite_gauss_legendre: need at least one node");
  const int order = pick_panel_order(n_total, panel_order);
  const int panels = n_total / order;
  const Rule base = gauss_legendre(order);
  Rule rule;
  rule.nodes.reserve(n_total);
  rule.weights.reserve(n_total);
  const double width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + width * k;
    const double mid = lo + 0.5 * width;
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

Rule sinh_mapped_rule(double lo, double hi, double scale, int n_total, int panel_order) {
  if (!(scale > 0.0)) throw DomainError("sinh_mapped_rule: scale must be positive");
  Rule x = composite_gauss_legendre(std::asinh(lo / scale), std::asinh(hi / scale), n_total,
                                    panel_order);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x.nodes[i];
    x.weights[i] *= scale * std::cosh(xi);
    x.nodes[i] = scale * std::sinh(xi);
  }
  return x;
}

UniformCubic::UniformCubic(double x0, double step, std::vector<double> values)
    : x0_(x0), step_(step), values_(std::move(values)) {
  if (values_.size() < 4) throw DomainError("UniformCubic: need at least 4 samples");
  if (!(step_ > 0.0)) throw DomainError("UniformCubic: step must be positive");
}

double UniformCubic::operator()(double x) const {
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  const double s = (x - x0_) / step_;
  auto i = static_cast<std::ptrdiff_t>(std::floor(s));
  i = std::clamp<std::ptrdiff_t>(i - 1, 0, n - 4);
  const double u = s - static_cast<double>(i);  // position relative to node i, in [0,3]
  const double* y = values_.data() + i;
  const double l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
  const double l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
  const double l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
  const double l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
  return l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
}

double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  const std::size_t intervals = n - 1;
  if (intervals == 1) return 0.5 * h * (f[0] + f[1]);
  auto simpson_even = [&](std::size_t last) {
    double s = f[0] + f[last];
    for (std::size_t i = 1; i < last; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
  };
  if (intervals % 2 == 0) return simpson_even(n - 1);
  if (intervals == 3) return 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
  const std::size_t m = n - 4;
  return simpson_even(m) + 3.0 * h / 8.0 * (f[m] + 3.0 * f[m + 1] + 3.0 * f[m + 2] + f[m + 3]);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace gisfa
