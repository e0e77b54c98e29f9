#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gisfa {

/// Quadrature rule: sum_i weights[i] * f(nodes[i]) approximates the integral.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b] with n_total nodes split into panels of
/// `panel_order` nodes. Falls back to smaller panels when n_total is not a
/// multiple of panel_order. a == b yields zero weights.
Rule composite_gauss_legendre(double a, double b, int n_total, int panel_order = 16);

/// Nodes q = scale * sinh(x), x on a composite Gauss-Legendre grid spanning
/// [asinh(lo/scale), asinh(hi/scale)]. Weights carry the Jacobian. Clusters
/// nodes near q = 0 where the bound-state momentum distribution peaks.
Rule sinh_mapped_rule(double lo, double hi, double scale, int n_total, int panel_order = 16);

/// Four-point Lagrange (cubic) interpolation on a uniform grid.
class UniformCubic {
 public:
  UniformCubic() = default;
  UniformCubic(double x0, double step, std::vector<double> values);

  double operator()(double x) const;
  double x0() const { return x0_; }
  double step() const { return step_; }
  std::span<const double> values() const { return values_; }

 private:
  double x0_ = 0.0;
  double step_ = 1.0;
  std::vector<double> values_;
};

/// Composite Simpson on uniformly spaced samples; an odd interval count is
/// closed with the 3/8 rule on the last three intervals.
double simpson(std::span<const double> samples, double step);

/// Trapezoid on an arbitrary grid.
double trapezoid(std::span<const double> x, std::span<const double> y);

}  // namespace gisfa
