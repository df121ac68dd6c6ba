#include "quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace elwave {

namespace {

// Legendre polynomial P_n and derivative on [-1,1] by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {p0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    // Root of P_n on [-1,1], Newton iteration from the Chebyshev-like guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      std::tie(p, dp) = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    std::tie(p, dp) = legendre_with_derivative(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1]; roots come out in descending order.
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: need n >= 2");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 3;
  const int m = n - 1;
  rule.points.front() = 0.0;
  rule.points.back() = 1.0;
  const double w_end = 2.0 / (m * (m + 1.0));
  rule.weights.front() = 0.5 * w_end;
  rule.weights.back() = 0.5 * w_end;
  // Interior nodes are the roots of P'_{n-1}; Newton on the derivative with
  // the second derivative from the Legendre ODE.
  for (int i = 1; i < n - 1; ++i) {
    double x = std::cos(M_PI * (m - i) / m);  // ascending guess
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_derivative(m, x);
      const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const auto [p, dp] = legendre_with_derivative(m, x);
    (void)dp;
    const double w = 2.0 / (m * (m + 1.0) * p * p);
    rule.points[i] = 0.5 * (x + 1.0);
    rule.weights[i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule2d tensor_rule(const QuadratureRule& rule_x, const QuadratureRule& rule_y) {
  QuadratureRule2d rule;
  rule.points.reserve(rule_x.size() * rule_y.size());
  rule.weights.reserve(rule_x.size() * rule_y.size());
  for (std::size_t j = 0; j < rule_y.size(); ++j) {
    for (std::size_t i = 0; i < rule_x.size(); ++i) {
      rule.points.push_back({rule_x.points[i], rule_y.points[j]});
      rule.weights.push_back(rule_x.weights[i] * rule_y.weights[j]);
    }
  }
  return rule;
}

}  // namespace elwave
