#pragma once

#include <vector>

namespace dmkp {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule; cached, so the returned reference stays valid.
/// Throws ConfigError for n < 1.
const GaussRule& gauss_legendre(int n);

/// Maps the rule onto [a, b] and applies it to f.
template <class F>
double integrate(F&& f, double a, double b, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

}  // namespace dmkp
