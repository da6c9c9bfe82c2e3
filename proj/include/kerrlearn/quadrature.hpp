#pragma once

#include <vector>

#include "kerrlearn/errors.hpp"

namespace kerr {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // positive, sum to 2
};

// Returns the cached n-point rule (thread safe).  Nodes come from Newton
// iteration on P_n; n is capped at 1 << 17 (ResourceLimit beyond that).
const GaussLegendre& gauss_legendre_table(int n);

// Integral of f over [a, b] with the given rule.  F: double -> double or
// double -> Complex.
template <typename F>
auto gauss_legendre_integrate(const F& f, double a, double b,
                              const GaussLegendre& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto acc = half * rule.weights[0] * f(mid + half * rule.nodes[0]);
  for (std::size_t i = 1; i < rule.nodes.size(); ++i)
    acc += half * rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc;
}

}  // namespace kerr
