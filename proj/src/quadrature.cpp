#include "kerrlearn/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace kerr {

namespace {

constexpr int kMaxNodes = 1 << 17;

std::unique_ptr<GaussLegendre> build_rule(int n) {
  auto rule = std::make_unique<GaussLegendre>();
  rule->nodes.resize(n);
  rule->weights.resize(n);

  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess for the i-th root of P_n.
    double z = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
    double pp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(z) and P_{n-1}(z) by the three-term recurrence.
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / double(j);
      }
      pp = double(n) * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NonConvergence("gauss_legendre_table: node iteration stalled");
    rule->nodes[i] = -z;
    rule->nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule->weights[i] = w;
    rule->weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre_table(int n) {
  if (n < 1)
    throw std::invalid_argument("gauss_legendre_table: need n >= 1");
  if (n > kMaxNodes)
    throw ResourceLimit("gauss_legendre_table: node count exceeds cap");

  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = build_rule(n);
  return *slot;
}

}  // namespace kerr
