#pragma once

#include <span>
#include <vector>

#include "kerrlearn/gram.hpp"

namespace kerr {

// A composite device: one independently driven mode per subsystem.
struct ProductKernelSpec {
  std::vector<PhysicalParams> subsystems;

  explicit ProductKernelSpec(std::vector<PhysicalParams> subsystems_)
      : subsystems(std::move(subsystems_)) {
    if (subsystems.size() < 2)
      throw std::invalid_argument(
          "ProductKernelSpec: need at least two subsystems");
  }
};

// One data point per subsystem, aligned with ProductKernelSpec::subsystems.
using CompositePoint = std::vector<DataPoint>;

// Entrywise (Hadamard) product of the factor Grams.  Schur's theorem keeps
// the product positive semidefinite, so validation stays strict.
GramMatrix hadamard_kernel(std::span<const GramMatrix> factors);

// Spectral radius of the product kernel against the product of the factor
// radii: rho(K1 o K2 o ...) <= rho(K1) rho(K2) ...
struct SpectralRadiusCheck {
  double rho_product;
  std::vector<double> rho_factors;
  double bound;    // product of factor radii
  double margin;   // bound - rho_product
  bool holds;      // rho_product <= bound + 1e-10
};

SpectralRadiusCheck spectral_radius_bound_check(
    std::span<const GramMatrix> factors);

// Simulates the composite system on the full tensor-product Fock space
// (subsystems never couple, so the joint kernel must factorize) and returns
// the largest absolute deviation between the joint-simulation kernel matrix
// and the Hadamard product of the per-subsystem kernel matrices.
// Guard rails: per-subsystem dim <= 20, at most 6 data points, joint
// dimension <= 4096 (ResourceLimit beyond).
double product_simulation_crosscheck(const ProductKernelSpec& spec,
                                     std::span<const CompositePoint> points);

}  // namespace kerr
