#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kerrlearn/dynamics.hpp"
#include "kerrlearn/training.hpp"

namespace kerr {

// Deterministic uniform sampler: mt19937_64 with doubles built from the top
// 53 bits, (x >> 11) * 2^-53, so streams are reproducible bit-for-bit across
// platforms for a given seed.
class UniformSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double next() {
    return double(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, hi).
  double next(double hi) { return next() * hi; }

 private:
  std::mt19937_64 engine_;
};

// n_points inputs with coordinates drawn uniformly over the ranges, in the
// fixed per-point order (omega_drive, omega_laser, time).
std::vector<DataPoint> sample_dataset(std::uint64_t seed, int n_points,
                                      const DataRanges& ranges);

}  // namespace kerr
