#include "kerrlearn/dataset.hpp"

namespace kerr {

std::vector<DataPoint> sample_dataset(std::uint64_t seed, int n_points,
                                      const DataRanges& ranges) {
  if (n_points < 1)
    throw std::invalid_argument("sample_dataset: n_points must be >= 1");

  UniformSampler sampler(seed);
  std::vector<DataPoint> points;
  points.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double omega_drive = sampler.next(ranges.omega_drive_max);
    const double omega_laser = sampler.next(ranges.omega_laser_max);
    const double time = sampler.next(ranges.time_max);
    points.emplace_back(omega_drive, omega_laser, time);
  }
  return points;
}

}  // namespace kerr
