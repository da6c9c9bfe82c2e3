// Compares the serial and OpenMP Gram-assembly paths on the same dataset:
// wall time for each, speedup, and a bitwise equality check of the results.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "kerrlearn/dataset.hpp"
#include "kerrlearn/gram.hpp"
#include "kerrlearn/perturbation.hpp"

namespace {

double wall_ms(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  int n_points = 24;
  int dim = 80;
  if (argc > 1) n_points = std::atoi(argv[1]);
  if (argc > 2) dim = std::atoi(argv[2]);
  if (n_points < 2 || dim < 2) {
    std::fprintf(stderr, "usage: bench_gram [n_points>=2] [dim>=2]\n");
    return 2;
  }

  const kerr::DataRanges ranges = kerr::DataRanges::defaults();
  const auto points = kerr::sample_dataset(777, n_points, ranges);
  const kerr::PhysicalParams params(2.0 * M_PI * 1e4, 2.0 * M_PI * 10.0,
                                    kerr::FockSpace(dim));
  const kerr::StateVector vacuum = kerr::StateVector::vacuum(params.space);

  std::printf("gram assembly: n_points=%d dim=%d threads=%d\n", n_points, dim,
              omp_get_max_threads());

  Eigen::MatrixXd serial_values, parallel_values;
  const double t_serial = wall_ms([&] {
    serial_values =
        kerr::assemble_fidelity_gram(points, params, vacuum, nullptr,
                                     /*parallel=*/false)
            .values();
  });
  const double t_parallel = wall_ms([&] {
    parallel_values =
        kerr::assemble_fidelity_gram(points, params, vacuum, nullptr,
                                     /*parallel=*/true)
            .values();
  });

  const bool identical = (serial_values.array() == parallel_values.array()).all();
  std::printf("  serial   %10.2f ms\n", t_serial);
  std::printf("  parallel %10.2f ms  (speedup %.2fx)\n", t_parallel,
              t_serial / t_parallel);
  std::printf("  results bitwise identical: %s\n", identical ? "yes" : "NO");

  // Same comparison for the first-order pair sweep, which dominates the
  // larger experiment runs.
  const auto pert_points = kerr::sample_dataset(778, n_points, ranges);
  const kerr::PhysicalParams pert_params(2.0 * M_PI * 1e4, 2.0 * M_PI * 0.01,
                                         kerr::FockSpace(dim));

  kerr::RelativeErrorReport serial_report, parallel_report;
  const double t_serial_pert = wall_ms([&] {
    serial_report = kerr::relative_error_report(pert_points, pert_params,
                                                nullptr, /*parallel=*/false);
  });
  const double t_parallel_pert = wall_ms([&] {
    parallel_report = kerr::relative_error_report(pert_points, pert_params,
                                                  nullptr, /*parallel=*/true);
  });

  bool reports_match =
      serial_report.records.size() == parallel_report.records.size();
  if (reports_match)
    for (std::size_t i = 0; i < serial_report.records.size(); ++i)
      reports_match = reports_match &&
                      serial_report.records[i].k_pert ==
                          parallel_report.records[i].k_pert &&
                      serial_report.records[i].k_exact ==
                          parallel_report.records[i].k_exact;

  std::printf("first-order pair sweep: %zu pairs\n",
              serial_report.records.size());
  std::printf("  serial   %10.2f ms\n", t_serial_pert);
  std::printf("  parallel %10.2f ms  (speedup %.2fx)\n", t_parallel_pert,
              t_serial_pert / t_parallel_pert);
  std::printf("  results bitwise identical: %s\n", reports_match ? "yes" : "NO");

  return (identical && reports_match) ? 0 : 1;
}
