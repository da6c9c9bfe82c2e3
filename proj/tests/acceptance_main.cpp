// Release gate: every check prints one [PASS]/[FAIL] line; the process exits
// nonzero if any check fails.  Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kerrlearn/coherent.hpp"
#include "kerrlearn/config.hpp"
#include "kerrlearn/dataset.hpp"
#include "kerrlearn/gram.hpp"
#include "kerrlearn/manifest.hpp"
#include "kerrlearn/perturbation.hpp"
#include "kerrlearn/product.hpp"
#include "kerrlearn/runners.hpp"
#include "kerrlearn/training.hpp"

using namespace kerr;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr std::uint64_t kSeed = 314159;  // default experiment seed

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Draws points from the full default ranges, keeping only those whose
// displaced amplitude stays within `alpha_cap` (rejection sampling), so the
// closed forms and a moderate truncation are both trustworthy.
std::vector<DataPoint> amplitude_capped_points(std::uint64_t seed, int n,
                                               double alpha_cap,
                                               const PhysicalParams& p) {
  const DataRanges ranges = DataRanges::defaults();
  UniformSampler sampler(seed);
  std::vector<DataPoint> out;
  while (static_cast<int>(out.size()) < n) {
    const double omega_drive = sampler.next(ranges.omega_drive_max);
    const double omega_laser = sampler.next(ranges.omega_laser_max);
    const double time = sampler.next(ranges.time_max);
    const DataPoint x(omega_drive, omega_laser, time);
    if (std::abs(coherent_amplitude(x, p).alpha) <= alpha_cap)
      out.push_back(x);
  }
  return out;
}

// 1. At zero Kerr coefficient the exact simulator must reproduce the
//    closed-form kernel exp(-|beta - beta2|^2) to 1e-6 relative, over 50
//    seeded pairs with displaced amplitudes capped at 3 (dim = 80).
Outcome check_closed_form_equivalence() {
  const PhysicalParams p(kTwoPi * 1e4, 0.0, FockSpace(80));
  const StateVector vacuum = StateVector::vacuum(p.space);
  const std::vector<DataPoint> pts =
      amplitude_capped_points(kSeed, 100, 3.0, p);

  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const DataPoint& x = pts[2 * k];
    const DataPoint& y = pts[2 * k + 1];
    const double exact = fidelity_kernel(x, y, p, vacuum);
    const double closed = gaussian_kernel_zeroth(x, y, p);
    if (exact <= 0.0) return {false, "exact kernel vanished"};
    worst = std::max(worst, std::abs(closed - exact) / exact);
  }
  std::ostringstream detail;
  detail << "50 pairs, worst relative deviation " << worst;
  return {worst <= 1e-6, detail.str()};
}

// 2. 20-point kernel matrices at kerr in {0, 2pi*10, 2pi*100} rad/us must be
//    symmetric (1e-12), unit diagonal (1e-9), ranged in [0, 1], and PSD up
//    to -1e-8 * lambda_max.
Outcome check_kernel_matrix_invariants() {
  const std::vector<DataPoint> pts =
      sample_dataset(kSeed, 20, DataRanges::defaults());
  std::ostringstream detail;
  for (const double kerr : {0.0, kTwoPi * 10.0, kTwoPi * 100.0}) {
    const PhysicalParams p(kTwoPi * 1e4, kerr, FockSpace(100));
    GramMatrix gram = [&] {
      try {
        return assemble_fidelity_gram(pts, p, StateVector::vacuum(p.space));
      } catch (const std::exception& e) {
        throw std::runtime_error("construction failed at kerr=" +
                                 std::to_string(kerr) + ": " + e.what());
      }
    }();
    const Eigen::MatrixXd& m = gram.values();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    const double diag = (m.diagonal().array() - 1.0).abs().maxCoeff();
    const double lo = m.minCoeff();
    const double hi = m.maxCoeff();
    const bool psd =
        gram.min_eigenvalue() >= -1e-8 * std::max(gram.max_eigenvalue(), 1.0);
    if (asym > 1e-12 || diag > 1e-9 || lo < 0.0 || hi > 1.0 || !psd) {
      detail << "violated at kerr=" << kerr << " (asym " << asym << ", diag "
             << diag << ", range [" << lo << ", " << hi << "], min eig "
             << gram.min_eigenvalue() << ")";
      return {false, detail.str()};
    }
  }
  return {true, "3 kerr values x 20-point matrices satisfy all invariants"};
}

// 3. Halving the Kerr coefficient from 2pi*0.02 to 2pi*0.01 rad/us must
//    shrink |K_pert - K_exact| by a factor in [0.15, 0.45] on 10 seeded
//    pairs (skipping pairs whose error is below 1e-12).
Outcome check_perturbation_order() {
  const PhysicalParams p_hi(kTwoPi * 1e4, kTwoPi * 0.02, FockSpace(100));
  const PhysicalParams p_lo(kTwoPi * 1e4, kTwoPi * 0.01, FockSpace(100));
  const StateVector vacuum = StateVector::vacuum(p_hi.space);
  const std::vector<DataPoint> pts =
      amplitude_capped_points(kSeed + 3, 20, 3.0, p_hi);

  int tested = 0;
  double ratio_min = 1e300, ratio_max = 0.0;
  for (int k = 0; k < 10; ++k) {
    const DataPoint& x = pts[2 * k];
    const DataPoint& y = pts[2 * k + 1];
    const double e_hi = std::abs(perturbative_kernel(x, y, p_hi).total() -
                                 fidelity_kernel(x, y, p_hi, vacuum));
    const double e_lo = std::abs(perturbative_kernel(x, y, p_lo).total() -
                                 fidelity_kernel(x, y, p_lo, vacuum));
    if (e_hi < 1e-12) continue;
    ++tested;
    const double ratio = e_lo / e_hi;
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
  }
  std::ostringstream detail;
  detail << tested << "/10 pairs above the error floor, ratio range ["
         << ratio_min << ", " << ratio_max << "]";
  if (tested == 0) return {false, "no pair exceeded the 1e-12 error floor"};
  return {ratio_min >= 0.15 && ratio_max <= 0.45, detail.str()};
}

// 4. Iterated gradient descent must match the closed-form decay
//    (1 - eta lambda^2)^t along every kernel eigendirection to 1e-10 per
//    step for 500 steps at eta = 1e-3, and the normalized projected
//    trajectory must be label independent to 1e-12.
Outcome check_training_dynamics() {
  const std::vector<DataPoint> pts =
      sample_dataset(kSeed, 10, DataRanges::defaults());
  const PhysicalParams p(kTwoPi * 1e4, kTwoPi * 10.0, FockSpace(100));
  const GramMatrix gram =
      assemble_fidelity_gram(pts, p, StateVector::vacuum(p.space));

  const DataRanges ranges = DataRanges::defaults();
  std::vector<double> labels, alt_labels;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    labels.push_back(target_function(pts[i], ranges));
    alt_labels.push_back(i % 2 == 0 ? 1.0 : -1.0);
  }
  const LabeledDataset data(pts, labels);
  const LabeledDataset alt_data(pts, alt_labels);

  const double eta = 1e-3;
  const long steps = 500;
  double worst_closed = 0.0, worst_label = 0.0;
  for (int k = 0; k < gram.size(); ++k) {
    const TrainRecord rec = train_gradient_descent(data, gram, eta, steps, k);
    const TrainRecord alt =
        train_gradient_descent(alt_data, gram, eta, steps, k);
    const double lambda = rec.projected_eigenvalue;
    const double factor = 1.0 - eta * lambda * lambda;
    double closed = 1.0;
    for (long t = 0; t <= steps; ++t) {
      worst_closed =
          std::max(worst_closed, std::abs(rec.projected_relative[t] - closed));
      worst_label = std::max(
          worst_label,
          std::abs(rec.projected_relative[t] - alt.projected_relative[t]));
      closed *= factor;
    }
  }
  std::ostringstream detail;
  detail << "10 directions x 500 steps: closed-form gap " << worst_closed
         << ", label-dependence gap " << worst_label;
  return {worst_closed <= 1e-10 && worst_label <= 1e-12, detail.str()};
}

// 5. Spectral-trend property on the seeded 10-point dataset at dim = 100:
//    the effective dimension (threshold 1e-7) must not drop when the Kerr
//    coefficient rises from 0 to 2pi*100 rad/us, and the top eigenvalue of
//    the squared kernel at the sweep's top endpoint (2pi*1000 rad/us) must
//    be at least its zero-Kerr value.
Outcome check_spectral_trend() {
  const std::vector<DataPoint> pts =
      sample_dataset(kSeed, 10, DataRanges::defaults());
  const auto stats_at = [&](double kerr) {
    const PhysicalParams p(kTwoPi * 1e4, kerr, FockSpace(100));
    const GramMatrix gram =
        assemble_fidelity_gram(pts, p, StateVector::vacuum(p.space));
    return spectrum_stats(ntk_from_gram(gram), 1e-7);
  };
  const SpectrumStats s0 = stats_at(0.0);
  const SpectrumStats s_mid = stats_at(kTwoPi * 100.0);
  const SpectrumStats s_top = stats_at(ExperimentConfig().kerr_sweep.back());

  std::ostringstream detail;
  detail << "effective dimension " << s0.effective_dimension << " -> "
         << s_mid.effective_dimension << ", max eigenvalue "
         << s0.max_eigenvalue << " -> " << s_top.max_eigenvalue;
  const bool pass =
      s_mid.effective_dimension >= s0.effective_dimension &&
      s_top.max_eigenvalue >= s0.max_eigenvalue;
  return {pass, detail.str()};
}

// 6. The joint-space simulation of a two-mode device must factorize into the
//    entrywise product of the per-mode kernels to 1e-8 (per-factor dim 16,
//    4 composite points), and the spectral radius of the entrywise product
//    must respect the product-of-radii bound on 100 randomized kernel pairs.
Outcome check_product_kernels() {
  const ExperimentConfig config;  // defaults: product_dim 16, product_n 4
  const DataRanges product_ranges(
      config.ranges.omega_drive_max / 50.0, config.ranges.omega_laser_max,
      config.ranges.time_max);
  const std::vector<DataPoint> points_a =
      sample_dataset(kSeed, config.product_n, product_ranges);
  const std::vector<DataPoint> points_b =
      sample_dataset(kSeed + 1, config.product_n, product_ranges);
  const ProductKernelSpec spec(
      {PhysicalParams(config.omega_mode, config.kerr_sweep.front(),
                      FockSpace(config.product_dim)),
       PhysicalParams(config.omega_mode, config.kerr_sweep.back(),
                      FockSpace(config.product_dim))});
  std::vector<CompositePoint> composite;
  for (int i = 0; i < config.product_n; ++i)
    composite.push_back(CompositePoint{points_a[i], points_b[i]});
  const double deviation = product_simulation_crosscheck(spec, composite);

  // Randomized kernel matrices: normalized overlap-squared matrices of
  // random complex vectors are valid kernel matrices by construction.
  UniformSampler sampler(kSeed + 6);
  const auto random_gram = [&sampler](int n, int vec_dim) {
    std::vector<CVector> states;
    for (int i = 0; i < n; ++i) {
      CVector v(vec_dim);
      for (int d = 0; d < vec_dim; ++d)
        v[d] = Complex(sampler.next() - 0.5, sampler.next() - 0.5);
      states.push_back(v.normalized());
    }
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = std::min(std::norm(states[i].dot(states[j])), 1.0);
    return GramMatrix::from_matrix(std::move(m), "random-states");
  };

  int bound_failures = 0;
  double min_margin = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<GramMatrix> factors{random_gram(6, 4), random_gram(6, 4)};
    const SpectralRadiusCheck check = spectral_radius_bound_check(factors);
    min_margin = std::min(min_margin, check.margin);
    if (!check.holds) ++bound_failures;
  }

  std::ostringstream detail;
  detail << "factorization deviation " << deviation << ", radius bound: "
         << (100 - bound_failures) << "/100 hold, smallest margin "
         << min_margin;
  return {deviation <= 1e-8 && bound_failures == 0, detail.str()};
}

// 7. For 10 seeded points whose evolved state keeps its top-level leakage
//    below 1e-6 at dim = 100, every pairwise kernel value must move by less
//    than 1e-6 when recomputed at dim = 200.
Outcome check_truncation_convergence() {
  const double kerr = kTwoPi * 10.0;
  const PhysicalParams p100(kTwoPi * 1e4, kerr, FockSpace(100));
  const PhysicalParams p200(kTwoPi * 1e4, kerr, FockSpace(200));
  const StateVector vac100 = StateVector::vacuum(p100.space);
  const StateVector vac200 = StateVector::vacuum(p200.space);

  const DataRanges ranges = DataRanges::defaults();
  UniformSampler sampler(kSeed + 7);
  std::vector<DataPoint> pts;
  int rejected = 0;
  while (static_cast<int>(pts.size()) < 10) {
    const double omega_drive = sampler.next(ranges.omega_drive_max);
    const double omega_laser = sampler.next(ranges.omega_laser_max);
    const double time = sampler.next(ranges.time_max);
    const DataPoint x(omega_drive, omega_laser, time);
    if (evolve(x, p100, vac100).top_leakage < 1e-6)
      pts.push_back(x);
    else
      ++rejected;
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double k100 = fidelity_kernel(pts[i], pts[j], p100, vac100);
      const double k200 = fidelity_kernel(pts[i], pts[j], p200, vac200);
      worst = std::max(worst, std::abs(k100 - k200));
    }
  std::ostringstream detail;
  detail << "45 pairs (" << rejected
         << " leaky candidates rejected), worst shift " << worst;
  return {worst < 1e-6, detail.str()};
}

struct CsvTable {
  std::vector<std::vector<double>> rows;
};

CsvTable read_numeric_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      row.push_back(std::stod(line.substr(start, pos - start)));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// 8. The four figure pipelines must complete from the default configuration
//    (seed 314159, n = 10, dim = 100, 30-point Kerr sweep) in under 10
//    minutes, reruns must be bit-identical on every data file, and the
//    emitted generalization curve must be finite with a decrease from the
//    smallest to the largest Kerr value.
Outcome check_end_to_end() {
  const auto run_all = [](const std::string& dir) {
    ExperimentConfig config;
    config.output_dir = dir;
    run_fig1(config);
    run_fig2(config);
    run_fig3(config);
    run_fig4(config);
    return config;
  };

  const fs::path dir_a = "acceptance_out";
  const fs::path dir_b = "acceptance_out_rerun";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig config = run_all(dir_a.string());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  run_all(dir_b.string());

  std::vector<std::string> names{"fig1_exact.csv", "fig1_pert.csv",
                                 "fig1_summary.json", "fig2_pairs.csv",
                                 "fig2_summary.csv",  "fig3_rates.csv",
                                 "fig4.csv",          "fig4_summary.json"};
  for (std::size_t k = 0; k < config.kerr_sweep.size(); ++k)
    names.push_back("fig3_traj_" + std::to_string(k) + ".csv");

  int mismatches = 0;
  for (const std::string& name : names)
    if (sha256_file(dir_a / name) != sha256_file(dir_b / name)) ++mismatches;

  const CsvTable fig4 = read_numeric_csv(dir_a / "fig4.csv");
  bool finite = fig4.rows.size() == config.kerr_sweep.size();
  for (const std::vector<double>& row : fig4.rows)
    if (!(std::isfinite(row[1]) && row[1] >= 0.0)) finite = false;
  const double loss_first = fig4.rows.front()[1];
  const double loss_last = fig4.rows.back()[1];

  std::ostringstream detail;
  detail << "first run " << seconds << " s, " << mismatches
         << " rerun mismatches over " << names.size()
         << " files, regression loss " << loss_first << " -> " << loss_last;
  const bool pass = seconds < 600.0 && mismatches == 0 && finite &&
                    loss_last < loss_first;
  return {pass, detail.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"closed-form kernel equivalence at zero Kerr", check_closed_form_equivalence},
      {"kernel matrix invariants across Kerr values", check_kernel_matrix_invariants},
      {"first-order error scaling in the Kerr coefficient", check_perturbation_order},
      {"gradient-descent dynamics match the closed form", check_training_dynamics},
      {"kernel spectrum flattens as Kerr grows", check_spectral_trend},
      {"product kernels factorize and obey the radius bound", check_product_kernels},
      {"kernel values converged in the Fock truncation", check_truncation_convergence},
      {"figure pipelines complete and reproduce bit-identically", check_end_to_end},
  };

  bool all_pass = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome outcome;
    try {
      outcome = checks[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && outcome.pass;
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ": "
              << checks[i].first << " — " << outcome.detail << '\n';
  }
  return all_pass ? 0 : 1;
}
