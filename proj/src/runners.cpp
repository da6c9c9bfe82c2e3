#include "kerrlearn/runners.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kerrlearn/csv.hpp"
#include "kerrlearn/dataset.hpp"
#include "kerrlearn/gram.hpp"
#include "kerrlearn/manifest.hpp"
#include "kerrlearn/perturbation.hpp"
#include "kerrlearn/product.hpp"
#include "kerrlearn/training.hpp"
#include "kerrlearn/version.hpp"

namespace kerr {

namespace fs = std::filesystem;

namespace {

fs::path ensure_output_dir(const ExperimentConfig& config) {
  fs::path dir(config.output_dir);
  fs::create_directories(dir);
  return dir;
}

PhysicalParams params_at(const ExperimentConfig& config, double kerr) {
  return PhysicalParams(config.omega_mode, kerr, FockSpace(config.dim));
}

void standard_comments(CsvWriter& csv, const ExperimentConfig& config) {
  csv.comment(std::string("kerrlearn ") + kVersion);
  std::ostringstream line;
  line << "seed=" << config.seed << " dim=" << config.dim
       << " omega_mode=" << CsvWriter::format_double(config.omega_mode);
  csv.comment(line.str());
  std::ostringstream ranges;
  ranges << "ranges: omega_drive="
         << CsvWriter::format_double(config.ranges.omega_drive_max)
         << " omega_laser="
         << CsvWriter::format_double(config.ranges.omega_laser_max)
         << " time=" << CsvWriter::format_double(config.ranges.time_max);
  csv.comment(ranges.str());
}

void write_json(const fs::path& path, const nlohmann::json& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + path.string());
  out << payload.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json spectrum_json(double kerr, const SpectrumStats& stats) {
  return nlohmann::json{
      {"kerr", kerr},
      {"effective_dimension", stats.effective_dimension},
      {"max_eigenvalue", stats.max_eigenvalue},
  };
}

}  // namespace

void run_sample(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = ensure_output_dir(config);
  const std::vector<DataPoint> points =
      sample_dataset(config.seed, config.n_points, config.ranges);

  CsvWriter csv;
  standard_comments(csv, config);
  csv.header({"index", "omega_drive", "omega_laser", "time"});
  for (int i = 0; i < static_cast<int>(points.size()); ++i)
    csv.row({i, points[i].omega_drive, points[i].omega_laser, points[i].time});
  const fs::path file = dir / "dataset.csv";
  csv.write(file);

  write_manifest(dir, "sample", config.echo(), {file});
}

void run_gram(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = ensure_output_dir(config);
  const std::vector<DataPoint> points =
      sample_dataset(config.seed, config.n_points, config.ranges);

  std::vector<fs::path> files;
  nlohmann::json warnings = nlohmann::json::array();

  for (std::size_t k = 0; k < config.kerr_sweep.size(); ++k) {
    const double kerr = config.kerr_sweep[k];
    const PhysicalParams p = params_at(config, kerr);
    TruncationStats stats{config.leakage_tol, {}};
    const GramMatrix gram = assemble_fidelity_gram(
        points, p, StateVector::vacuum(p.space), &stats);

    CsvWriter csv;
    standard_comments(csv, config);
    csv.comment("kerr=" + CsvWriter::format_double(kerr));
    csv.comment("source=" + gram.source());
    csv.header({"index_i", "index_j", "value"});
    for (int i = 0; i < gram.size(); ++i)
      for (int j = 0; j < gram.size(); ++j)
        csv.row({i, j, gram.values()(i, j)});

    const fs::path file = dir / ("gram_" + std::to_string(k) + ".csv");
    csv.write(file);
    files.push_back(file);

    warnings.push_back(nlohmann::json{
        {"kerr", kerr}, {"truncation_warnings", stats.warnings.load()}});
  }

  write_manifest(dir, "gram", config.echo(), files,
                 nlohmann::json{{"truncation_warnings", warnings}});
}

void run_spectrum(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = ensure_output_dir(config);
  const std::vector<DataPoint> points =
      sample_dataset(config.seed, config.n_points, config.ranges);

  std::vector<fs::path> files;
  nlohmann::json warnings = nlohmann::json::array();
  nlohmann::json per_kerr = nlohmann::json::array();

  for (std::size_t k = 0; k < config.kerr_sweep.size(); ++k) {
    const double kerr = config.kerr_sweep[k];
    const PhysicalParams p = params_at(config, kerr);
    TruncationStats stats{config.leakage_tol, {}};
    const GramMatrix gram = assemble_fidelity_gram(
        points, p, StateVector::vacuum(p.space), &stats);
    const SpectrumStats spec =
        spectrum_stats(ntk_from_gram(gram), config.threshold);

    CsvWriter csv;
    standard_comments(csv, config);
    csv.comment("kerr=" + CsvWriter::format_double(kerr));
    csv.comment("threshold=" + CsvWriter::format_double(config.threshold));
    csv.header({"rank", "eigenvalue"});
    for (std::size_t r = 0; r < spec.eigenvalues.size(); ++r)
      csv.row({int(r + 1), spec.eigenvalues[r]});

    const fs::path file = dir / ("spectrum_" + std::to_string(k) + ".csv");
    csv.write(file);
    files.push_back(file);

    per_kerr.push_back(spectrum_json(kerr, spec));
    warnings.push_back(nlohmann::json{
        {"kerr", kerr}, {"truncation_warnings", stats.warnings.load()}});
  }

  const fs::path summary_file = dir / "spectrum_summary.json";
  write_json(summary_file, nlohmann::json{{"seed", config.seed},
                                          {"params", config.echo()},
                                          {"spectrum", per_kerr}});
  files.push_back(summary_file);

  write_manifest(dir, "spectrum", config.echo(), files,
                 nlohmann::json{{"truncation_warnings", warnings}});
}

void run_fig1(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = ensure_output_dir(config);
  std::vector<fs::path> files;

  // Exact-simulator series on the primary dataset.  Failures at individual
  // sweep points are recorded and the sweep continues.
  const std::vector<DataPoint> points =
      sample_dataset(config.seed, config.n_points, config.ranges);

  nlohmann::json warnings = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  nlohmann::json exact_series = nlohmann::json::array();
  nlohmann::json pert_series = nlohmann::json::array();

  CsvWriter exact_csv;
  standard_comments(exact_csv, config);
  exact_csv.comment("series=exact n_points=" + std::to_string(config.n_points));
  exact_csv.header({"kerr", "effective_dimension", "max_eigenvalue"});

  for (const double kerr : config.kerr_sweep) {
    try {
      const PhysicalParams p = params_at(config, kerr);
      TruncationStats stats{config.leakage_tol, {}};
      const GramMatrix gram = assemble_fidelity_gram(
          points, p, StateVector::vacuum(p.space), &stats);
      const SpectrumStats spec =
          spectrum_stats(ntk_from_gram(gram), config.threshold);
      exact_csv.row({kerr, spec.effective_dimension, spec.max_eigenvalue});
      exact_series.push_back(spectrum_json(kerr, spec));
      warnings.push_back(nlohmann::json{
          {"kerr", kerr}, {"truncation_warnings", stats.warnings.load()}});
    } catch (const std::exception& e) {
      failures.push_back(nlohmann::json{{"kerr", kerr}, {"error", e.what()}});
    }
  }
  if (exact_series.empty())
    throw std::runtime_error("fig1: every sweep point failed");

  const fs::path exact_file = dir / "fig1_exact.csv";
  exact_csv.write(exact_file);
  files.push_back(exact_file);

  // First-order series on the larger dataset (seed + 1).  The correction is
  // linear in the Kerr coefficient, so the per-pair slope is computed once
  // and reused across the sweep.
  const std::vector<DataPoint> pert_points =
      sample_dataset(config.seed + 1, config.n_points_pert, config.ranges);
  const int np = static_cast<int>(pert_points.size());
  const PhysicalParams p0 = params_at(config, 0.0);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < np; ++i)
    for (int j = i; j < np; ++j) pairs.emplace_back(i, j);

  Eigen::MatrixXd zeroth(np, np), slope(np, np);
  std::exception_ptr error = nullptr;
  std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < static_cast<int>(pairs.size()); ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    const auto [i, j] = pairs[k];
    try {
      const double z = gaussian_kernel_zeroth(pert_points[i], pert_points[j], p0);
      const double c =
          (i == j) ? 0.0
                   : perturbative_correction_coefficient(pert_points[i],
                                                         pert_points[j], p0);
      zeroth(i, j) = z;
      zeroth(j, i) = z;
      slope(i, j) = c;
      slope(j, i) = c;
    } catch (...) {
#pragma omp critical(kerr_fig1_error)
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);

  CsvWriter pert_csv;
  standard_comments(pert_csv, config);
  pert_csv.comment("series=first_order n_points=" +
                   std::to_string(config.n_points_pert) + " seed_offset=1");
  pert_csv.header({"kerr", "effective_dimension", "max_eigenvalue"});

  for (const double kerr : config.kerr_sweep) {
    Eigen::MatrixXd values(np, np);
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j)
        values(i, j) =
            std::clamp(zeroth(i, j) + kerr * slope(i, j), 0.0, 1.0);
    std::ostringstream source;
    source << "first_order(kerr=" << kerr << ")";
    const GramMatrix gram = GramMatrix::from_matrix(
        std::move(values), source.str(), GramValidation::relaxed);
    const SpectrumStats spec =
        spectrum_stats(ntk_from_gram(gram), config.threshold);
    pert_csv.row({kerr, spec.effective_dimension, spec.max_eigenvalue});
    pert_series.push_back(spectrum_json(kerr, spec));
  }

  const fs::path pert_file = dir / "fig1_pert.csv";
  pert_csv.write(pert_file);
  files.push_back(pert_file);

  const fs::path summary_file = dir / "fig1_summary.json";
  write_json(summary_file, nlohmann::json{{"seed", config.seed},
                                          {"params", config.echo()},
                                          {"exact", exact_series},
                                          {"first_order", pert_series}});
  files.push_back(summary_file);

  nlohmann::json extras{{"truncation_warnings", warnings}};
  if (!failures.empty()) extras["sweep_failures"] = failures;
  write_manifest(dir, "fig1", config.echo(), files, extras);
}

void run_fig2(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = ensure_output_dir(config);

  const std::vector<DataPoint> points =
      sample_dataset(config.seed + 2, config.n_points_pert, config.ranges);
  const PhysicalParams p = params_at(config, config.kerr_pert);
  TruncationStats stats{config.leakage_tol, {}};

  const RelativeErrorReport report = relative_error_report(points, p, &stats);

  CsvWriter pairs_csv;
  standard_comments(pairs_csv, config);
  pairs_csv.comment("kerr=" + CsvWriter::format_double(config.kerr_pert) +
                    " n_points=" + std::to_string(config.n_points_pert) +
                    " seed_offset=2");
  pairs_csv.header({"index_i", "index_j", "k_exact", "k_pert", "rel_error"});
  for (const RelativeErrorRecord& rec : report.records)
    pairs_csv.row(
        {rec.index_i, rec.index_j, rec.k_exact, rec.k_pert, rec.rel_error});
  const fs::path pairs_file = dir / "fig2_pairs.csv";
  pairs_csv.write(pairs_file);

  CsvWriter summary_csv;
  standard_comments(summary_csv, config);
  summary_csv.header({"pairs_compared", "pairs_excluded", "min_rel_error",
                      "median_rel_error", "max_rel_error"});
  summary_csv.row({int(report.records.size()), long(report.excluded_pairs),
                   report.min_error, report.median_error, report.max_error});
  const fs::path summary_file = dir / "fig2_summary.csv";
  summary_csv.write(summary_file);

  write_manifest(
      dir, "fig2", config.echo(), {pairs_file, summary_file},
      nlohmann::json{{"truncation_warnings", stats.warnings.load()}});
}

void run_fig3(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = ensure_output_dir(config);

  const std::vector<DataPoint> points =
      sample_dataset(config.seed, config.n_points, config.ranges);
  std::vector<double> labels;
  labels.reserve(points.size());
  for (const DataPoint& x : points)
    labels.push_back(target_function(x, config.ranges));
  const LabeledDataset data(points, labels);

  std::vector<fs::path> files;
  nlohmann::json warnings = nlohmann::json::array();

  CsvWriter rates_csv;
  standard_comments(rates_csv, config);
  rates_csv.comment("eta=" + CsvWriter::format_double(config.eta) +
                    " steps=" + std::to_string(config.steps));
  rates_csv.header(
      {"kerr", "lambda_max_gram", "decay_factor", "unstable_learning_rate"});

  for (std::size_t k = 0; k < config.kerr_sweep.size(); ++k) {
    const double kerr = config.kerr_sweep[k];
    const PhysicalParams p = params_at(config, kerr);
    TruncationStats stats{config.leakage_tol, {}};
    const GramMatrix gram = assemble_fidelity_gram(
        points, p, StateVector::vacuum(p.space), &stats);

    const TrainRecord rec =
        train_gradient_descent(data, gram, config.eta, config.steps, 0);
    const double lambda = rec.projected_eigenvalue;
    const double factor = 1.0 - config.eta * lambda * lambda;

    CsvWriter traj_csv;
    standard_comments(traj_csv, config);
    traj_csv.comment("kerr=" + CsvWriter::format_double(kerr));
    traj_csv.comment("lambda_max_gram=" + CsvWriter::format_double(lambda));
    traj_csv.comment("decay_factor=" + CsvWriter::format_double(factor));
    traj_csv.header({"step", "residual_norm", "projected_relative_residual"});
    for (long t = 0; t <= rec.steps; ++t)
      traj_csv.row({t, rec.residual_norms[t], rec.projected_relative[t]});

    const fs::path traj_file =
        dir / ("fig3_traj_" + std::to_string(k) + ".csv");
    traj_csv.write(traj_file);
    files.push_back(traj_file);

    rates_csv.row(
        {kerr, lambda, factor, int(rec.unstable_learning_rate ? 1 : 0)});
    warnings.push_back(nlohmann::json{
        {"kerr", kerr}, {"truncation_warnings", stats.warnings.load()}});
  }

  const fs::path rates_file = dir / "fig3_rates.csv";
  rates_csv.write(rates_file);
  files.push_back(rates_file);

  write_manifest(dir, "fig3", config.echo(), files,
                 nlohmann::json{{"truncation_warnings", warnings}});
}

void run_fig4(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = ensure_output_dir(config);

  const std::vector<DataPoint> points =
      sample_dataset(config.seed, config.n_points, config.ranges);
  const auto target = [&config](const DataPoint& x) {
    return target_function(x, config.ranges);
  };

  std::vector<fs::path> files;
  nlohmann::json warnings = nlohmann::json::array();
  nlohmann::json losses = nlohmann::json::array();

  CsvWriter csv;
  standard_comments(csv, config);
  csv.comment("fig4_steps=" + std::to_string(config.fig4_steps) +
              " (0 = converged closed form)");
  csv.header({"kerr", "generalization_loss"});

  for (const double kerr : config.kerr_sweep) {
    const PhysicalParams p = params_at(config, kerr);
    TruncationStats stats{config.leakage_tol, {}};
    const GramMatrix gram = assemble_fidelity_gram(
        points, p, StateVector::vacuum(p.space), &stats);
    const double loss = generalization_error(points, gram, target, config.eta,
                                             config.fig4_steps);
    csv.row({kerr, loss});
    losses.push_back(
        nlohmann::json{{"kerr", kerr}, {"generalization_loss", loss}});
    warnings.push_back(nlohmann::json{
        {"kerr", kerr}, {"truncation_warnings", stats.warnings.load()}});
  }

  const fs::path file = dir / "fig4.csv";
  csv.write(file);
  files.push_back(file);

  const fs::path summary_file = dir / "fig4_summary.json";
  write_json(summary_file, nlohmann::json{{"seed", config.seed},
                                          {"params", config.echo()},
                                          {"generalization", losses}});
  files.push_back(summary_file);

  write_manifest(dir, "fig4", config.echo(), files,
                 nlohmann::json{{"truncation_warnings", warnings}});
}

void run_product_check(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = ensure_output_dir(config);

  // Scaled-down drive so the per-subsystem truncation holds the reachable
  // coherent amplitudes with negligible leakage.
  const DataRanges product_ranges(config.ranges.omega_drive_max / 50.0,
                                  config.ranges.omega_laser_max,
                                  config.ranges.time_max);
  const int n = config.product_n;
  const std::vector<DataPoint> points_a =
      sample_dataset(config.seed, n, product_ranges);
  const std::vector<DataPoint> points_b =
      sample_dataset(config.seed + 1, n, product_ranges);

  const ProductKernelSpec spec(
      {PhysicalParams(config.omega_mode, config.kerr_sweep.front(),
                      FockSpace(config.product_dim)),
       PhysicalParams(config.omega_mode, config.kerr_sweep.back(),
                      FockSpace(config.product_dim))});

  std::vector<CompositePoint> composite;
  composite.reserve(n);
  for (int i = 0; i < n; ++i)
    composite.push_back(CompositePoint{points_a[i], points_b[i]});

  const double deviation = product_simulation_crosscheck(spec, composite);

  std::vector<GramMatrix> factors;
  factors.push_back(assemble_fidelity_gram(
      points_a, spec.subsystems[0], StateVector::vacuum(spec.subsystems[0].space)));
  factors.push_back(assemble_fidelity_gram(
      points_b, spec.subsystems[1], StateVector::vacuum(spec.subsystems[1].space)));
  const SpectralRadiusCheck check = spectral_radius_bound_check(factors);

  CsvWriter csv;
  standard_comments(csv, config);
  csv.comment("product_dim=" + std::to_string(config.product_dim) +
              " product_n=" + std::to_string(n) + " drive_range_scale=0.02");
  csv.comment("factor kerr: " +
              CsvWriter::format_double(config.kerr_sweep.front()) + ", " +
              CsvWriter::format_double(config.kerr_sweep.back()));
  csv.header({"rho_product", "rho_factor_1", "rho_factor_2", "bound",
              "bound_margin", "max_deviation", "bound_holds"});
  csv.row({check.rho_product, check.rho_factors[0], check.rho_factors[1],
           check.bound, check.margin, deviation, int(check.holds ? 1 : 0)});

  const fs::path file = dir / "product.csv";
  csv.write(file);

  write_manifest(dir, "product-check", config.echo(), {file},
                 nlohmann::json{{"max_deviation", deviation}});

  if (!check.holds)
    throw std::runtime_error(
        "product-check: spectral radius bound violated beyond tolerance");
  if (deviation > 1e-8)
    throw std::runtime_error(
        "product-check: joint simulation deviates from the kernel product");
}

}  // namespace kerr
