#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kerrlearn/training.hpp"

namespace kerr {

// Flat key=value run configuration.  Every field can be set from a config
// file and overridden from the command line; unknown keys are rejected.
struct ExperimentConfig {
  std::uint64_t seed = 314159;
  int n_points = 10;         // dataset size for exact-simulator experiments
  int n_points_pert = 100;   // dataset size for perturbative experiments
  int dim = 100;             // Fock truncation
  double omega_mode = 2.0 * M_PI * 1e4;  // rad/us (10 GHz mode)
  std::vector<double> kerr_sweep;        // rad/us, strictly ascending, >= 0
  double eta = 1e-3;
  long steps = 500;
  long fig4_steps = 0;       // 0 = closed-form converged regression
  double threshold = 1e-7;   // spectrum cutoff for the effective dimension
  double leakage_tol = 1e-6;
  double kerr_pert = 2.0 * M_PI * 0.01;  // operating point for fig2
  int product_dim = 16;      // per-subsystem truncation for product-check
  int product_n = 4;         // composite points for product-check
  DataRanges ranges = DataRanges::defaults();
  std::string output_dir = "out";

  ExperimentConfig();

  // Zero plus 29 log-spaced values from 2 pi 0.01 to 2 pi 1000 rad/us.
  static std::vector<double> default_kerr_sweep();

  void validate() const;  // throws ConfigError
  // All numeric parameters; omits output_dir so summaries embedding the echo
  // are byte-identical across runs into different directories.
  nlohmann::json echo() const;
};

// Reads `path` (when given) and then applies `overrides`, each "key=value".
ExperimentConfig load_config(const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides);

// Applies one "key=value" assignment; throws ConfigError on unknown keys or
// malformed values.
void apply_config_entry(ExperimentConfig& config, const std::string& entry);

}  // namespace kerr
