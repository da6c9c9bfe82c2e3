#pragma once

#include "kerrlearn/config.hpp"

namespace kerr {

// Each runner writes its CSV outputs plus manifest_<command>.json into
// config.output_dir (created if missing).  Outputs are pure functions of the
// config; re-running a command reproduces every data file bit for bit (only
// the manifest timestamp changes).

void run_sample(const ExperimentConfig& config);
void run_gram(const ExperimentConfig& config);
void run_spectrum(const ExperimentConfig& config);

// Kernel-spectrum statistics across the Kerr sweep: exact simulator on the
// primary dataset (seed) and first-order kernel on a larger dataset
// (seed + 1, n_points_pert points).
void run_fig1(const ExperimentConfig& config);

// First-order vs exact kernel over all pairs of a dataset drawn with
// seed + 2, evaluated at kerr_pert.
void run_fig2(const ExperimentConfig& config);

// Gradient-descent residual traces across the Kerr sweep, plus the exact
// per-step decay factor of the top kernel eigendirection.
void run_fig3(const ExperimentConfig& config);

// Generalization error of kernel regression across the Kerr sweep
// (fig4_steps = 0 uses the converged closed form).
void run_fig4(const ExperimentConfig& config);

// Two-subsystem product kernel: spectral-radius bound plus the joint-space
// factorization crosscheck.  Factor datasets use seed and seed + 1; the
// drive range is scaled down by 50 so a small per-subsystem truncation
// holds the coherent support faithfully.
void run_product_check(const ExperimentConfig& config);

}  // namespace kerr
