#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kerrlearn/gram.hpp"

namespace kerr {

struct LabeledDataset {
  std::vector<DataPoint> points;
  std::vector<double> labels;

  LabeledDataset(std::vector<DataPoint> points_, std::vector<double> labels_);
};

// Trace of the residual dynamics eps_{t+1} = (I - eta K_H) eps_t with
// eps_0 = -y, where K_H is the matrix square of the Gram.  The residual
// projected on one Gram eigendirection decays exactly as (1 - eta lambda^2)^t,
// independent of the labels.
struct TrainRecord {
  double learning_rate;
  long steps;
  int projection_index;        // 0 = top Gram eigendirection, descending
  double projected_eigenvalue; // Gram eigenvalue of that direction
  std::vector<double> residual_norms;       // length steps + 1
  std::vector<double> projected;            // v . eps_t
  std::vector<double> projected_relative;   // projected[t] / projected[0]
  bool unstable_learning_rate = false;      // eta * lambda_max(K_H) >= 2
};

TrainRecord train_gradient_descent(const LabeledDataset& data,
                                   const GramMatrix& gram, double eta,
                                   long steps, int projection_index = 0);

// Kernel-regression generalization error.  The first half of `all_points`
// is the training set, the second half the test set; `gram_full` is the
// Gram over all points in that order.  steps == 0 solves the converged
// least-squares problem in closed form (eigenvalues below
// 1e-12 * lambda_max are treated as null directions); steps > 0 runs
// gradient descent on the training block.  Returns
//   L = sum_B (f(x) - y(x))^2 / (2 |B|).
double generalization_error(std::span<const DataPoint> all_points,
                            const GramMatrix& gram_full,
                            const std::function<double(const DataPoint&)>& target,
                            double eta, long steps);

// Per-axis scale of the encoded inputs, used to normalize data coordinates.
struct DataRanges {
  double omega_drive_max;  // rad/us
  double omega_laser_max;  // rad/us
  double time_max;         // us

  DataRanges(double omega_drive_max_, double omega_laser_max_,
             double time_max_);

  // Omega up to 2 pi 300 rad/us, omega_L up to 2 pi 10^4 rad/us
  // (a 10 GHz mode), T up to 0.05 us.
  static DataRanges defaults();
};

// Regression target y(x) = sum_i sin^2(xhat_i^2) over the rescaled
// coordinates xhat_i = x_i / range_i.
double target_function(const DataPoint& x, const DataRanges& ranges);

}  // namespace kerr
