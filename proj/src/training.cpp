#include "kerrlearn/training.hpp"

#include <cmath>

namespace kerr {

LabeledDataset::LabeledDataset(std::vector<DataPoint> points_,
                               std::vector<double> labels_)
    : points(std::move(points_)), labels(std::move(labels_)) {
  if (points.size() != labels.size())
    throw DimensionMismatch("LabeledDataset: points/labels length mismatch");
  if (points.empty())
    throw std::invalid_argument("LabeledDataset: empty dataset");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j])
        throw std::invalid_argument("LabeledDataset: duplicate data points");
}

TrainRecord train_gradient_descent(const LabeledDataset& data,
                                   const GramMatrix& gram, double eta,
                                   long steps, int projection_index) {
  const int n = gram.size();
  if (static_cast<int>(data.points.size()) != n)
    throw DimensionMismatch("train_gradient_descent: dataset/gram size mismatch");
  if (eta < 0)
    throw std::invalid_argument("train_gradient_descent: eta must be >= 0");
  if (steps < 0)
    throw std::invalid_argument("train_gradient_descent: steps must be >= 0");
  if (projection_index < 0 || projection_index >= n)
    throw std::invalid_argument("train_gradient_descent: projection index out of range");

  TrainRecord rec;
  rec.learning_rate = eta;
  rec.steps = steps;
  rec.projection_index = projection_index;

  // Gram spectrum is cached ascending; projection indices count from the top.
  const int col = n - 1 - projection_index;
  rec.projected_eigenvalue = gram.eigenvalues()[col];
  const Eigen::VectorXd direction = gram.eigenvectors().col(col);

  const double lambda_sq_max =
      std::max(gram.max_eigenvalue() * gram.max_eigenvalue(),
               gram.min_eigenvalue() * gram.min_eigenvalue());
  rec.unstable_learning_rate = (eta * lambda_sq_max >= 2.0);

  const Eigen::MatrixXd ntk = gram.values() * gram.values();
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = data.labels[i];

  Eigen::VectorXd eps = -y;
  rec.residual_norms.reserve(steps + 1);
  rec.projected.reserve(steps + 1);

  for (long t = 0; t <= steps; ++t) {
    if (t > 0) eps -= eta * (ntk * eps);
    rec.residual_norms.push_back(eps.norm());
    rec.projected.push_back(direction.dot(eps));
  }

  rec.projected_relative.reserve(steps + 1);
  const double p0 = rec.projected[0];
  if (p0 != 0.0) {
    for (double pt : rec.projected) rec.projected_relative.push_back(pt / p0);
  } else {
    // Labels orthogonal to the direction: fall back to the exact decay law.
    const double factor =
        1.0 - eta * rec.projected_eigenvalue * rec.projected_eigenvalue;
    double r = 1.0;
    for (long t = 0; t <= steps; ++t) {
      rec.projected_relative.push_back(r);
      r *= factor;
    }
  }
  return rec;
}

double generalization_error(
    std::span<const DataPoint> all_points, const GramMatrix& gram_full,
    const std::function<double(const DataPoint&)>& target, double eta,
    long steps) {
  const int n = static_cast<int>(all_points.size());
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument(
        "generalization_error: need an even number (>= 4) of points");
  if (gram_full.size() != n)
    throw DimensionMismatch("generalization_error: gram/points size mismatch");
  if (steps < 0)
    throw std::invalid_argument("generalization_error: steps must be >= 0");

  const int h = n / 2;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = target(all_points[i]);

  const Eigen::MatrixXd k_train = gram_full.values().topLeftCorner(h, h);
  const Eigen::MatrixXd k_cross = gram_full.values().bottomLeftCorner(h, h);
  const Eigen::VectorXd y_train = y.head(h);
  const Eigen::VectorXd y_test = y.tail(h);

  Eigen::VectorXd theta;
  if (steps == 0) {
    // Converged limit: pseudo-inverse solve, null directions dropped.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k_train);
    if (solver.info() != Eigen::Success)
      throw NonConvergence("generalization_error: eigensolver failed");
    const double cutoff =
        1e-12 * std::max(solver.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    theta = Eigen::VectorXd::Zero(h);
    for (int k = 0; k < h; ++k) {
      const double ev = solver.eigenvalues()[k];
      if (ev <= cutoff) continue;
      const Eigen::VectorXd v = solver.eigenvectors().col(k);
      theta += v * (v.dot(y_train) / ev);
    }
  } else {
    if (eta <= 0)
      throw std::invalid_argument("generalization_error: eta must be > 0");
    theta = Eigen::VectorXd::Zero(h);
    for (long t = 0; t < steps; ++t)
      theta -= eta * (k_train * (k_train * theta - y_train));
  }

  const Eigen::VectorXd predicted = k_cross * theta;
  return (predicted - y_test).squaredNorm() / (2.0 * h);
}

DataRanges::DataRanges(double omega_drive_max_, double omega_laser_max_,
                       double time_max_)
    : omega_drive_max(omega_drive_max_),
      omega_laser_max(omega_laser_max_),
      time_max(time_max_) {
  if (omega_drive_max <= 0 || omega_laser_max <= 0 || time_max <= 0)
    throw std::invalid_argument("DataRanges: ranges must be > 0");
}

DataRanges DataRanges::defaults() {
  constexpr double two_pi = 2.0 * M_PI;
  return DataRanges(two_pi * 300.0, two_pi * 1e4, 0.05);
}

double target_function(const DataPoint& x, const DataRanges& ranges) {
  const double a = x.omega_drive / ranges.omega_drive_max;
  const double b = x.omega_laser / ranges.omega_laser_max;
  const double c = x.time / ranges.time_max;
  const auto term = [](double u) {
    const double s = std::sin(u * u);
    return s * s;
  };
  return term(a) + term(b) + term(c);
}

}  // namespace kerr
