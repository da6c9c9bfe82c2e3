#include "kerrlearn/gram.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>

namespace kerr {

namespace {

std::vector<std::pair<int, int>> upper_triangle_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(std::size_t(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

[[noreturn]] void rethrow_with_entry_context(int i, int j) {
  try {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "gram entry (" << i << ", " << j << "): " << e.what();
    throw std::runtime_error(msg.str());
  }
}

Eigen::MatrixXd fill_parallel(int n,
                              const std::function<double(int, int)>& entry) {
  Eigen::MatrixXd values(n, n);
  const auto pairs = upper_triangle_pairs(n);
  const int m = static_cast<int>(pairs.size());

  std::exception_ptr error = nullptr;
  std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < m; ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    const auto [i, j] = pairs[k];
    try {
      const double v = entry(i, j);
      values(i, j) = v;
      values(j, i) = v;
    } catch (...) {
#pragma omp critical(kerr_gram_error)
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return values;
}

}  // namespace

GramMatrix GramMatrix::from_matrix(Eigen::MatrixXd values, std::string source,
                                   GramValidation validation) {
  const int n = static_cast<int>(values.rows());
  if (n < 1 || values.cols() != n)
    throw DimensionMismatch("GramMatrix: square matrix required");

  const double asym = (values - values.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument("GramMatrix: matrix is not symmetric");
  values = 0.5 * (values + values.transpose().eval());

  for (int i = 0; i < n; ++i) {
    if (std::abs(values(i, i) - 1.0) > 1e-9)
      throw std::invalid_argument("GramMatrix: diagonal entry deviates from 1");
    for (int j = 0; j < n; ++j) {
      const double v = values(i, j);
      if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
        throw std::invalid_argument("GramMatrix: entry outside [0, 1]");
    }
  }
  // Snap rounding residue back into the admissible interval.
  values = values.cwiseMax(0.0).cwiseMin(1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(values);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("GramMatrix: eigensolver did not converge");

  if (validation == GramValidation::strict) {
    const double max_ev = solver.eigenvalues()[n - 1];
    const double min_ev = solver.eigenvalues()[0];
    if (min_ev < -1e-8 * std::max(max_ev, 1.0))
      throw std::invalid_argument(
          "GramMatrix: matrix is not positive semidefinite");
  }

  return GramMatrix(std::move(values), std::move(source), solver.eigenvalues(),
                    solver.eigenvectors());
}

GramMatrix assemble_gram(std::span<const DataPoint> points,
                         const KernelFn& kernel, std::string source,
                         GramValidation validation) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw std::invalid_argument("assemble_gram: empty dataset");

  Eigen::MatrixXd values = fill_parallel(n, [&](int i, int j) -> double {
    try {
      return kernel(points[i], points[j]);
    } catch (...) {
      rethrow_with_entry_context(i, j);
    }
  });
  return GramMatrix::from_matrix(std::move(values), std::move(source),
                                 validation);
}

GramMatrix assemble_gram_serial(std::span<const DataPoint> points,
                                const KernelFn& kernel, std::string source,
                                GramValidation validation) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw std::invalid_argument("assemble_gram: empty dataset");

  Eigen::MatrixXd values(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      try {
        const double v = kernel(points[i], points[j]);
        values(i, j) = v;
        values(j, i) = v;
      } catch (...) {
        rethrow_with_entry_context(i, j);
      }
    }
  }
  return GramMatrix::from_matrix(std::move(values), std::move(source),
                                 validation);
}

GramMatrix assemble_fidelity_gram(std::span<const DataPoint> points,
                                  const PhysicalParams& p,
                                  const StateVector& initial,
                                  TruncationStats* stats, bool parallel) {
  const int n = static_cast<int>(points.size());
  if (n < 1)
    throw std::invalid_argument("assemble_fidelity_gram: empty dataset");

  const std::vector<EvolutionResult> evolved =
      evolve_all(points, p, initial, parallel);

  Eigen::MatrixXd values(n, n);
  const auto pairs = upper_triangle_pairs(n);
  const int m = static_cast<int>(pairs.size());

  std::exception_ptr error = nullptr;
  std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int k = 0; k < m; ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    const auto [i, j] = pairs[k];
    try {
      double v;
      if (points[i] == points[j]) {
        if (stats && evolved[i].top_leakage > stats->leakage_tol)
          stats->warnings.fetch_add(1, std::memory_order_relaxed);
        v = 1.0;
      } else {
        v = fidelity_from_states(evolved[i], evolved[j], stats);
      }
      values(i, j) = v;
      values(j, i) = v;
    } catch (...) {
      try {
        rethrow_with_entry_context(i, j);
      } catch (...) {
#pragma omp critical(kerr_fid_gram_error)
        {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);

  std::ostringstream source;
  source << "fidelity(dim=" << p.space.dim << ", kerr=" << p.kerr << ")";
  return GramMatrix::from_matrix(std::move(values), source.str(),
                                 GramValidation::strict);
}

NtkMatrix::NtkMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  const int n = static_cast<int>(values_.rows());
  if (n < 1 || values_.cols() != n)
    throw DimensionMismatch("NtkMatrix: square matrix required");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(values_);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("NtkMatrix: eigensolver did not converge");
  evals_ = solver.eigenvalues();
}

NtkMatrix ntk_from_gram(const GramMatrix& gram) {
  return NtkMatrix(gram.values() * gram.values());
}

SpectrumStats spectrum_stats(const NtkMatrix& ntk, double threshold) {
  if (threshold <= 0)
    throw std::invalid_argument("spectrum_stats: threshold must be > 0");
  SpectrumStats stats;
  stats.threshold = threshold;
  const auto& evals = ntk.eigenvalues();
  stats.eigenvalues.assign(evals.data(), evals.data() + evals.size());
  std::reverse(stats.eigenvalues.begin(), stats.eigenvalues.end());
  stats.max_eigenvalue = stats.eigenvalues.front();
  stats.effective_dimension = static_cast<int>(
      std::count_if(stats.eigenvalues.begin(), stats.eigenvalues.end(),
                    [threshold](double ev) { return ev > threshold; }));
  return stats;
}

}  // namespace kerr
