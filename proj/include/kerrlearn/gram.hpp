#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kerrlearn/dynamics.hpp"

namespace kerr {

// `strict` enforces positive semidefiniteness (right for exact fidelity
// kernels, which are Gram matrices of pure states by construction);
// `relaxed` skips only that check, for first-order approximants that may dip
// slightly negative at larger Kerr.
enum class GramValidation { strict, relaxed };

// A validated kernel matrix: symmetric, unit diagonal (to 1e-9), entries in
// [0, 1], and (strict mode) eigenvalues >= -1e-8 * lambda_max.  The spectrum
// is computed once at construction and cached.
class GramMatrix {
 public:
  static GramMatrix from_matrix(Eigen::MatrixXd values, std::string source,
                                GramValidation validation = GramValidation::strict);

  int size() const { return static_cast<int>(values_.rows()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::string& source() const { return source_; }

  const Eigen::VectorXd& eigenvalues() const { return evals_; }  // ascending
  const Eigen::MatrixXd& eigenvectors() const { return evecs_; }
  double max_eigenvalue() const { return evals_[evals_.size() - 1]; }
  double min_eigenvalue() const { return evals_[0]; }

 private:
  GramMatrix(Eigen::MatrixXd values, std::string source, Eigen::VectorXd evals,
             Eigen::MatrixXd evecs)
      : values_(std::move(values)),
        source_(std::move(source)),
        evals_(std::move(evals)),
        evecs_(std::move(evecs)) {}

  Eigen::MatrixXd values_;
  std::string source_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

using KernelFn = std::function<double(const DataPoint&, const DataPoint&)>;

// Builds the kernel matrix K_ij = kernel(points[i], points[j]) over the
// upper triangle (mirrored exactly), OpenMP-parallel across entries.
// Kernel failures are rethrown with the offending (i, j) in the message.
GramMatrix assemble_gram(std::span<const DataPoint> points,
                         const KernelFn& kernel, std::string source,
                         GramValidation validation = GramValidation::strict);

// Plain double-loop reference used to pin down the parallel path in tests.
GramMatrix assemble_gram_serial(std::span<const DataPoint> points,
                                const KernelFn& kernel, std::string source,
                                GramValidation validation = GramValidation::strict);

// Fidelity-kernel Gram that evolves each point once and reuses the states
// for all n(n+1)/2 overlaps.  Bitwise identical to assemble_gram with a
// fidelity_kernel lambda, at a fraction of the cost.
GramMatrix assemble_fidelity_gram(std::span<const DataPoint> points,
                                  const PhysicalParams& p,
                                  const StateVector& initial,
                                  TruncationStats* stats = nullptr,
                                  bool parallel = true);

// Kernel matrix governing linearized training dynamics: the matrix square
// of the Gram.
class NtkMatrix {
 public:
  explicit NtkMatrix(Eigen::MatrixXd values);

  int size() const { return static_cast<int>(values_.rows()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }  // ascending

 private:
  Eigen::MatrixXd values_;
  Eigen::VectorXd evals_;
};

NtkMatrix ntk_from_gram(const GramMatrix& gram);

struct SpectrumStats {
  std::vector<double> eigenvalues;  // descending
  int effective_dimension;          // count of eigenvalues > threshold
  double max_eigenvalue;
  double threshold;
};

SpectrumStats spectrum_stats(const NtkMatrix& ntk, double threshold);

}  // namespace kerr
