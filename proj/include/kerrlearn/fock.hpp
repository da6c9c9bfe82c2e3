#pragma once

#include <complex>

#include <Eigen/Dense>

#include "kerrlearn/errors.hpp"

namespace kerr {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Bosonic Fock space truncated to the lowest `dim` occupation levels
// |0>, ..., |dim-1>.  All operators and states in this library are expressed
// in this basis, occupation ascending; matrices are indexed (bra, ket).
struct FockSpace {
  int dim;

  explicit FockSpace(int dim_) : dim(dim_) {
    if (dim < 2) throw std::invalid_argument("FockSpace: dim must be >= 2");
  }
};

// A normalized pure state.  Construction is restricted to factories that
// guarantee ||amplitudes||_2 = 1 (up to float rounding), so downstream code
// can treat every StateVector as a unit vector.
class StateVector {
 public:
  static StateVector vacuum(const FockSpace& space);
  static StateVector fock_basis(const FockSpace& space, int level);

  // Rescales arbitrary amplitudes to unit norm; throws on the zero vector.
  static StateVector normalized(CVector amplitudes);

  // Accepts amplitudes that are already unit-norm within `tol` and stores
  // them unchanged (used after unitary evolution, where renormalizing would
  // mask a broken propagator).  Throws std::logic_error outside `tol`.
  static StateVector unit(CVector amplitudes, double tol = 1e-10);

  const CVector& amplitudes() const { return amps_; }
  int dim() const { return static_cast<int>(amps_.size()); }

 private:
  explicit StateVector(CVector amps) : amps_(std::move(amps)) {}
  CVector amps_;
};

// A matrix validated to be Hermitian (to 1e-12 relative) and then
// symmetrized exactly, so eigensolvers can rely on A = A^dagger bitwise.
class HermitianOperator {
 public:
  static HermitianOperator from_matrix(CMatrix entries);

  const CMatrix& entries() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  explicit HermitianOperator(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

struct EigenSystem {
  Eigen::VectorXd eigenvalues;  // ascending
  CMatrix eigenvectors;         // unitary; column k pairs with eigenvalues[k]
};

// Annihilation operator b: entries[n-1][n] = sqrt(n), zero elsewhere.
CMatrix annihilation(const FockSpace& space);

// Number operator b^dag b = diag(0, 1, ..., dim-1).
CMatrix number_operator(const FockSpace& space);

// Two-particle interaction term b^dag b^dag b b = diag(n(n-1)).
CMatrix kerr_operator(const FockSpace& space);

// Full Hermitian eigendecomposition; throws NonConvergence on solver failure.
EigenSystem eigendecompose(const HermitianOperator& op);

// <a|b> with the physics convention (conjugate-linear in the first slot).
Complex inner_product(const StateVector& a, const StateVector& b);

}  // namespace kerr
