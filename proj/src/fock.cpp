#include "kerrlearn/fock.hpp"

#include <cmath>
#include <utility>

namespace kerr {

StateVector StateVector::vacuum(const FockSpace& space) {
  return fock_basis(space, 0);
}

StateVector StateVector::fock_basis(const FockSpace& space, int level) {
  if (level < 0 || level >= space.dim)
    throw std::invalid_argument("StateVector: basis level out of range");
  CVector v = CVector::Zero(space.dim);
  v[level] = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::normalized(CVector amplitudes) {
  if (amplitudes.size() == 0)
    throw std::invalid_argument("StateVector: empty amplitude vector");
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("StateVector: zero vector");
  amplitudes /= n;
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::unit(CVector amplitudes, double tol) {
  if (amplitudes.size() == 0)
    throw std::invalid_argument("StateVector: empty amplitude vector");
  const double n = amplitudes.norm();
  if (std::abs(n - 1.0) > tol)
    throw std::logic_error("StateVector: amplitudes are not unit norm");
  return StateVector(std::move(amplitudes));
}

HermitianOperator HermitianOperator::from_matrix(CMatrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw DimensionMismatch("HermitianOperator: square matrix required");
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12 * scale)
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
  // Exact symmetrization so the eigensolver sees A == A^dagger bitwise.
  CMatrix sym = 0.5 * (entries + entries.adjoint().eval());
  return HermitianOperator(std::move(sym));
}

CMatrix annihilation(const FockSpace& space) {
  CMatrix b = CMatrix::Zero(space.dim, space.dim);
  for (int n = 1; n < space.dim; ++n) b(n - 1, n) = std::sqrt(double(n));
  return b;
}

CMatrix number_operator(const FockSpace& space) {
  CMatrix n = CMatrix::Zero(space.dim, space.dim);
  for (int k = 0; k < space.dim; ++k) n(k, k) = double(k);
  return n;
}

CMatrix kerr_operator(const FockSpace& space) {
  CMatrix m = CMatrix::Zero(space.dim, space.dim);
  for (int k = 0; k < space.dim; ++k) m(k, k) = double(k) * double(k - 1);
  return m;
}

EigenSystem eigendecompose(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(op.entries());
  if (solver.info() != Eigen::Success)
    throw NonConvergence("eigendecompose: eigensolver did not converge");
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("inner_product: state dimensions differ");
  return a.amplitudes().dot(b.amplitudes());
}

}  // namespace kerr
