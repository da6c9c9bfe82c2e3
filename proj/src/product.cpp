#include "kerrlearn/product.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace kerr {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr int kMaxSubsystemDim = 20;
constexpr int kMaxPoints = 6;
constexpr long kMaxJointDim = 4096;

// I ⊗ ... ⊗ op ⊗ ... ⊗ I with op in slot k.
CMatrix promote(const CMatrix& op, const std::vector<int>& dims, int k) {
  long left = 1, right = 1;
  for (int i = 0; i < k; ++i) left *= dims[i];
  for (int i = k + 1; i < static_cast<int>(dims.size()); ++i) right *= dims[i];
  CMatrix tmp =
      Eigen::kroneckerProduct(CMatrix::Identity(left, left), op).eval();
  return Eigen::kroneckerProduct(tmp, CMatrix::Identity(right, right)).eval();
}

CVector evolve_joint(const CMatrix& h, double t, const CVector& psi) {
  const EigenSystem es = eigendecompose(HermitianOperator::from_matrix(h));
  CVector c = es.eigenvectors.adjoint() * psi;
  for (int k = 0; k < c.size(); ++k)
    c[k] *= std::exp(-kI * es.eigenvalues[k] * t);
  return es.eigenvectors * c;
}

}  // namespace

GramMatrix hadamard_kernel(std::span<const GramMatrix> factors) {
  if (factors.empty())
    throw std::invalid_argument("hadamard_kernel: no factors");
  const int n = factors[0].size();
  Eigen::MatrixXd values = factors[0].values();
  std::ostringstream source;
  source << "hadamard(" << factors[0].source();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    if (factors[k].size() != n)
      throw DimensionMismatch("hadamard_kernel: factor sizes differ");
    values = values.cwiseProduct(factors[k].values());
    source << ", " << factors[k].source();
  }
  source << ")";
  return GramMatrix::from_matrix(std::move(values), source.str(),
                                 GramValidation::strict);
}

SpectralRadiusCheck spectral_radius_bound_check(
    std::span<const GramMatrix> factors) {
  if (factors.empty())
    throw std::invalid_argument("spectral_radius_bound_check: no factors");

  const GramMatrix product = hadamard_kernel(factors);

  SpectralRadiusCheck check;
  // Gram matrices are (numerically near-)PSD; the radius is the top
  // eigenvalue up to the tiny negative tail, which |.| folds back in.
  check.rho_product = std::max(std::abs(product.max_eigenvalue()),
                               std::abs(product.min_eigenvalue()));
  check.bound = 1.0;
  for (const GramMatrix& f : factors) {
    const double rho =
        std::max(std::abs(f.max_eigenvalue()), std::abs(f.min_eigenvalue()));
    check.rho_factors.push_back(rho);
    check.bound *= rho;
  }
  check.margin = check.bound - check.rho_product;
  check.holds = check.rho_product <= check.bound + 1e-10;
  return check;
}

double product_simulation_crosscheck(const ProductKernelSpec& spec,
                                     std::span<const CompositePoint> points) {
  const int m = static_cast<int>(spec.subsystems.size());
  const int n = static_cast<int>(points.size());
  if (n < 1)
    throw std::invalid_argument("product_simulation_crosscheck: no points");
  if (n > kMaxPoints)
    throw ResourceLimit("product_simulation_crosscheck: too many data points");

  std::vector<int> dims;
  long joint_dim = 1;
  for (const PhysicalParams& p : spec.subsystems) {
    if (p.space.dim > kMaxSubsystemDim)
      throw ResourceLimit(
          "product_simulation_crosscheck: subsystem dimension exceeds cap");
    dims.push_back(p.space.dim);
    joint_dim *= p.space.dim;
    if (joint_dim > kMaxJointDim)
      throw ResourceLimit(
          "product_simulation_crosscheck: joint dimension exceeds cap");
  }
  for (const CompositePoint& cp : points)
    if (static_cast<int>(cp.size()) != m)
      throw DimensionMismatch(
          "product_simulation_crosscheck: composite point arity mismatch");

  // Joint simulation: evolve the tensor-product vacuum under the sum of the
  // promoted rotating-frame Hamiltonians, treating the joint space as one
  // dense system; then attach every subsystem's lab-frame diagonal factor.
  std::vector<CVector> joint_states;
  joint_states.reserve(n);
  for (const CompositePoint& cp : points) {
    CVector psi = CVector::Zero(joint_dim);
    psi[0] = 1.0;  // every subsystem in its vacuum

    bool equal_times = true;
    for (int k = 1; k < m; ++k)
      if (cp[k].time != cp[0].time) equal_times = false;

    if (equal_times) {
      CMatrix h_tot = CMatrix::Zero(joint_dim, joint_dim);
      for (int k = 0; k < m; ++k) {
        const CMatrix h_k =
            rotating_hamiltonian(cp[k], spec.subsystems[k]).entries();
        h_tot += promote(h_k, dims, k);
      }
      psi = evolve_joint(h_tot, cp[0].time, psi);
    } else {
      // The promoted Hamiltonians commute, so the factors may be applied
      // sequentially, each for its own duration.
      for (int k = 0; k < m; ++k) {
        if (cp[k].time == 0.0) continue;
        const CMatrix h_k =
            rotating_hamiltonian(cp[k], spec.subsystems[k]).entries();
        psi = evolve_joint(promote(h_k, dims, k), cp[k].time, psi);
      }
    }

    // Lab-frame factor: phase exp(-i sum_k omega_{L,k} T_k n_k) per basis
    // state, with n_k read off the mixed-radix joint index.
    for (long idx = 0; idx < joint_dim; ++idx) {
      long rest = idx;
      double angle = 0.0;
      for (int k = m - 1; k >= 0; --k) {
        const long n_k = rest % dims[k];
        rest /= dims[k];
        angle += cp[k].omega_laser * cp[k].time * double(n_k);
      }
      psi[idx] *= std::exp(-kI * angle);
    }
    joint_states.push_back(std::move(psi));
  }

  Eigen::MatrixXd joint_kernel(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      joint_kernel(i, j) =
          std::clamp(std::norm(joint_states[j].dot(joint_states[i])), 0.0, 1.0);

  // Factor kernels from the per-subsystem exact simulator.
  std::vector<GramMatrix> factors;
  factors.reserve(m);
  for (int k = 0; k < m; ++k) {
    std::vector<DataPoint> sub_points;
    sub_points.reserve(n);
    for (const CompositePoint& cp : points) sub_points.push_back(cp[k]);
    factors.push_back(assemble_fidelity_gram(
        sub_points, spec.subsystems[k],
        StateVector::vacuum(spec.subsystems[k].space), nullptr,
        /*parallel=*/false));
  }
  const GramMatrix product = hadamard_kernel(factors);

  return (joint_kernel - product.values()).cwiseAbs().maxCoeff();
}

}  // namespace kerr
