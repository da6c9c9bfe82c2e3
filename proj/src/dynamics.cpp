#include "kerrlearn/dynamics.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

namespace kerr {

namespace {

constexpr Complex kI{0.0, 1.0};

EvolutionResult evolve_impl(const DataPoint& x, const PhysicalParams& p,
                            const StateVector& initial, bool lab_frame) {
  if (initial.dim() != p.space.dim)
    throw DimensionMismatch("evolve: initial state dimension != space dim");

  if (x.time == 0.0)
    return EvolutionResult{initial, top_level_population(initial)};

  const HermitianOperator h = rotating_hamiltonian(x, p);
  const EigenSystem es = eigendecompose(h);

  CVector coeffs = es.eigenvectors.adjoint() * initial.amplitudes();
  for (int k = 0; k < coeffs.size(); ++k)
    coeffs[k] *= std::exp(-kI * es.eigenvalues[k] * x.time);
  CVector out = es.eigenvectors * coeffs;

  if (lab_frame) {
    for (int n = 0; n < out.size(); ++n)
      out[n] *= std::exp(-kI * x.omega_laser * x.time * double(n));
  }

  // The propagator is unitary; a norm drift beyond 1e-10 means the
  // eigendecomposition (not the physics) broke down.
  StateVector state = StateVector::unit(std::move(out), 1e-10);
  const double leak = top_level_population(state);
  return EvolutionResult{std::move(state), leak};
}

}  // namespace

HermitianOperator rotating_hamiltonian(const DataPoint& x,
                                       const PhysicalParams& p) {
  const FockSpace& s = p.space;
  const double delta = p.detuning(x);
  CMatrix h = CMatrix::Zero(s.dim, s.dim);
  for (int n = 0; n < s.dim; ++n)
    h(n, n) = delta * double(n) - p.kerr * double(n) * double(n - 1);
  for (int n = 1; n < s.dim; ++n) {
    const double c = x.omega_drive * std::sqrt(double(n));
    h(n - 1, n) += c;  // Omega b
    h(n, n - 1) += c;  // Omega b^dag
  }
  return HermitianOperator::from_matrix(std::move(h));
}

double top_level_population(const StateVector& state) {
  const int dim = state.dim();
  const int band = (dim + 9) / 10;  // ceil(dim/10)
  double pop = 0.0;
  for (int n = dim - band; n < dim; ++n) pop += std::norm(state.amplitudes()[n]);
  return pop;
}

EvolutionResult evolve(const DataPoint& x, const PhysicalParams& p,
                       const StateVector& initial) {
  return evolve_impl(x, p, initial, /*lab_frame=*/true);
}

EvolutionResult evolve_rotating_frame(const DataPoint& x,
                                      const PhysicalParams& p,
                                      const StateVector& initial) {
  return evolve_impl(x, p, initial, /*lab_frame=*/false);
}

double fidelity_from_states(const EvolutionResult& a, const EvolutionResult& b,
                            TruncationStats* stats) {
  if (stats &&
      (a.top_leakage > stats->leakage_tol || b.top_leakage > stats->leakage_tol))
    stats->warnings.fetch_add(1, std::memory_order_relaxed);

  const Complex overlap = inner_product(b.state, a.state);
  const double raw = std::norm(overlap);
  if (raw > 1.0 + 1e-9)
    throw std::logic_error("fidelity: |overlap|^2 exceeds 1 beyond rounding");
  return std::clamp(raw, 0.0, 1.0);
}

double fidelity_kernel(const DataPoint& x, const DataPoint& x2,
                       const PhysicalParams& p, const StateVector& initial,
                       TruncationStats* stats) {
  if (x == x2) {
    // Same state on both sides; still evolve once so leakage is surfaced.
    EvolutionResult r = evolve(x, p, initial);
    if (stats && r.top_leakage > stats->leakage_tol)
      stats->warnings.fetch_add(1, std::memory_order_relaxed);
    return 1.0;
  }
  const EvolutionResult ra = evolve(x, p, initial);
  const EvolutionResult rb = evolve(x2, p, initial);
  return fidelity_from_states(ra, rb, stats);
}

double qubit_limit_kernel(const DataPoint& x, const DataPoint& x2,
                          const PhysicalParams& p) {
  const PhysicalParams two_level(p.omega_mode, p.kerr, FockSpace(2));
  const StateVector ground = StateVector::vacuum(two_level.space);
  return fidelity_kernel(x, x2, two_level, ground, nullptr);
}

std::vector<EvolutionResult> evolve_all(std::span<const DataPoint> points,
                                        const PhysicalParams& p,
                                        const StateVector& initial,
                                        bool parallel) {
  const int n = static_cast<int>(points.size());
  std::vector<EvolutionResult> results;
  results.reserve(n);
  for (int i = 0; i < n; ++i)
    results.push_back(EvolutionResult{initial, 0.0});  // placeholder

  std::exception_ptr error = nullptr;
  std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      results[i] = evolve(points[i], p, initial);
    } catch (...) {
#pragma omp critical(kerr_evolve_all_error)
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }

  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace kerr
