#pragma once

#include <atomic>
#include <span>
#include <vector>

#include "kerrlearn/fock.hpp"

namespace kerr {

// One encoded input x = (Omega, omega_L, T): drive amplitude and drive
// (laser) frequency in rad/us, evolution time in us.
struct DataPoint {
  double omega_drive;
  double omega_laser;
  double time;

  DataPoint(double omega_drive_, double omega_laser_, double time_)
      : omega_drive(omega_drive_), omega_laser(omega_laser_), time(time_) {
    if (omega_drive < 0 || omega_laser < 0 || time < 0)
      throw std::invalid_argument("DataPoint: components must be >= 0");
  }

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

// Device constants shared by every data point: mode frequency omega_m and
// Kerr coefficient (both rad/us), plus the Fock truncation.
struct PhysicalParams {
  double omega_mode;
  double kerr;
  FockSpace space;

  PhysicalParams(double omega_mode_, double kerr_, FockSpace space_)
      : omega_mode(omega_mode_), kerr(kerr_), space(space_) {
    if (omega_mode <= 0)
      throw std::invalid_argument("PhysicalParams: omega_mode must be > 0");
    if (kerr < 0)
      throw std::invalid_argument("PhysicalParams: kerr must be >= 0");
  }

  // Detuning Delta = omega_m - omega_L of the frame rotating at the drive.
  double detuning(const DataPoint& x) const {
    return omega_mode - x.omega_laser;
  }
};

// H_rot = Delta b^dag b + Omega (b + b^dag) - kerr * b^dag b^dag b b,
// time independent in the frame rotating at the drive frequency.
HermitianOperator rotating_hamiltonian(const DataPoint& x,
                                       const PhysicalParams& p);

struct EvolutionResult {
  StateVector state;
  // Population of the top ceil(dim/10) levels after evolution; values above
  // the configured tolerance signal that the truncation is too small.
  double top_leakage;
};

// Population of the top ceil(dim/10) levels of a state.
double top_level_population(const StateVector& state);

// Evolves `initial` for x.time under the rotating-frame Hamiltonian via full
// eigendecomposition, then applies the lab-frame factor exp(-i omega_L T n).
// T = 0 returns the initial state unchanged.
EvolutionResult evolve(const DataPoint& x, const PhysicalParams& p,
                       const StateVector& initial);

// Same propagation without the final lab-frame diagonal factor.
EvolutionResult evolve_rotating_frame(const DataPoint& x,
                                      const PhysicalParams& p,
                                      const StateVector& initial);

// Shared truncation diagnostics: `warnings` counts kernel evaluations where
// either evolved state leaked more than `leakage_tol` into the top levels.
struct TruncationStats {
  double leakage_tol = 1e-6;
  std::atomic<long> warnings{0};
};

// Fidelity kernel K(x, x2) = |<psi(x2)|psi(x)>|^2, clamped to [0, 1].
// Identical inputs short-circuit to exactly 1.0.
double fidelity_kernel(const DataPoint& x, const DataPoint& x2,
                       const PhysicalParams& p, const StateVector& initial,
                       TruncationStats* stats = nullptr);

// Kernel value from two already-evolved states (used by cached Gram paths).
double fidelity_from_states(const EvolutionResult& a, const EvolutionResult& b,
                            TruncationStats* stats = nullptr);

// The same kernel evaluated on a two-level truncation of the mode, the
// limit reached when the Kerr shift dwarfs the drive.
double qubit_limit_kernel(const DataPoint& x, const DataPoint& x2,
                          const PhysicalParams& p);

// Evolves every point (OpenMP-parallel when `parallel`); results align with
// `points` by index.
std::vector<EvolutionResult> evolve_all(std::span<const DataPoint> points,
                                        const PhysicalParams& p,
                                        const StateVector& initial,
                                        bool parallel = true);

}  // namespace kerr
