#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "kerrlearn/coherent.hpp"
#include "kerrlearn/dynamics.hpp"

namespace kerr {

// First-order expansion of the fidelity kernel in the Kerr coefficient:
//   K(x, x2) ~ zeroth + first_correction,  first_correction linear in kerr.
struct PerturbativeKernelValue {
  double zeroth;            // Kerr-free kernel exp(-|beta - beta2|^2)
  double first_correction;  // kerr * (slope of K at kerr = 0)
  double kerr;              // coefficient the correction was evaluated at

  double total() const {
    return std::clamp(zeroth + first_correction, 0.0, 1.0);
  }
};

// d K / d kerr at kerr = 0 for the pair (x, x2).  The integrals over the two
// evolution windows are evaluated on Gauss-Legendre grids; the result is
// accepted only when doubling the node count moves it by less than 1e-8
// relative (floored at 1e-14 absolute, the observable scale of a [0,1]
// kernel).  quad_points = 0 picks a per-pair estimate from the phase budget
// and escalates on demand; a positive value (>= 16) is used as given, with
// one doubling check, and QuadratureUnderResolved is thrown on mismatch.
double perturbative_correction_coefficient(const DataPoint& x,
                                           const DataPoint& x2,
                                           const PhysicalParams& p,
                                           int quad_points = 0);

// Zeroth plus first order at p.kerr.  Identical inputs short-circuit to
// {1.0, 0.0}.
PerturbativeKernelValue perturbative_kernel(const DataPoint& x,
                                            const DataPoint& x2,
                                            const PhysicalParams& p,
                                            int quad_points = 0);

// Node-count estimate for the pair's oscillation budget (power of two).
int suggested_quad_points(const DataPoint& x, const DataPoint& x2,
                          const PhysicalParams& p);

struct RelativeErrorRecord {
  int index_i;
  int index_j;
  double k_exact;
  double k_pert;
  double rel_error;  // |k_pert - k_exact| / k_exact
};

// Pairwise comparison of the perturbative kernel against the exact
// simulator over all unordered pairs (diagonal included).  Pairs whose
// exact kernel is below 1e-10 are excluded from the error statistics and
// counted instead.
struct RelativeErrorReport {
  std::vector<RelativeErrorRecord> records;
  long excluded_pairs = 0;
  double min_error = 0.0;
  double median_error = 0.0;
  double max_error = 0.0;
};

RelativeErrorReport relative_error_report(std::span<const DataPoint> points,
                                          const PhysicalParams& p,
                                          TruncationStats* stats = nullptr,
                                          bool parallel = true);

namespace detail {

// Everything about a pair that the correction integrals need, precomputed.
// The bra/ket chains collapse to one coherent pair per side; the constant
// offset between them has modulus |beta - beta2| exactly, so the overlap
// envelope of both integrands is e^{-|beta-beta2|^2/2}, time independent.
struct PairGeometry {
  DriveFrame frame_x, frame_y;
  double t_x = 0.0, t_y = 0.0;
  Complex a0;               // zeroth-order overlap amplitude
  double separation_sq = 0.0;  // |beta_x - beta_y|^2
  DriveFrame::Coherent prefix_x, prefix_y;
};

PairGeometry pair_geometry(const DataPoint& x, const DataPoint& x2,
                           const PhysicalParams& p);

Complex integrand_x(const PairGeometry& g, double t);
Complex integrand_y(const PairGeometry& g, double s);

// Raw slope at a fixed node count (no doubling check).
double correction_slope(const PairGeometry& g, int nodes);

}  // namespace detail

}  // namespace kerr
