#include "kerrlearn/perturbation.hpp"

#include <atomic>
#include <cmath>
#include <exception>

#include "kerrlearn/quadrature.hpp"

namespace kerr {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr int kMaxNodes = 1 << 17;
constexpr double kRelTol = 1e-8;
constexpr double kAbsFloor = 1e-14;

// Beyond this squared separation the correction is bounded by
// e^{-sep^2} * poly(amplitudes), far below double precision noise.
constexpr double kNegligibleSeparationSq = 60.0;

int round_up_pow2(int n) {
  int p = 16;
  while (p < n && p < kMaxNodes) p <<= 1;
  return p;
}

double slope_with_check(const detail::PairGeometry& g, int nodes) {
  const double c1 = detail::correction_slope(g, nodes);
  const double c2 = detail::correction_slope(g, 2 * nodes);
  const double scale = std::max({std::abs(c1), std::abs(c2), kAbsFloor});
  if (std::abs(c1 - c2) > kRelTol * scale)
    throw QuadratureUnderResolved(
        "perturbative correction: node doubling shifted the result");
  return c2;
}

}  // namespace

namespace detail {

PairGeometry pair_geometry(const DataPoint& x, const DataPoint& x2,
                           const PhysicalParams& p) {
  PairGeometry g;
  g.frame_x = DriveFrame{x.omega_drive, p.detuning(x)};
  g.frame_y = DriveFrame{x2.omega_drive, p.detuning(x2)};
  g.t_x = x.time;
  g.t_y = x2.time;

  const DriveFrame::Coherent cx = g.frame_x.forward(g.t_x, {});
  const DriveFrame::Coherent cy = g.frame_y.forward(g.t_y, {});
  const Complex lab_x = std::exp(-kI * x.omega_laser * x.time);
  const Complex lab_y = std::exp(-kI * x2.omega_laser * x2.time);
  const Complex beta_x = cx.amp * lab_x;
  const Complex beta_y = cy.amp * lab_y;

  g.a0 = std::exp(kI * (cx.phase - cy.phase)) * coherent_overlap(beta_y, beta_x);
  g.separation_sq = std::norm(beta_x - beta_y);

  // x-side bra chain prefix: W_x(T_x)^dag P_x^dag P_y W_y(T_y) |0>.
  DriveFrame::Coherent c{};
  c = g.frame_y.forward(g.t_y, c);
  c.amp *= lab_y;
  c.amp *= std::conj(lab_x);
  g.prefix_x = g.frame_x.backward(g.t_x, c);

  // y-side ket chain prefix: W_y(T_y)^dag P_y^dag P_x W_x(T_x) |0>.
  c = DriveFrame::Coherent{};
  c = g.frame_x.forward(g.t_x, c);
  c.amp *= lab_x;
  c.amp *= std::conj(lab_y);
  g.prefix_y = g.frame_y.backward(g.t_y, c);

  return g;
}

// <bra(t)| b^dag b^dag b b |ket(t)> for coherent bra/ket.
static Complex pair_element(const DriveFrame::Coherent& bra,
                            const DriveFrame::Coherent& ket) {
  const Complex w = bra.amp;
  const Complex z = ket.amp;
  return std::exp(kI * (ket.phase - bra.phase)) * std::conj(w) * std::conj(w) *
         z * z * coherent_overlap(w, z);
}

Complex integrand_x(const PairGeometry& g, double t) {
  const DriveFrame::Coherent bra = g.frame_x.forward(t, g.prefix_x);
  const DriveFrame::Coherent ket = g.frame_x.forward(t, {});
  return pair_element(bra, ket);
}

Complex integrand_y(const PairGeometry& g, double s) {
  const DriveFrame::Coherent bra = g.frame_y.forward(s, {});
  const DriveFrame::Coherent ket = g.frame_y.forward(s, g.prefix_y);
  return pair_element(bra, ket);
}

double correction_slope(const PairGeometry& g, int nodes) {
  const GaussLegendre& rule = gauss_legendre_table(nodes);
  Complex sum_x = 0.0, sum_y = 0.0;
  if (g.t_x > 0.0)
    sum_x = gauss_legendre_integrate(
        [&g](double t) { return integrand_x(g, t); }, 0.0, g.t_x, rule);
  if (g.t_y > 0.0)
    sum_y = gauss_legendre_integrate(
        [&g](double s) { return integrand_y(g, s); }, 0.0, g.t_y, rule);
  // A1 = i * kerr * (sum_x - sum_y); slope = 2 Re(conj(a0) A1) / kerr.
  return -2.0 * std::imag(std::conj(g.a0) * (sum_x - sum_y));
}

}  // namespace detail

int suggested_quad_points(const DataPoint& x, const DataPoint& x2,
                          const PhysicalParams& p) {
  const detail::PairGeometry g = detail::pair_geometry(x, x2, p);
  const double sep = std::sqrt(g.separation_sq);
  // Instantaneous phase rate of either integrand is bounded by
  // sep * (|Delta||alpha| + O(Omega)) with |Delta||alpha| <= 2 Omega, plus
  // the carrier rotation |Delta|.  Budget = total accumulated phase.
  const double budget_x =
      std::abs(g.frame_x.detuning) * g.t_x +
      4.0 * std::abs(g.frame_x.omega_drive) * g.t_x * (1.0 + sep);
  const double budget_y =
      std::abs(g.frame_y.detuning) * g.t_y +
      4.0 * std::abs(g.frame_y.omega_drive) * g.t_y * (1.0 + sep);
  const double budget = std::max(budget_x, budget_y);
  const int wanted = static_cast<int>(std::ceil(48.0 + 0.5 * budget));
  return std::min(std::max(round_up_pow2(wanted), 64), kMaxNodes);
}

double perturbative_correction_coefficient(const DataPoint& x,
                                           const DataPoint& x2,
                                           const PhysicalParams& p,
                                           int quad_points) {
  if (x == x2) return 0.0;

  const detail::PairGeometry g = detail::pair_geometry(x, x2, p);
  if (g.separation_sq > kNegligibleSeparationSq) return 0.0;

  if (quad_points > 0) {
    if (quad_points < 16)
      throw std::invalid_argument(
          "perturbative_correction_coefficient: quad_points must be >= 16");
    if (2 * quad_points > kMaxNodes)
      throw ResourceLimit(
          "perturbative_correction_coefficient: node count exceeds cap");
    return slope_with_check(g, quad_points);
  }

  int nodes = suggested_quad_points(x, x2, p);
  while (true) {
    try {
      return slope_with_check(g, nodes);
    } catch (const QuadratureUnderResolved&) {
      if (2 * nodes >= kMaxNodes) throw;
      nodes *= 2;
    }
  }
}

PerturbativeKernelValue perturbative_kernel(const DataPoint& x,
                                            const DataPoint& x2,
                                            const PhysicalParams& p,
                                            int quad_points) {
  if (x == x2) return PerturbativeKernelValue{1.0, 0.0, p.kerr};
  const double zeroth = gaussian_kernel_zeroth(x, x2, p);
  const double slope =
      perturbative_correction_coefficient(x, x2, p, quad_points);
  return PerturbativeKernelValue{zeroth, p.kerr * slope, p.kerr};
}

RelativeErrorReport relative_error_report(std::span<const DataPoint> points,
                                          const PhysicalParams& p,
                                          TruncationStats* stats,
                                          bool parallel) {
  const int n = static_cast<int>(points.size());
  if (n < 1)
    throw std::invalid_argument("relative_error_report: empty dataset");

  const StateVector initial = StateVector::vacuum(p.space);
  const std::vector<EvolutionResult> evolved =
      evolve_all(points, p, initial, parallel);

  RelativeErrorReport report;
  std::vector<std::pair<int, int>> included;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (i != j &&
          fidelity_from_states(evolved[i], evolved[j], stats) < 1e-10) {
        ++report.excluded_pairs;
        continue;
      }
      included.emplace_back(i, j);
    }
  }

  const int m = static_cast<int>(included.size());
  report.records.resize(m);

  std::exception_ptr error = nullptr;
  std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int k = 0; k < m; ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const auto [i, j] = included[k];
      RelativeErrorRecord rec;
      rec.index_i = i;
      rec.index_j = j;
      if (i == j) {
        rec.k_exact = 1.0;
        rec.k_pert = 1.0;
        rec.rel_error = 0.0;
      } else {
        rec.k_exact = fidelity_from_states(evolved[i], evolved[j], nullptr);
        rec.k_pert = perturbative_kernel(points[i], points[j], p).total();
        rec.rel_error = std::abs(rec.k_pert - rec.k_exact) / rec.k_exact;
      }
      report.records[k] = rec;
    } catch (...) {
#pragma omp critical(kerr_rel_err_report)
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);

  if (!report.records.empty()) {
    std::vector<double> errs;
    errs.reserve(report.records.size());
    for (const auto& r : report.records) errs.push_back(r.rel_error);
    std::sort(errs.begin(), errs.end());
    report.min_error = errs.front();
    report.max_error = errs.back();
    report.median_error = errs[errs.size() / 2];
  }
  return report;
}

}  // namespace kerr
