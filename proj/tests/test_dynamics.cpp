#include <cmath>
#include <random>

#include <doctest.h>

#include "kerrlearn/coherent.hpp"
#include "kerrlearn/dynamics.hpp"

using namespace kerr;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

struct Uniform {
  std::mt19937_64 eng;
  explicit Uniform(std::uint64_t seed) : eng(seed) {}
  double operator()(double hi = 1.0) {
    return double(eng() >> 11) * 0x1.0p-53 * hi;
  }
};

}  // namespace

TEST_CASE("rotating hamiltonian entries, hand-checked three-level case") {
  // omega_m - omega_L = 2 pi, drive 1, two-particle coefficient 1/2:
  // diag(0, 2pi, 4pi - 1), off-diagonals 1 and sqrt(2).
  const PhysicalParams p(kTwoPi * 10.0, 0.5, FockSpace(3));
  const DataPoint x(1.0, kTwoPi * 10.0 - kTwoPi, 0.01);
  const CMatrix h = rotating_hamiltonian(x, p).entries();

  CHECK(std::abs(h(0, 0)) < 1e-12);
  CHECK(std::abs(h(1, 1) - kTwoPi) < 1e-12);
  CHECK(std::abs(h(2, 2) - (2.0 * kTwoPi - 1.0)) < 1e-12);
  CHECK(std::abs(h(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(h(1, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(h(1, 0) - 1.0) < 1e-15);
  CHECK(std::abs(h(0, 2)) == 0.0);
}

TEST_CASE("rotating hamiltonian vanishes with no drive, detuning, or kerr") {
  const PhysicalParams p(kTwoPi * 1e4, 0.0, FockSpace(8));
  const DataPoint x(0.0, kTwoPi * 1e4, 0.02);
  CHECK(rotating_hamiltonian(x, p).entries().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero-time evolution returns the initial state unchanged") {
  const PhysicalParams p(kTwoPi * 1e4, kTwoPi * 5.0, FockSpace(20));
  const DataPoint x(kTwoPi * 100.0, kTwoPi * 9e3, 0.0);
  const StateVector initial = StateVector::fock_basis(p.space, 3);
  const EvolutionResult r = evolve(x, p, initial);
  CHECK((r.state.amplitudes() - initial.amplitudes()).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("vacuum is stationary without a drive") {
  const PhysicalParams p(kTwoPi * 1e4, kTwoPi * 12.0, FockSpace(30));
  const DataPoint x(0.0, kTwoPi * 4e3, 0.037);
  const EvolutionResult r = evolve(x, p, StateVector::vacuum(p.space));
  CHECK(std::abs(std::abs(r.state.amplitudes()[0]) - 1.0) < 1e-12);
  CHECK(r.top_leakage < 1e-15);
}

TEST_CASE("kerr-free evolution lands on the closed-form coherent state") {
  const PhysicalParams p(kTwoPi * 1e4, 0.0, FockSpace(60));
  const StateVector vacuum = StateVector::vacuum(p.space);

  SUBCASE("generic detuned point") {
    const DataPoint x(kTwoPi * 10.0, kTwoPi * 1e4 - kTwoPi * 100.0, 0.0037);
    const EvolutionResult r = evolve(x, p, vacuum);
    const Complex beta = coherent_amplitude(x, p).beta;
    CHECK(std::abs(beta) > 0.01);  // non-degenerate case
    const CVector analytic = coherent_state_amplitudes(p.space, beta);
    const Complex overlap = analytic.dot(r.state.amplitudes());
    CHECK(std::abs(overlap) >= 1.0 - 1e-8);

    double mean_n = 0.0;
    for (int n = 0; n < p.space.dim; ++n)
      mean_n += double(n) * std::norm(r.state.amplitudes()[n]);
    CHECK(std::abs(mean_n - std::norm(beta)) < 1e-8);
  }

  SUBCASE("full-period detuning returns to the vacuum") {
    // Delta T = 2 pi exactly: the displacement closes its loop.
    const DataPoint x(kTwoPi * 10.0, kTwoPi * 1e4 - kTwoPi * 100.0, 0.01);
    CHECK(std::abs(coherent_amplitude(x, p).alpha) < 1e-12);
    const EvolutionResult r = evolve(x, p, vacuum);
    CHECK(std::abs(std::abs(r.state.amplitudes()[0]) - 1.0) < 1e-8);
  }

  SUBCASE("resonant drive displaces to -i Omega T") {
    const DataPoint x(kTwoPi * 20.0, kTwoPi * 1e4, 0.01);  // Delta = 0
    const Complex alpha = coherent_amplitude(x, p).alpha;
    CHECK(std::abs(alpha - Complex(0.0, -kTwoPi * 0.2)) < 1e-10);
    const EvolutionResult r = evolve(x, p, vacuum);
    double mean_n = 0.0;
    for (int n = 0; n < p.space.dim; ++n)
      mean_n += double(n) * std::norm(r.state.amplitudes()[n]);
    CHECK(std::abs(mean_n - std::norm(alpha)) < 1e-8);
  }
}

TEST_CASE("evolution is unitary across random parameters") {
  Uniform u(42);
  const PhysicalParams p(kTwoPi * 1e4, kTwoPi * 3.0, FockSpace(40));
  for (int k = 0; k < 10; ++k) {
    const DataPoint x(u(kTwoPi * 300.0), u(kTwoPi * 1e4), u(0.05));
    const EvolutionResult r = evolve(x, p, StateVector::vacuum(p.space));
    CHECK(std::abs(r.state.amplitudes().norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("fidelity kernel basics") {
  const PhysicalParams p(kTwoPi * 1e4, kTwoPi * 2.0, FockSpace(30));
  const StateVector vacuum = StateVector::vacuum(p.space);

  SUBCASE("identical inputs give exactly one") {
    const DataPoint x(kTwoPi * 50.0, kTwoPi * 8e3, 0.021);
    CHECK(fidelity_kernel(x, x, p, vacuum) == 1.0);
  }

  SUBCASE("undriven pairs never leave the vacuum") {
    const DataPoint x(0.0, kTwoPi * 8e3, 0.021);
    const DataPoint y(0.0, kTwoPi * 3e3, 0.004);
    CHECK(std::abs(fidelity_kernel(x, y, p, vacuum) - 1.0) < 1e-12);
  }

  SUBCASE("symmetric, bounded on random pairs") {
    Uniform u(7);
    for (int k = 0; k < 8; ++k) {
      const DataPoint x(u(kTwoPi * 300.0), u(kTwoPi * 1e4), u(0.05));
      const DataPoint y(u(kTwoPi * 300.0), u(kTwoPi * 1e4), u(0.05));
      const double kxy = fidelity_kernel(x, y, p, vacuum);
      const double kyx = fidelity_kernel(y, x, p, vacuum);
      CHECK(kxy == kyx);
      CHECK(kxy >= 0.0);
      CHECK(kxy <= 1.0);
    }
  }
}

TEST_CASE("lab-frame factor cancels for matched drive frequency and time") {
  const PhysicalParams p(kTwoPi * 1e4, kTwoPi * 7.0, FockSpace(40));
  const StateVector vacuum = StateVector::vacuum(p.space);
  const double omega_l = kTwoPi * 6.5e3;
  const double t = 0.013;

  const DataPoint x(kTwoPi * 120.0, omega_l, t);
  const DataPoint y(kTwoPi * 45.0, omega_l, t);

  const EvolutionResult lab_x = evolve(x, p, vacuum);
  const EvolutionResult lab_y = evolve(y, p, vacuum);
  const EvolutionResult rot_x = evolve_rotating_frame(x, p, vacuum);
  const EvolutionResult rot_y = evolve_rotating_frame(y, p, vacuum);

  const double k_lab = fidelity_from_states(lab_x, lab_y);
  const double k_rot = fidelity_from_states(rot_x, rot_y);
  CHECK(std::abs(k_lab - k_rot) < 1e-12);

  // With unequal times the diagonal factor no longer drops out.
  const PhysicalParams p0(kTwoPi * 1e4, 0.0, FockSpace(40));
  const DataPoint a(kTwoPi * 100.0, kTwoPi * 5e3, 5e-5);
  const DataPoint b(kTwoPi * 100.0, kTwoPi * 5e3, 1e-4);
  const double k_lab2 = fidelity_from_states(evolve(a, p0, vacuum),
                                             evolve(b, p0, vacuum));
  const double k_rot2 =
      fidelity_from_states(evolve_rotating_frame(a, p0, vacuum),
                           evolve_rotating_frame(b, p0, vacuum));
  CHECK(std::abs(k_lab2 - k_rot2) > 1e-9);
}

TEST_CASE("kernel converges in the truncation for non-leaking points") {
  // Moderate drive keeps the coherent support well inside dim = 60.
  const DataPoint x(kTwoPi * 40.0, kTwoPi * 9.5e3, 0.011);
  const DataPoint y(kTwoPi * 55.0, kTwoPi * 9.7e3, 0.023);

  const PhysicalParams p_small(kTwoPi * 1e4, kTwoPi * 1.0, FockSpace(60));
  const PhysicalParams p_large(kTwoPi * 1e4, kTwoPi * 1.0, FockSpace(120));

  TruncationStats stats{1e-6, {}};
  const double k_small =
      fidelity_kernel(x, y, p_small, StateVector::vacuum(p_small.space), &stats);
  CHECK(stats.warnings.load() == 0);  // precondition of the comparison
  const double k_large =
      fidelity_kernel(x, y, p_large, StateVector::vacuum(p_large.space));
  CHECK(std::abs(k_small - k_large) < 1e-6);
}

TEST_CASE("truncation warnings fire when population reaches the top band") {
  const PhysicalParams p(kTwoPi * 1e4, 0.0, FockSpace(20));
  const StateVector vacuum = StateVector::vacuum(p.space);
  // Resonant drive to |alpha| ~ 4: mean occupation 16, a heavy tail in the
  // top tenth of a 20-level box.
  const DataPoint hot(kTwoPi * 128.0, kTwoPi * 1e4, 0.005);
  const DataPoint cold(kTwoPi * 2.0, kTwoPi * 1e4, 0.001);

  TruncationStats stats{1e-6, {}};
  fidelity_kernel(hot, cold, p, vacuum, &stats);
  CHECK(stats.warnings.load() == 1);

  TruncationStats quiet{1e-6, {}};
  fidelity_kernel(cold, cold, p, vacuum, &quiet);
  CHECK(quiet.warnings.load() == 0);
}

TEST_CASE("two-level limit matches the full simulator at large kerr") {
  // Kerr shift >> drive: levels above the first are frozen out.
  const double kerr = kTwoPi * 1e4;
  const PhysicalParams p(kTwoPi * 1e4, kerr, FockSpace(20));
  const StateVector vacuum = StateVector::vacuum(p.space);

  Uniform u(99);
  for (int k = 0; k < 20; ++k) {
    const DataPoint x(kTwoPi * 10.0, u(2.0 * kTwoPi * 1e4), u(0.05));
    const DataPoint y(kTwoPi * 10.0, u(2.0 * kTwoPi * 1e4), u(0.05));
    const double full = fidelity_kernel(x, y, p, vacuum);
    const double two_level = qubit_limit_kernel(x, y, p);
    CHECK(std::abs(full - two_level) < 1e-3);
  }
}

TEST_CASE("evolve_all matches single evolution bitwise, serial or parallel") {
  const PhysicalParams p(kTwoPi * 1e4, kTwoPi * 4.0, FockSpace(24));
  const StateVector vacuum = StateVector::vacuum(p.space);
  Uniform u(123);
  std::vector<DataPoint> points;
  for (int k = 0; k < 6; ++k)
    points.emplace_back(u(kTwoPi * 300.0), u(kTwoPi * 1e4), u(0.05));

  const auto parallel = evolve_all(points, p, vacuum, true);
  const auto serial = evolve_all(points, p, vacuum, false);
  REQUIRE(parallel.size() == points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const EvolutionResult single = evolve(points[i], p, vacuum);
    CHECK((parallel[i].state.amplitudes() - single.state.amplitudes())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((serial[i].state.amplitudes() - single.state.amplitudes())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(parallel[i].top_leakage == single.top_leakage);
  }

  const StateVector wrong_dim = StateVector::vacuum(FockSpace(10));
  CHECK_THROWS_AS(evolve_all(points, p, wrong_dim, true), DimensionMismatch);
}
