#include "kerrlearn/coherent.hpp"

#include <cmath>

namespace kerr {

namespace {

constexpr Complex kI{0.0, 1.0};

double sinc(double u) {
  if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

// g(u) = (u - sin u) / u^2, series below |u| = 0.5 to dodge cancellation.
double phase_kernel(double u) {
  if (std::abs(u) <= 0.5) {
    const double u2 = u * u;
    return u * (1.0 / 6.0 +
                u2 * (-1.0 / 120.0 +
                      u2 * (1.0 / 5040.0 +
                            u2 * (-1.0 / 362880.0 + u2 / 39916800.0))));
  }
  return (u - std::sin(u)) / (u * u);
}

}  // namespace

Complex DriveFrame::alpha(double t) const {
  const double half = 0.5 * detuning * t;
  return -kI * omega_drive * t * sinc(half) * std::exp(-kI * half);
}

double DriveFrame::theta(double t) const {
  return omega_drive * omega_drive * t * t * phase_kernel(detuning * t);
}

DriveFrame::Coherent DriveFrame::forward(double t, Coherent in) const {
  const Complex a = alpha(t);
  Coherent out;
  out.phase = in.phase + theta(t) + std::imag(in.amp * a);
  out.amp = in.amp * std::exp(-kI * detuning * t) + a;
  return out;
}

DriveFrame::Coherent DriveFrame::backward(double t, Coherent in) const {
  const Complex a = alpha(t);
  Coherent out;
  out.phase = in.phase - theta(t) + std::imag(in.amp * std::conj(a));
  out.amp = in.amp * std::exp(kI * detuning * t) + std::conj(a);
  return out;
}

Complex coherent_overlap(Complex w, Complex z) {
  return std::exp(-0.5 * std::norm(w) - 0.5 * std::norm(z) +
                  std::conj(w) * z);
}

CoherentAmplitude coherent_amplitude(const DataPoint& x,
                                     const PhysicalParams& p) {
  const DriveFrame frame{x.omega_drive, p.detuning(x)};
  const Complex a = frame.alpha(x.time);
  const Complex b = a * std::exp(-kI * x.omega_laser * x.time);
  return CoherentAmplitude{a, b};
}

double gaussian_kernel_zeroth(const DataPoint& x, const DataPoint& x2,
                              const PhysicalParams& p) {
  if (x == x2) return 1.0;
  const Complex beta = coherent_amplitude(x, p).beta;
  const Complex beta2 = coherent_amplitude(x2, p).beta;
  return std::exp(-std::norm(beta - beta2));
}

CVector coherent_state_amplitudes(const FockSpace& space, Complex z) {
  CVector c(space.dim);
  c[0] = std::exp(-0.5 * std::norm(z));
  for (int n = 1; n < space.dim; ++n) c[n] = c[n - 1] * z / std::sqrt(double(n));
  return c;
}

}  // namespace kerr
