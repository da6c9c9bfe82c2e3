#pragma once

#include "kerrlearn/dynamics.hpp"
#include "kerrlearn/fock.hpp"

namespace kerr {

// Closed-form dynamics of the harmonic part of the model,
//   H_lin = Delta n + Omega (b + b^dag),
// in the frame rotating at the drive.  Its propagator W(t) = exp(-i H_lin t)
// maps coherent states to coherent states:
//
//   W(t) e^{i phi} |z>  =  e^{i (phi + theta(t) + Im(z alpha(t)))}
//                          | z e^{-i Delta t} + alpha(t) >
//
// with displacement  alpha(t) = (Omega/Delta)(e^{-i Delta t} - 1)
//                             = -i Omega t sinc(Delta t / 2) e^{-i Delta t/2}
// and dynamical phase theta(t) = Omega^2 t^2 g(Delta t),
//                        g(u) = (u - sin u)/u^2.
// Both closed forms stay accurate through Delta -> 0 (series branches).
struct DriveFrame {
  double omega_drive;  // Omega, rad/us
  double detuning;     // Delta = omega_mode - omega_laser, rad/us

  Complex alpha(double t) const;
  double theta(double t) const;

  // A coherent state carried with its accumulated phase: e^{i phase}|amp>.
  struct Coherent {
    double phase = 0.0;
    Complex amp = 0.0;
  };

  Coherent forward(double t, Coherent in) const;   // apply W(t)
  Coherent backward(double t, Coherent in) const;  // apply W(t)^dag
};

// <w|z> = exp(-|w|^2/2 - |z|^2/2 + conj(w) z).
Complex coherent_overlap(Complex w, Complex z);

// Rotating-frame displacement alpha(T) reached from vacuum and its lab-frame
// counterpart beta = alpha e^{-i omega_L T}.
struct CoherentAmplitude {
  Complex alpha;
  Complex beta;
};

CoherentAmplitude coherent_amplitude(const DataPoint& x,
                                     const PhysicalParams& p);

// Kernel of the Kerr-free model: exp(-|beta - beta2|^2).
double gaussian_kernel_zeroth(const DataPoint& x, const DataPoint& x2,
                              const PhysicalParams& p);

// The Fock-basis amplitudes of |z>, truncated: c_n = e^{-|z|^2/2} z^n/sqrt(n!).
// Not normalized after truncation; callers decide how to treat the tail.
CVector coherent_state_amplitudes(const FockSpace& space, Complex z);

}  // namespace kerr
