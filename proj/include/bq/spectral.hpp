#pragma once

#include "bq/field.hpp"

namespace bq::spectral {

/// Forward transform; coefficients are divided by nx*ny.
SpectralField forward(const RealField& f);
/// Inverse transform. The Nyquist row/column is treated as real data.
RealField inverse(SpectralField f);

// Fourier multipliers acting directly on spectra. First derivatives zero the
// Nyquist modes so that their output stays real.
SpectralField dx(const SpectralField& f);
SpectralField dy(const SpectralField& f);
SpectralField laplacian(const SpectralField& f);
/// Zero mode of the result is set to 0.
SpectralField inverse_laplacian(const SpectralField& f);
/// Zeroes every mode with |m_x| > nx/3 or |m_y| > ny/3.
SpectralField dealias(SpectralField f);
bool is_dealiased(const SpectralField& f);
/// Keep only the x2-odd part; commutes with every multiplier above.
SpectralField odd_part(const SpectralField& f);

RealField partial_x(const RealField& f);
RealField partial_y(const RealField& f);
RealField laplacian(const RealField& f);
RealField inverse_laplacian(const RealField& f);

struct Velocity {
  RealField u1;
  RealField u2;
  /// Mean of the input vorticity, dropped by the inversion.
  double dropped_mean = 0.0;
};

/// u = grad^perp psi with psi = inverse_laplacian(omega), i.e.
/// u1 = -d2 psi and u2 = d1 psi.
Velocity biot_savart(const RealField& omega);
void biot_savart(const SpectralField& omega_hat, SpectralField& u1_hat, SpectralField& u2_hat);

/// Homogeneous Sobolev norm (sum_{k != 0} |k|^{2s} |c_k|^2 * lx*ly)^{1/2}.
/// With s = 0 this is the L2 norm of f - mean(f).
double hs_norm(const RealField& f, double s);
double hs_norm(const SpectralField& f, double s);
/// Squared variant, avoids the square root round trip.
double hs_norm_sq(const SpectralField& f, double s);

/// Sum over all modes of conj(a_k) b_k * lx*ly, i.e. the L2 inner product of
/// the represented functions.
double inner(const SpectralField& a, const SpectralField& b);

}  // namespace bq::spectral
