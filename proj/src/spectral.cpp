#include "bq/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace bq::spectral {

namespace {

/// FFTW plans for one grid shape. Plans are created once under a lock and
/// executed through the new-array interface, which is thread safe.
struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

const Plans& plans_for(const Grid& g) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, Plans> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(g.nx, g.ny);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  double* real = fftw_alloc_real(g.size());
  fftw_complex* cplx = fftw_alloc_complex(g.spectral_size());
  Plans p;
  // ESTIMATE keeps plan selection, and hence round-off, independent of timing.
  const unsigned flags = FFTW_ESTIMATE;
  p.r2c = fftw_plan_dft_r2c_2d(g.ny, g.nx, real, cplx, flags);
  p.c2r = fftw_plan_dft_c2r_2d(g.ny, g.nx, cplx, real, flags);
  fftw_free(real);
  fftw_free(cplx);
  if (p.r2c == nullptr || p.c2r == nullptr) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(key, p).first->second;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

/// Wavenumbers with the Nyquist entries zeroed, as used by first derivatives.
struct Wavenumbers {
  std::vector<double> kx, ky;
};

Wavenumbers derivative_wavenumbers(const Grid& g) {
  Wavenumbers w{std::vector<double>(g.nxh()), std::vector<double>(g.ny)};
  for (int i = 0; i < g.nxh(); ++i) w.kx[i] = i == g.nx / 2 ? 0.0 : g.kx(i);
  for (int j = 0; j < g.ny; ++j) w.ky[j] = j == g.ny / 2 ? 0.0 : g.ky(j);
  return w;
}

/// out = (i k) * f with k given per stored mode; written out to avoid the
/// generic complex product.
template <class K>
SpectralField times_ik(const SpectralField& f, K&& k) {
  const Grid& g = f.grid;
  SpectralField out(g);
  const int nxh = g.nxh();
  for (int j = 0; j < g.ny; ++j) {
    const std::complex<double>* src = f.coeffs.data() + static_cast<std::size_t>(j) * nxh;
    std::complex<double>* dst = out.coeffs.data() + static_cast<std::size_t>(j) * nxh;
    for (int i = 0; i < nxh; ++i) {
      const double kk = k(i, j);
      dst[i] = {-kk * src[i].imag(), kk * src[i].real()};
    }
  }
  return out;
}

template <class M>
SpectralField times_real(const SpectralField& f, M&& m) {
  const Grid& g = f.grid;
  SpectralField out(g);
  const int nxh = g.nxh();
  for (int j = 0; j < g.ny; ++j) {
    const std::complex<double>* src = f.coeffs.data() + static_cast<std::size_t>(j) * nxh;
    std::complex<double>* dst = out.coeffs.data() + static_cast<std::size_t>(j) * nxh;
    for (int i = 0; i < nxh; ++i) {
      const double mm = m(i, j);
      dst[i] = {mm * src[i].real(), mm * src[i].imag()};
    }
  }
  return out;
}

/// Multiplicity of a stored coefficient in the full spectrum.
double half_weight(const Grid& g, int i) { return (i == 0 || i == g.nx / 2) ? 1.0 : 2.0; }

}  // namespace

SpectralField forward(const RealField& f) {
  const Grid& g = f.grid;
  SpectralField out(g);
  // Out-of-place r2c leaves its input intact.
  fftw_execute_dft_r2c(plans_for(g).r2c, const_cast<double*>(f.values.data()), as_fftw(out.coeffs.data()));
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out.coeffs) c *= scale;
  return out;
}

RealField inverse(SpectralField f) {
  const Grid& g = f.grid;
  RealField out(g);
  // c2r overwrites its input, which is our own copy.
  fftw_execute_dft_c2r(plans_for(g).c2r, as_fftw(f.coeffs.data()), out.values.data());
  return out;
}

SpectralField dx(const SpectralField& f) {
  const Wavenumbers k = derivative_wavenumbers(f.grid);
  return times_ik(f, [&](int i, int) { return k.kx[i]; });
}

SpectralField dy(const SpectralField& f) {
  const Wavenumbers k = derivative_wavenumbers(f.grid);
  return times_ik(f, [&](int, int j) { return k.ky[j]; });
}

SpectralField laplacian(const SpectralField& f) {
  const Grid& g = f.grid;
  return times_real(f, [&](int i, int j) { return -(g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j)); });
}

SpectralField inverse_laplacian(const SpectralField& f) {
  const Grid& g = f.grid;
  return times_real(f, [&](int i, int j) {
    const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
    return k2 == 0.0 ? 0.0 : -1.0 / k2;
  });
}

SpectralField dealias(SpectralField f) {
  const Grid& g = f.grid;
  const int cx = g.nx / 3, cy = g.ny / 3;
  for (int j = 0; j < g.ny; ++j) {
    const bool cut_row = std::abs(g.mode_y(j)) > cy;
    for (int i = 0; i < g.nxh(); ++i)
      if (cut_row || i > cx) f(i, j) = 0.0;
  }
  return f;
}

bool is_dealiased(const SpectralField& f) {
  const Grid& g = f.grid;
  const int cx = g.nx / 3, cy = g.ny / 3;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nxh(); ++i)
      if ((std::abs(g.mode_y(j)) > cy || i > cx) && f(i, j) != std::complex<double>{}) return false;
  return true;
}

SpectralField odd_part(const SpectralField& f) {
  const Grid& g = f.grid;
  SpectralField out(g);
  for (int j = 0; j < g.ny; ++j) {
    const int jm = g.mirror_row(j);
    for (int i = 0; i < g.nxh(); ++i) out(i, j) = 0.5 * (f(i, j) - f(i, jm));
  }
  return out;
}

RealField partial_x(const RealField& f) { return inverse(dx(forward(f))); }
RealField partial_y(const RealField& f) { return inverse(dy(forward(f))); }
RealField laplacian(const RealField& f) { return inverse(laplacian(forward(f))); }
RealField inverse_laplacian(const RealField& f) { return inverse(inverse_laplacian(forward(f))); }

void biot_savart(const SpectralField& omega_hat, SpectralField& u1_hat, SpectralField& u2_hat) {
  const Grid& g = omega_hat.grid;
  const Wavenumbers k = derivative_wavenumbers(g);
  // u1 = -d2 psi, u2 = d1 psi with psi = lap^-1 omega, in one multiplier each.
  auto inv_k2 = [&](int i, int j) {
    const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
    return k2 == 0.0 ? 0.0 : 1.0 / k2;
  };
  u1_hat = times_ik(omega_hat, [&](int i, int j) { return k.ky[j] * inv_k2(i, j); });
  u2_hat = times_ik(omega_hat, [&](int i, int j) { return -k.kx[i] * inv_k2(i, j); });
}

Velocity biot_savart(const RealField& omega) {
  const SpectralField w = forward(omega);
  SpectralField u1, u2;
  biot_savart(w, u1, u2);
  return {inverse(u1), inverse(u2), w(0, 0).real()};
}

double hs_norm_sq(const SpectralField& f, double s) {
  const Grid& g = f.grid;
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nxh(); ++i) {
      const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
      if (k2 == 0.0) continue;
      const double w = s == 0.0 ? 1.0 : s == 1.0 ? k2 : s == -1.0 ? 1.0 / k2 : s == -2.0 ? 1.0 / (k2 * k2) : std::pow(k2, s);
      sum += half_weight(g, i) * w * std::norm(f(i, j));
    }
  return sum * g.lx * g.ly;
}

double hs_norm(const SpectralField& f, double s) { return std::sqrt(hs_norm_sq(f, s)); }

double hs_norm(const RealField& f, double s) {
  if (s < -2.0 || s > 2.0) throw std::invalid_argument("hs_norm order must lie in [-2, 2]");
  return hs_norm(forward(f), s);
}

double inner(const SpectralField& a, const SpectralField& b) {
  const Grid& g = a.grid;
  if (!(g == b.grid)) throw std::invalid_argument("spectral grids differ");
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nxh(); ++i)
      sum += half_weight(g, i) * (std::conj(a(i, j)) * b(i, j)).real();
  return sum * g.lx * g.ly;
}

}  // namespace bq::spectral
