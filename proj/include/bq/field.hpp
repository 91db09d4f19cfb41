#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <numbers>
#include <vector>

namespace bq {

/// 64-byte aligned storage so FFT kernels can use their SIMD code paths.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
  void deallocate(T* p, std::size_t) { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

/// Periodic computational domain [0, lx) x [-ly/2, ly/2).
///
/// Node (i, j) sits at x1 = i*hx, x2 = -ly/2 + j*hy, so row j = ny/2 is the
/// symmetry axis x2 = 0 and row 0 is the periodic seam.
struct Grid {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;

  Grid() = default;
  Grid(int nx_, int ny_, double lx_, double ly_);

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  /// Number of stored complex coefficients per row of a real-to-complex layout.
  int nxh() const { return nx / 2 + 1; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(nxh()) * ny; }

  double x1(int i) const { return i * hx(); }
  double x2(int j) const { return -0.5 * ly + j * hy(); }
  int axis_row() const { return ny / 2; }
  /// Row holding the mirror image x2 -> -x2 of row j.
  int mirror_row(int j) const { return (ny - j) % ny; }

  /// Signed mode indices in FFT ordering.
  int mode_x(int i) const { return i; }
  int mode_y(int j) const { return j <= ny / 2 ? j : j - ny; }
  double kx(int i) const { return 2.0 * std::numbers::pi / lx * mode_x(i); }
  double ky(int j) const { return 2.0 * std::numbers::pi / ly * mode_y(j); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  std::size_t spectral_index(int i, int j) const { return static_cast<std::size_t>(j) * nxh() + i; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Real scalar field sampled on grid nodes, row-major with x1 fastest.
struct RealField {
  Grid grid;
  AlignedVector<double> values;

  RealField() = default;
  explicit RealField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator()(int i, int j) { return values[grid.index(i, j)]; }
  double operator()(int i, int j) const { return values[grid.index(i, j)]; }

  RealField& operator+=(const RealField& o);
  RealField& operator-=(const RealField& o);
  RealField& operator*=(double c);
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double c, RealField a);
/// Pointwise product.
RealField operator*(const RealField& a, const RealField& b);

/// Fourier coefficients of a real field in real-to-complex layout.
///
/// Coefficients are normalized so that f(x) = sum_k c_k exp(i k.(x - x0)),
/// with x0 the grid origin. Only kx >= 0 is stored; the rest follows from
/// conjugate symmetry.
struct SpectralField {
  Grid grid;
  AlignedVector<std::complex<double>> coeffs;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), coeffs(g.spectral_size()) {}

  std::complex<double>& operator()(int i, int j) { return coeffs[grid.spectral_index(i, j)]; }
  std::complex<double> operator()(int i, int j) const { return coeffs[grid.spectral_index(i, j)]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double c);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double c, SpectralField a);

// Grid reductions. Integrals use the node (trapezoid) rule, which is
// spectrally accurate for periodic fields.
double integral(const RealField& f);
double mean(const RealField& f);
double inner(const RealField& a, const RealField& b);
double l2_norm(const RealField& f);
double max_abs(const RealField& f);
bool all_finite(const RealField& f);

}  // namespace bq
