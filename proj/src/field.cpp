#include "bq/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bq {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("field grids differ");
}

}  // namespace

Grid::Grid(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
  if (nx < 8 || ny < 8 || !is_power_of_two(nx) || !is_power_of_two(ny))
    throw std::invalid_argument("grid cell counts must be powers of two >= 8, got " +
                                std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw std::invalid_argument("grid side lengths must be positive and finite");
}


RealField& RealField::operator+=(const RealField& o) {
  require_same_grid(grid, o.grid);
  for (std::size_t n = 0; n < values.size(); ++n) values[n] += o.values[n];
  return *this;
}

RealField& RealField::operator-=(const RealField& o) {
  require_same_grid(grid, o.grid);
  for (std::size_t n = 0; n < values.size(); ++n) values[n] -= o.values[n];
  return *this;
}

RealField& RealField::operator*=(double c) {
  for (double& v : values) v *= c;
  return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double c, RealField a) { return a *= c; }

RealField operator*(const RealField& a, const RealField& b) {
  require_same_grid(a.grid, b.grid);
  RealField out(a.grid);
  for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] = a.values[n] * b.values[n];
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid, o.grid);
  for (std::size_t n = 0; n < coeffs.size(); ++n) coeffs[n] += o.coeffs[n];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid, o.grid);
  for (std::size_t n = 0; n < coeffs.size(); ++n) coeffs[n] -= o.coeffs[n];
  return *this;
}

SpectralField& SpectralField::operator*=(double c) {
  for (auto& v : coeffs) v *= c;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double c, SpectralField a) { return a *= c; }

double integral(const RealField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_area();
}

double mean(const RealField& f) { return integral(f) / (f.grid.lx * f.grid.ly); }

double inner(const RealField& a, const RealField& b) {
  require_same_grid(a.grid, b.grid);
  double s = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) s += a.values[n] * b.values[n];
  return s * a.grid.cell_area();
}

double l2_norm(const RealField& f) { return std::sqrt(inner(f, f)); }

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const RealField& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace bq
