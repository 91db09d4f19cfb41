#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "bq/field.hpp"

namespace bqtest {

inline constexpr double kPi = std::numbers::pi;

/// Sum of random Fourier modes with |mx|, |my| <= kmax.
inline bq::RealField random_band_limited(const bq::Grid& g, int kmax, unsigned seed, bool zero_mean = true) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * kPi);
  bq::RealField f(g);
  for (int my = -kmax; my <= kmax; ++my)
    for (int mx = 0; mx <= kmax; ++mx) {
      if (mx == 0 && my <= 0 && !(my == 0 && !zero_mean)) continue;
      const double a = amp(rng), ph = phase(rng);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
          f(i, j) += a * std::cos(2 * kPi * mx * g.x1(i) / g.lx + 2 * kPi * my * g.x2(j) / g.ly + ph);
    }
  return f;
}

template <class F>
bq::RealField sample(const bq::Grid& g, F fn) {
  bq::RealField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = fn(g.x1(i), g.x2(j));
  return f;
}

inline double max_diff(const bq::RealField& a, const bq::RealField& b) { return bq::max_abs(a - b); }

}  // namespace bqtest
