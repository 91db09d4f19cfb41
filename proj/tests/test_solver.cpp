#include <doctest.h>

#include "bq/contour.hpp"
#include "bq/diagnostics.hpp"
#include "bq/solver.hpp"
#include "bq/spectral.hpp"
#include "helpers.hpp"

using namespace bq;
using namespace bqtest;
namespace sp = bq::spectral;

namespace {

const Grid kGrid(128, 128, 8.0, 8.0);

Contour unit_disk(double b, std::size_t n = 256) { return make_unit_area_ellipse({4.0, b}, 1.0, n); }

bool exactly_odd(const RealField& f) {
  const Grid& g = f.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (f(i, g.mirror_row(j)) != -f(i, j)) return false;
  return true;
}

}  // namespace

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.nu = 0.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("nu"), std::invalid_argument);
  c = {};
  c.cfl = 1.5;
  CHECK_THROWS(c.validate());
}

TEST_CASE("seed state from a unit disk") {
  const double b = 1.5;
  const State s = seed_state(unit_disk(b), 0.0, ZeroVelocity{}, kGrid, 3 * kGrid.hx());
  CHECK(std::abs(integral(s.rho)) < 1e-12);
  CHECK(max_abs(s.omega) == 0.0);
  CHECK(exactly_odd(s.rho));
  // E_P of 1_D - 1_{D*} is 2 b |D|.
  const Energies e = energies(s, sp::biot_savart(s.omega));
  CHECK(e.E_P == doctest::Approx(2 * b).epsilon(1e-3));
}

TEST_CASE("seed state rejects invalid data") {
  const double eps = 3 * kGrid.hx();
  CHECK_THROWS(seed_state(unit_disk(0.6), 0.0, ZeroVelocity{}, kGrid, eps));  // touches the axis band
  CHECK_THROWS(seed_state(make_ellipse({4.0, 1.5}, 0.7, 0.7, 256), 0.0, ZeroVelocity{}, kGrid, eps));  // area
  CHECK_THROWS_WITH(seed_state(unit_disk(1.5), 0.0, ModeVelocity{0.1, 1, 1, false}, kGrid, eps),
                    doctest::Contains("parity"));
  // Even u2 breaks the parity contract.
  FieldVelocity bad{RealField(kGrid), sample(kGrid, [](double, double y) { return std::cos(2 * kPi * y / 8.0); })};
  CHECK_THROWS(seed_state(unit_disk(1.5), 0.0, bad, kGrid, eps));
  CHECK(velocity_class(ZeroVelocity{}) == "Cc-infinity");
  CHECK(velocity_class(ModeVelocity{}) == "H3");
}

TEST_CASE("lifting by height_offset") {
  const double eps = 3 * kGrid.hx();
  const State a = seed_state(unit_disk(1.0), 0.5, ZeroVelocity{}, kGrid, eps);
  const Energies e = energies(a, sp::biot_savart(a.omega));
  CHECK(e.E_P == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("right-hand side") {
  SolverConfig cfg;
  State zero{RealField(kGrid), RealField(kGrid), 0.0};
  const Rhs z = rhs(zero, cfg);
  CHECK(max_abs(z.d_omega) == 0.0);
  CHECK(max_abs(z.d_rho) == 0.0);
  CHECK(max_abs(z.u1) == 0.0);

  const State s = seed_state(unit_disk(1.5), 0.0, ZeroVelocity{}, kGrid, 3 * kGrid.hx());
  const Rhs r = rhs(s, cfg);
  CHECK(max_diff(r.d_omega, -1.0 * sp::partial_x(s.rho)) < 1e-12);
  CHECK(max_abs(r.d_rho) == 0.0);

  // With odd rho and odd omega both tendencies are odd.
  const State v = seed_state(unit_disk(1.5), 0.0, VortexPairVelocity{0.5, {3.5, 1.2}, 0.3}, kGrid, 3 * kGrid.hx());
  const Rhs q = rhs(v, cfg);
  CHECK(odd_parity_residual(q.d_omega) <= 1e-10);
  CHECK(odd_parity_residual(q.d_rho) <= 1e-10);
  CHECK(odd_parity_residual(v.omega) <= 1e-12);
}

TEST_CASE("viscous decay of a single mode is exact up to RK4 order") {
  SolverConfig cfg;
  cfg.nu = 0.05;
  cfg.enforce_symmetry = false;  // sin(k x1) is even in x2
  cfg.dt_max = 0.01;
  const Grid g(32, 32, 2 * kPi, 2 * kPi);
  const double k = 3.0;
  State s{RealField(g), sample(g, [&](double x, double) { return std::sin(k * x); }), 0.0};
  for (int n = 0; n < 100; ++n) s = step(s, 0.01, cfg);
  const double decay = std::exp(-cfg.nu * k * k * s.t);
  CHECK(s.t == doctest::Approx(1.0));
  CHECK(max_diff(s.omega, sample(g, [&](double x, double) { return decay * std::sin(k * x); })) <= 1e-8);
}

TEST_CASE("step consistency and refusal") {
  SolverConfig cfg;
  cfg.dt_max = 0.005;
  const State s = project(seed_state(unit_disk(1.5), 0.0, VortexPairVelocity{1.0, {4.0, 1.0}, 0.3}, kGrid,
                                     3 * kGrid.hx()),
                          cfg);
  const State a = step(s, 1e-8, cfg);
  CHECK(max_diff(a.omega, s.omega) < 1e-6 * max_abs(s.omega));
  CHECK(max_diff(a.omega, s.omega) > 0.0);
  CHECK(a.t == doctest::Approx(1e-8));
  CHECK_THROWS_AS(step(s, 10 * cfl_dt(s, cfg), cfg), SolverError);
  CHECK_THROWS_AS(step(s, 0.0, cfg), SolverError);

  // Determinism: identical inputs give bit-identical outputs.
  const State b = step(s, 1e-3, cfg), c = step(s, 1e-3, cfg);
  CHECK(b.omega.values == c.omega.values);
  CHECK(b.rho.values == c.rho.values);
  CHECK(exactly_odd(b.rho));
  CHECK(exactly_odd(b.omega));
}

TEST_CASE("cfl time step") {
  SolverConfig cfg;
  cfg.dt_max = 0.01;
  cfg.cfl = 0.5;
  const State zero{RealField(kGrid), RealField(kGrid), 0.0};
  CHECK(cfl_dt(zero, cfg) == cfg.dt_max);
  // u2 = cos(x1) has max |u| = 1; min spacing 0.01 gives 0.005.
  const Grid g(512, 512, 5.12, 5.12 * 2);
  const double k = 2 * kPi / g.lx;
  const State s{RealField(g), sample(g, [&](double x, double) { return -k * std::sin(k * x); }), 0.0};
  CHECK(cfl_dt(s, cfg) == doctest::Approx(0.005).epsilon(1e-9));
  cfg.dt_max = 0.001;
  CHECK(cfl_dt(s, cfg) == 0.001);
}

TEST_CASE("odd symmetry projection") {
  const RealField f = random_band_limited(kGrid, 4, 1);
  const RealField odd = enforce_odd_symmetry(f);
  CHECK(exactly_odd(odd));
  CHECK(enforce_odd_symmetry(odd).values == odd.values);
  const RealField even = sample(kGrid, [](double x, double y) { return std::cos(x) * std::cos(2 * kPi * y / 8.0); });
  CHECK(max_abs(enforce_odd_symmetry(even)) == 0.0);
  CHECK(odd_parity_residual(odd) == 0.0);
  CHECK(odd_parity_residual(even) == doctest::Approx(2.0));
}

TEST_CASE("potential energy rate matches the integral of rho u2") {
  // A centred finite difference of E_P over a short nonlinear run.
  SolverConfig cfg;
  cfg.dt_max = 0.005;
  State s = project(seed_state(unit_disk(1.5), 0.0, ZeroVelocity{}, kGrid, 3 * kGrid.hx()), cfg);
  for (int n = 0; n < 40; ++n) s = step(s, 0.005, cfg);
  const double h = 0.0025;
  const State minus = s;
  const State mid = step(minus, h, cfg);
  const State plus = step(mid, h, cfg);
  auto ep = [](const State& x) { return energies(x, sp::biot_savart(x.omega)).E_P; };
  const double fd = (ep(plus) - ep(minus)) / (2 * h);
  const double rate = energies(mid, sp::biot_savart(mid.omega)).ep_prime;
  CHECK(std::abs(fd - rate) <= 1e-5 * std::abs(rate));
}

TEST_CASE("stream sampler reproduces spectral velocity at nodes and is divergence free") {
  const State v = seed_state(unit_disk(1.5), 0.0, VortexPairVelocity{0.5, {3.5, 1.2}, 0.3}, kGrid, 3 * kGrid.hx());
  const SpectralField wh = sp::forward(v.omega);
  const StreamSampler s(wh);
  const auto u = sp::biot_savart(v.omega);
  double err = 0.0;
  for (int j = 0; j < kGrid.ny; j += 5)
    for (int i = 0; i < kGrid.nx; i += 5) {
      const Vec2 q = s({kGrid.x1(i), kGrid.x2(j)});
      err = std::max({err, std::abs(q.x - u.u1(i, j)), std::abs(q.y - u.u2(i, j))});
    }
  CHECK(err < 1e-12);
  // Off-grid divergence by central differences of the sampled field.
  const double d = 1e-6;
  for (Vec2 p : {Vec2{3.31, 1.07}, Vec2{4.77, -0.52}, Vec2{0.013, 3.9}}) {
    const double div = (s(p + Vec2{d, 0}).x - s(p - Vec2{d, 0}).x + s(p + Vec2{0, d}).y - s(p - Vec2{0, d}).y) / (2 * d);
    CHECK(std::abs(div) < 1e-6);
  }
}
