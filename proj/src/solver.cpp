#include "bq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bq/spectral.hpp"

namespace bq {

namespace sp = spectral;

void SolverConfig::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("solver.nu must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("solver.cfl must lie in (0, 1]");
  if (!(dt_max > 0.0)) throw std::invalid_argument("solver.dt_max must be > 0");
}

std::string velocity_class(const VelocityRecipe& r) {
  return std::holds_alternative<ZeroVelocity>(r) ? "Cc-infinity" : "H3";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RealField psi_of(const VelocityRecipe& r, const Grid& g) {
  RealField psi(g);
  if (const auto* m = std::get_if<ModeVelocity>(&r)) {
    if (!m->odd_psi)
      throw std::invalid_argument("initial velocity violates parity: psi must be odd in x2");
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        psi(i, j) = m->amplitude * std::sin(kTwoPi * m->mx * g.x1(i) / g.lx) *
                    std::sin(kTwoPi * m->my * g.x2(j) / g.ly);
  } else if (const auto* v = std::get_if<VortexPairVelocity>(&r)) {
    if (!(v->center.y > 0.0)) throw std::invalid_argument("vortex pair center must lie above the axis");
    const double w2 = v->width * v->width;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double dx = g.x1(i) - v->center.x;
        dx -= g.lx * std::round(dx / g.lx);
        const double up = g.x2(j) - v->center.y, down = g.x2(j) + v->center.y;
        psi(i, j) = v->amplitude * (std::exp(-(dx * dx + up * up) / w2) - std::exp(-(dx * dx + down * down) / w2));
      }
  }
  return psi;
}

double parity_defect(const RealField& f, double sign) {
  const Grid& g = f.grid;
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) m = std::max(m, std::abs(f(i, j) - sign * f(i, g.mirror_row(j))));
  return m;
}

void require_finite(const SpectralField& f, const char* what) {
  for (const auto& c : f.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw SolverError(std::string("non-finite ") + what + " during step");
}

struct Tendency {
  SpectralField omega;
  SpectralField rho;
  double umax = 0.0;
};

Tendency nonlinear(const SpectralField& w, const SpectralField& r, bool dealias) {
  SpectralField u1h, u2h;
  sp::biot_savart(w, u1h, u2h);
  const RealField u1 = sp::inverse(u1h), u2 = sp::inverse(u2h);
  const RealField wx = sp::inverse(sp::dx(w)), wy = sp::inverse(sp::dy(w));
  const RealField rx = sp::inverse(sp::dx(r)), ry = sp::inverse(sp::dy(r));
  RealField adv_w(w.grid), adv_r(w.grid);
  double umax2 = 0.0;
  for (std::size_t n = 0; n < adv_w.values.size(); ++n) {
    adv_w.values[n] = u1.values[n] * wx.values[n] + u2.values[n] * wy.values[n];
    adv_r.values[n] = u1.values[n] * rx.values[n] + u2.values[n] * ry.values[n];
    umax2 = std::max(umax2, u1.values[n] * u1.values[n] + u2.values[n] * u2.values[n]);
  }
  SpectralField aw = sp::forward(adv_w), ar = sp::forward(adv_r);
  if (dealias) {
    aw = sp::dealias(std::move(aw));
    ar = sp::dealias(std::move(ar));
  }
  Tendency out{-1.0 * aw - sp::dx(r), -1.0 * ar, std::sqrt(umax2)};
  require_finite(out.omega, "vorticity tendency");
  require_finite(out.rho, "temperature tendency");
  return out;
}

/// exp(-nu |k|^2 dt / 2) and exp(-nu |k|^2 dt) per stored mode. The last
/// pair is kept per thread since most steps reuse dt_max.
struct ViscousFactors {
  Grid grid;
  double nu = 0.0, dt = 0.0;
  std::vector<double> half, full;
};

const ViscousFactors& viscous_factors(const Grid& g, double nu, double dt) {
  thread_local ViscousFactors cache;
  if (cache.grid == g && cache.nu == nu && cache.dt == dt && !cache.half.empty()) return cache;
  cache.grid = g;
  cache.nu = nu;
  cache.dt = dt;
  cache.half.assign(g.spectral_size(), 0.0);
  cache.full.assign(g.spectral_size(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nxh(); ++i) {
      const std::size_t n = g.spectral_index(i, j);
      cache.half[n] = std::exp(-nu * (g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j)) * 0.5 * dt);
      cache.full[n] = cache.half[n] * cache.half[n];
    }
  return cache;
}

SpectralField project_spectral(SpectralField f, const SolverConfig& cfg) {
  if (cfg.dealias) f = sp::dealias(std::move(f));
  if (cfg.enforce_symmetry) f = sp::odd_part(f);
  return f;
}

SpectralField scaled(const std::vector<double>& e, SpectralField f) {
  for (std::size_t n = 0; n < f.coeffs.size(); ++n) f.coeffs[n] *= e[n];
  return f;
}

}  // namespace

RealField initial_vorticity(const VelocityRecipe& r, const Grid& g) {
  if (const auto* f = std::get_if<FieldVelocity>(&r)) {
    if (!(f->u1.grid == g) || !(f->u2.grid == g))
      throw std::invalid_argument("initial velocity fields do not match the grid");
    const double scale = std::max({max_abs(f->u1), max_abs(f->u2), 1e-300});
    const double tol = 1e-10 * scale;
    if (parity_defect(f->u1, 1.0) > tol) throw std::invalid_argument("initial velocity violates parity: u1 must be even in x2");
    if (parity_defect(f->u2, -1.0) > tol) throw std::invalid_argument("initial velocity violates parity: u2 must be odd in x2");
    const RealField div = sp::partial_x(f->u1) + sp::partial_y(f->u2);
    const double hmax = 2.0 * std::numbers::pi * std::max(g.nx / g.lx, g.ny / g.ly);
    if (max_abs(div) > 1e-8 * scale * hmax)
      throw std::invalid_argument("initial velocity is not divergence-free");
    return enforce_odd_symmetry(sp::partial_x(f->u2) - sp::partial_y(f->u1));
  }
  if (std::holds_alternative<ZeroVelocity>(r)) return RealField(g);
  return enforce_odd_symmetry(sp::laplacian(psi_of(r, g)));
}

State seed_state(const Contour& patch, double height_offset, const VelocityRecipe& u0, const Grid& g,
                 double epsilon) {
  const Contour lifted = height_offset == 0.0 ? patch : patch.translated({0.0, height_offset});
  const double area = measure(lifted, false).area;
  if (std::abs(area - 1.0) > 1e-3) {
    std::ostringstream os;
    os << "patch area must be 1 within 1e-3, got " << area;
    throw std::invalid_argument(os.str());
  }
  State s;
  s.rho = rasterize(lifted, g, epsilon);
  s.omega = initial_vorticity(u0, g);
  s.t = 0.0;
  return s;
}

Rhs rhs(const State& s, const SolverConfig& cfg) {
  const SpectralField w = sp::forward(s.omega), r = sp::forward(s.rho);
  const Tendency t = nonlinear(w, r, cfg.dealias);
  SpectralField u1h, u2h;
  sp::biot_savart(w, u1h, u2h);
  return {sp::inverse(t.omega), sp::inverse(t.rho), sp::inverse(u1h), sp::inverse(u2h)};
}

double cfl_dt(const State& s, const SolverConfig& cfg) {
  const auto u = sp::biot_savart(s.omega);
  double umax = 0.0;
  for (std::size_t n = 0; n < u.u1.values.size(); ++n)
    umax = std::max(umax, u.u1.values[n] * u.u1.values[n] + u.u2.values[n] * u.u2.values[n]);
  umax = std::sqrt(umax);
  const double h = std::min(s.omega.grid.hx(), s.omega.grid.hy());
  return std::min(cfg.dt_max, cfg.cfl * h / std::max(umax, 1e-300));
}

RealField enforce_odd_symmetry(const RealField& f) {
  const Grid& g = f.grid;
  RealField out(g);
  for (int j = 0; j < g.ny; ++j) {
    const int jm = g.mirror_row(j);
    for (int i = 0; i < g.nx; ++i) out(i, j) = 0.5 * (f(i, j) - f(i, jm));
  }
  return out;
}

double odd_parity_residual(const RealField& f) {
  return parity_defect(f, -1.0) / std::max(max_abs(f), 1e-300);
}

State project(const State& s, const SolverConfig& cfg) {
  State out = s;
  if (cfg.dealias) {
    out.rho = sp::inverse(sp::dealias(sp::forward(s.rho)));
    out.omega = sp::inverse(sp::dealias(sp::forward(s.omega)));
  }
  if (cfg.enforce_symmetry) {
    out.rho = enforce_odd_symmetry(out.rho);
    out.omega = enforce_odd_symmetry(out.omega);
  }
  return out;
}

StepResult step_with_stages(const State& s, double dt, const SolverConfig& cfg) {
  if (!(dt > 0.0)) throw SolverError("time step must be positive");
  const Grid& g = s.omega.grid;
  const SpectralField w0 = sp::forward(s.omega), r0 = sp::forward(s.rho);
  require_finite(w0, "vorticity");
  require_finite(r0, "temperature");

  StepResult out;
  out.stage_omega[0] = w0;
  const Tendency a = nonlinear(w0, r0, cfg.dealias);
  // Same formula as cfl_dt, from the velocity the first stage already built.
  const double limit =
      std::min(cfg.dt_max, cfg.cfl * std::min(g.hx(), g.hy()) / std::max(a.umax, 1e-300));
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the CFL limit " << limit;
    throw SolverError(os.str());
  }
  const ViscousFactors& vf = viscous_factors(g, cfg.nu, dt);
  const auto& eh = vf.half;
  const auto& ef = vf.full;

  const SpectralField ehw0 = scaled(eh, w0);
  out.stage_omega[1] = ehw0 + (0.5 * dt) * scaled(eh, a.omega);
  const SpectralField r1 = r0 + (0.5 * dt) * a.rho;
  const Tendency b = nonlinear(out.stage_omega[1], r1, cfg.dealias);

  out.stage_omega[2] = ehw0 + (0.5 * dt) * b.omega;
  const SpectralField r2 = r0 + (0.5 * dt) * b.rho;
  const Tendency c = nonlinear(out.stage_omega[2], r2, cfg.dealias);

  out.stage_omega[3] = scaled(ef, w0) + dt * scaled(eh, c.omega);
  const SpectralField r3 = r0 + dt * c.rho;
  const Tendency d = nonlinear(out.stage_omega[3], r3, cfg.dealias);

  SpectralField w1 = scaled(ef, w0) + (dt / 6.0) * (scaled(ef, a.omega) + 2.0 * scaled(eh, b.omega + c.omega) + d.omega);
  SpectralField rn = r0 + (dt / 6.0) * (a.rho + 2.0 * (b.rho + c.rho) + d.rho);
  require_finite(w1, "vorticity");
  require_finite(rn, "temperature");

  // Project in spectral space; the physical odd projection afterwards makes
  // the parity exact on the grid without further transforms.
  out.state.omega = sp::inverse(project_spectral(std::move(w1), cfg));
  out.state.rho = sp::inverse(project_spectral(std::move(rn), cfg));
  if (cfg.enforce_symmetry) {
    out.state.omega = enforce_odd_symmetry(out.state.omega);
    out.state.rho = enforce_odd_symmetry(out.state.rho);
  }
  out.state.t = s.t + dt;
  return out;
}

State step(const State& s, double dt, const SolverConfig& cfg) { return step_with_stages(s, dt, cfg).state; }

// ---------------------------------------------------------------------------

StreamSampler::StreamSampler(const SpectralField& omega_hat) : grid_(omega_hat.grid) {
  const SpectralField psi = sp::inverse_laplacian(omega_hat);
  const SpectralField px = sp::dx(psi);
  psi_ = sp::inverse(psi);
  psi_x_ = sp::inverse(px);
  psi_y_ = sp::inverse(sp::dy(psi));
  psi_xy_ = sp::inverse(sp::dy(px));
}

Vec2 StreamSampler::operator()(Vec2 p) const {
  const Grid& g = grid_;
  const double hx = g.hx(), hy = g.hy();
  double fx = p.x / hx;
  double fy = (p.y + 0.5 * g.ly) / hy;
  const double cx = std::floor(fx), cy = std::floor(fy);
  const double a = fx - cx, b = fy - cy;
  auto wrap = [](long v, int n) { return static_cast<int>(((v % n) + n) % n); };
  const int i0 = wrap(static_cast<long>(cx), g.nx), i1 = (i0 + 1) % g.nx;
  const int j0 = wrap(static_cast<long>(cy), g.ny), j1 = (j0 + 1) % g.ny;

  // Cubic Hermite basis (value and derivative with respect to local coordinate).
  auto basis = [](double t, double out[4], double dout[4]) {
    const double t2 = t * t, t3 = t2 * t;
    out[0] = 2 * t3 - 3 * t2 + 1;  // value at 0
    out[1] = t3 - 2 * t2 + t;      // slope at 0
    out[2] = -2 * t3 + 3 * t2;     // value at 1
    out[3] = t3 - t2;              // slope at 1
    dout[0] = 6 * t2 - 6 * t;
    dout[1] = 3 * t2 - 4 * t + 1;
    dout[2] = -6 * t2 + 6 * t;
    dout[3] = 3 * t2 - 2 * t;
  };
  double ha[4], dha[4], hb[4], dhb[4];
  basis(a, ha, dha);
  basis(b, hb, dhb);

  double dpsi_da = 0.0, dpsi_db = 0.0;
  const int is[2] = {i0, i1}, js[2] = {j0, j1};
  for (int cxn = 0; cxn < 2; ++cxn)
    for (int cyn = 0; cyn < 2; ++cyn) {
      const int i = is[cxn], j = js[cyn];
      const double v = psi_(i, j), vx = psi_x_(i, j) * hx, vy = psi_y_(i, j) * hy,
                   vxy = psi_xy_(i, j) * hx * hy;
      const int av = 2 * cxn, as = 2 * cxn + 1, bv = 2 * cyn, bs = 2 * cyn + 1;
      dpsi_da += v * dha[av] * hb[bv] + vx * dha[as] * hb[bv] + vy * dha[av] * hb[bs] + vxy * dha[as] * hb[bs];
      dpsi_db += v * ha[av] * dhb[bv] + vx * ha[as] * dhb[bv] + vy * ha[av] * dhb[bs] + vxy * ha[as] * dhb[bs];
    }
  return {-dpsi_db / hy, dpsi_da / hx};
}

}  // namespace bq
