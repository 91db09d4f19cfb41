#include "bq/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bq/spectral.hpp"

namespace bq {

namespace {

constexpr double kPi = std::numbers::pi;

int next_pow2(double cells) {
  int n = 8;
  while (n < cells) n *= 2;
  return n;
}

struct Bounds {
  double xmin, xmax, ymin, ymax;
};

Bounds bounds_of(const Contour& c) {
  Bounds b{c[0].x, c[0].x, c[0].y, c[0].y};
  for (const Vec2& p : c.markers()) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  return b;
}

/// Integral over D of q(x1) r(x2) d x where q = dQ/dx1, evaluated row by row:
/// exact in x1 through the antiderivative Q, midpoint rule in x2.
template <class Antiderivative, class Weight>
double integrate_over_d(const Contour& c, double y0, double y1, int rows, Antiderivative&& big_q,
                        Weight&& weight) {
  if (!(y1 > y0)) return 0.0;
  const double dy = (y1 - y0) / rows;
  double sum = 0.0;
  for (int k = 0; k < rows; ++k) {
    const double y = y0 + (k + 0.5) * dy;
    const double w = weight(y);
    if (w == 0.0) continue;
    const auto xs = scanline_crossings(c, y);
    double row = 0.0;
    for (std::size_t m = 0; m + 1 < xs.size(); m += 2) row += big_q(xs[m + 1]) - big_q(xs[m]);
    sum += w * row;
  }
  return sum * dy;
}

/// Samples f = g h (odd in x2) and its derivatives on the grid.
template <class G, class H>
TestFunction sample(const Grid& grid, double shift_x1, double anchor, G&& gfun, H&& hfun) {
  TestFunction t{RealField(grid), RealField(grid), RealField(grid), RealField(grid)};
  std::vector<Profile> gs(grid.nx);
  for (int i = 0; i < grid.nx; ++i) gs[i] = gfun(grid.x1(i) - shift_x1 - anchor);
  double grad = 0.0, lap = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    const double x2 = grid.x2(j);
    const double sigma = x2 > 0.0 ? 1.0 : (x2 < 0.0 ? -1.0 : 0.0);
    const Profile h = hfun(std::abs(x2));
    for (int i = 0; i < grid.nx; ++i) {
      const Profile& g = gs[i];
      const double f = sigma * g.v * h.v;
      const double fx = sigma * g.d1 * h.v;
      const double fy = g.v * h.d1;
      const double l = sigma * (g.d2 * h.v + g.v * h.d2);
      t.f(i, j) = f;
      t.f_x1(i, j) = fx;
      t.f_x2(i, j) = fy;
      t.lap(i, j) = l;
      grad += fx * fx + fy * fy;
      lap += l * l;
      t.sup_dx1 = std::max(t.sup_dx1, std::abs(fx));
    }
  }
  t.grad_l2 = std::sqrt(grad * grid.cell_area());
  t.lap_l2 = std::sqrt(lap * grid.cell_area());
  return t;
}

/// Fills the duality columns shared by both lemmas.
void evaluate_duality(LemmaReport& rep, const Contour& c, const Grid& grid, double shift_x1,
                      const TestFunction& f, OmegaChoice choice, const std::optional<RealField>& supplied,
                      const LemmaGridOptions& opt) {
  namespace sp = spectral;
  const double eps = opt.epsilon_cells * std::max(grid.hx(), grid.hy());
  const RealField mu = rasterize(c.translated({shift_x1, 0.0}), grid, eps);

  double full = 0.0, upper = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double v = mu(i, j) * f.f_x1(i, j);
      full += v;
      if (grid.x2(j) > 0.0) upper += v;
    }
  rep.lhs_grid = full * grid.cell_area();
  rep.lhs_upper_half = upper * grid.cell_area();

  const SpectralField phi_hat = sp::dx(sp::inverse_laplacian(sp::forward(mu)));
  RealField omega(grid);
  switch (choice) {
    case OmegaChoice::Zero:
      break;
    case OmegaChoice::DerivativeOfMu:
      omega = sp::inverse(phi_hat);
      break;
    case OmegaChoice::Supplied:
      if (!supplied || !(supplied->grid == grid))
        throw LemmaError("supplied Omega is missing or lives on a different grid");
      omega = *supplied;
      break;
  }
  rep.omega_choice = choice;
  rep.grad_f_l2 = f.grad_l2;
  rep.lap_f_l2 = f.lap_l2;
  rep.rhs_h1 = sp::hs_norm(phi_hat - sp::forward(omega), 1.0) * f.grad_l2;
  rep.rhs_l2 = l2_norm(omega) * f.lap_l2;
  const double rhs = rep.rhs_h1 + rep.rhs_l2;
  rep.ratio = rhs > 0.0 ? rep.lhs / rhs : std::numeric_limits<double>::infinity();
  const double slack = 1e-3 * rhs + 1e-9;
  rep.duality_ok = rep.lhs <= rhs + slack && rep.lhs_grid <= rhs + slack;
}

}  // namespace

std::string to_string(OmegaChoice c) {
  switch (c) {
    case OmegaChoice::Zero: return "zero";
    case OmegaChoice::DerivativeOfMu: return "d1_invlap_mu";
    case OmegaChoice::Supplied: return "supplied";
  }
  return "?";
}

OmegaChoice omega_choice_from_string(const std::string& s) {
  if (s == "zero") return OmegaChoice::Zero;
  if (s == "d1_invlap_mu") return OmegaChoice::DerivativeOfMu;
  if (s == "supplied") return OmegaChoice::Supplied;
  throw std::invalid_argument("unknown Omega choice '" + s + "' (expected zero, d1_invlap_mu or supplied)");
}

// ---------------------------------------------------------------------------

double disk_overlap(const Contour& c, Vec2 center, double r, int rows) {
  // y = cy - r cos(phi) puts more rows near the poles of the disk.
  const double dphi = kPi / rows;
  double sum = 0.0;
  for (int k = 0; k < rows; ++k) {
    const double phi = (k + 0.5) * dphi;
    const double y = center.y - r * std::cos(phi);
    const double half = r * std::sin(phi);
    const double a = center.x - half, b = center.x + half;
    const auto xs = scanline_crossings(c, y);
    double len = 0.0;
    for (std::size_t m = 0; m + 1 < xs.size(); m += 2)
      len += std::max(0.0, std::min(b, xs[m + 1]) - std::max(a, xs[m]));
    sum += len * r * std::sin(phi);
  }
  return sum * dphi;
}

DiskChain find_nstar(const Contour& c, Vec2 center, double r) {
  if (!(r > 0.0)) throw LemmaError("disk radius must be positive");
  if (!contains(c, center) || distance_to(c, center) < r * (1.0 - 1e-9))
    throw LemmaError("disk is not inside the domain");
  DiskChain out;
  out.threshold = r * r / 16.0;
  out.bound = 32.0 / (r * r);
  for (int n = 1;; ++n) {
    const double ov = disk_overlap(c, {center.x + 2.0 * r * n, center.y}, r);
    out.overlaps.push_back(ov);
    if (ov <= out.threshold) {
      out.n_star = n;
      break;
    }
  }
  out.within_bound = out.n_star <= out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Lemma 4.1.

Profile curvature_g(double s, double r, int n_star) {
  const double top = 2.0 * r * n_star;
  const double k = kPi / r;
  if (s <= 0.0 || s >= top + r) return {};
  if (s <= r) return {0.5 * (1.0 - std::cos(k * s)), 0.5 * k * std::sin(k * s), 0.5 * k * k * std::cos(k * s)};
  if (s <= top) return {1.0, 0.0, 0.0};
  const double u = s - top;
  return {0.5 * (1.0 + std::cos(k * u)), -0.5 * k * std::sin(k * u), -0.5 * k * k * std::cos(k * u)};
}

Profile curvature_h(double x2, double b, double r) {
  const double u = x2 - b;
  if (std::abs(u) >= r) return {};
  const double k = kPi / r;
  return {0.5 * (1.0 + std::cos(k * u)), -0.5 * k * std::sin(k * u), -0.5 * k * k * std::cos(k * u)};
}

void CurvatureLemmaParams::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw LemmaError("inscribed radius must lie in (0, 1)");
  if (n_star < 1) throw LemmaError("N* must be at least 1");
  if (!(center.y - r > 0.0)) throw LemmaError("disk B_0 touches the symmetry axis");
  if (grid.hx() > r / 8.0 * (1 + 1e-12) || grid.hy() > r / 8.0 * (1 + 1e-12))
    throw LemmaError("grid too coarse: r must span at least 8 cells");
  const double x0 = center.x + shift_x1;
  if (x0 - r < 0.0 || x0 + 2.0 * r * n_star + r > grid.lx || center.y + r > 0.5 * grid.ly)
    throw LemmaError("support of f does not fit in the grid");
  if (omega_choice == OmegaChoice::Supplied && !omega) throw LemmaError("Omega choice 'supplied' needs a field");
}

TestFunction build_f_curvature(const CurvatureLemmaParams& p) {
  p.validate();
  return sample(
      p.grid, p.shift_x1, p.center.x, [&](double s) { return curvature_g(s, p.r, p.n_star); },
      [&](double y) { return curvature_h(y, p.center.y, p.r); });
}

double lemma41_stated_constant() { return 2.0 * (kPi * std::sqrt(14.0) / 8.0 - kPi / 32.0); }

double lemma41_sharp_constant() {
  // I0 = (pi/2) int_0^1 sin(pi s) (a + sin(pi a)/pi) ds with a = sqrt(1 - s^2);
  // substitute s = sin(theta) and use composite Simpson.
  static const double value = [] {
    const int n = 4000;
    const double h = 0.5 * kPi / n;
    auto f = [](double th) {
      const double s = std::sin(th), a = std::cos(th);
      return std::sin(kPi * s) * (a + std::sin(kPi * a) / kPi) * std::cos(th);
    };
    double sum = f(0.0) + f(0.5 * kPi);
    for (int k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(k * h);
    const double i0 = 0.5 * kPi * sum * h / 3.0;
    return 2.0 * (i0 - kPi / 32.0);
  }();
  return value;
}

CurvatureLemmaParams make_curvature_params(const Contour& c, const LemmaGridOptions& opt) {
  const InscribedDisk disk = inscribed_disk(c);
  CurvatureLemmaParams p;
  p.center = disk.center;
  p.r = disk.radius;
  if (!(p.r > 0.0 && p.r < 1.0)) throw LemmaError("inscribed radius must lie in (0, 1)");
  p.n_star = find_nstar(c, p.center, p.r).n_star;

  const Bounds b = bounds_of(c);
  const double left = std::min(b.xmin, p.center.x - p.r);
  const double right = std::max(b.xmax, p.center.x + 2.0 * p.r * p.n_star + p.r);
  const double need_x = right - left + 2.0 * opt.margin;
  const double need_y = 2.0 * (b.ymax + opt.margin);
  const double h = p.r / opt.cells_per_r;
  const int nx = next_pow2(need_x / h), ny = next_pow2(need_y / h);
  if (nx > opt.max_cells || ny > opt.max_cells) throw LemmaError("lemma grid would exceed max_cells");
  p.grid = Grid(nx, ny, nx * h, ny * h);
  p.shift_x1 = 0.5 * (p.grid.lx - (right - left)) - left;
  return p;
}

LemmaReport check_lemma41(const Contour& c, const CurvatureLemmaParams& p, const LemmaGridOptions& opt) {
  p.validate();
  if (!contains(c, p.center) || distance_to(c, p.center) < p.r * (1.0 - 1e-9))
    throw LemmaError("disk B_0 is not inside the domain");
  LemmaReport rep;
  rep.lemma = "4.1";
  rep.r = p.r;
  rep.n_star = p.n_star;
  rep.nstar_bound = 32.0 / (p.r * p.r);
  rep.nstar_ok = p.n_star <= rep.nstar_bound;

  const TestFunction f = build_f_curvature(p);
  rep.bounds_ok = f.sup_dx1 <= kPi / (2.0 * p.r) * (1.0 + 1e-9);

  // 2 int_D d1 f = 2 int h(x2) sum over row intervals of [g] dx2.
  rep.lhs = 2.0 * integrate_over_d(
                      c, p.center.y - p.r, p.center.y + p.r, 4096,
                      [&](double x) { return curvature_g(x - p.center.x, p.r, p.n_star).v; },
                      [&](double y) { return curvature_h(y, p.center.y, p.r).v; });

  evaluate_duality(rep, c, p.grid, p.shift_x1, f, p.omega_choice, p.omega, opt);
  rep.predicted_lower_bound = lemma41_stated_constant() * p.r;
  rep.sharp_lower_bound = lemma41_sharp_constant() * p.r;
  rep.lower_bound_ok = rep.lhs >= rep.predicted_lower_bound * 0.98;
  const double rhs = rep.rhs_h1 + rep.rhs_l2;
  rep.empirical_constant = rhs > 0.0 ? p.r * p.r * p.r / rhs : std::numeric_limits<double>::infinity();

  std::ostringstream os;
  os << "lhs/r=" << rep.lhs / p.r << " stated=" << lemma41_stated_constant()
     << " sharp=" << lemma41_sharp_constant() << " cap=2";
  if (!rep.nstar_ok) os << "; N* exceeds 32/r^2";
  if (!rep.bounds_ok) os << "; sup|d1 f| exceeds pi/(2r)";
  rep.detail = os.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Lemma 4.2.

Profile perimeter_g(double s, double L, double A) {
  const double d = 1.0 / (32.0 * A);
  if (s <= 0.0 || s >= 2.0 * L) return {};
  if (s > L) {
    const Profile m = perimeter_g(2.0 * L - s, L, A);
    return {m.v, -m.d1, m.d2};
  }
  if (s <= d) return {0.5 * s * s / d, s / d, 1.0 / d};
  if (s <= L - d) return {s - 0.5 * d, 1.0, 0.0};
  const double u = L - s;
  return {L - 1.5 * d + 0.5 * (d * d - u * u) / d, u / d, -1.0 / d};
}

Profile perimeter_h(double x2, double L, double A) {
  const double w = 1.0 / (4.0 * L);
  // Piecewise-quadratic step from 0 to 1 over [0, w]: the ramp of least
  // maximal curvature, |h''| = 4 / w^2, |h'| <= 2 / w.
  auto up = [w](double y) -> Profile {
    const double t = y / w;
    if (t <= 0.5) return {2.0 * t * t, 4.0 * t / w, 4.0 / (w * w)};
    const double u = 1.0 - t;
    return {1.0 - 2.0 * u * u, 4.0 * u / w, -4.0 / (w * w)};
  };
  const double top = 4.0 * A;
  if (x2 <= 0.0 || x2 >= top + w) return {};
  if (x2 < w) return up(x2);
  if (x2 <= top) return {1.0, 0.0, 0.0};
  const Profile m = up(top + w - x2);
  return {m.v, -m.d1, m.d2};
}

void PerimeterLemmaParams::validate() const {
  if (!(L > 0.0) || !(A > 0.0)) throw LemmaError("L and A must be positive");
  if (!(16.0 * A * L > 1.0)) throw LemmaError("16 A L must exceed 1");
  if (!(L > 2.0 / (32.0 * A))) throw LemmaError("L must exceed 2/(32A) so that g' reaches 1");
  const double ramp_x = 1.0 / (32.0 * A), ramp_y = 1.0 / (4.0 * L);
  if (grid.hx() > ramp_x / 4.0 * (1 + 1e-12)) throw LemmaError("grid too coarse: 1/(32A) must span at least 4 cells");
  if (grid.hy() > ramp_y / 4.0 * (1 + 1e-12)) throw LemmaError("grid too coarse: 1/(4L) must span at least 4 cells");
  const double x0 = x1_left + shift_x1;
  if (x0 < 0.0 || x0 + 2.0 * L > grid.lx || 4.0 * A + ramp_y > 0.5 * grid.ly)
    throw LemmaError("support of f does not fit in the grid");
  if (omega_choice == OmegaChoice::Supplied && !omega) throw LemmaError("Omega choice 'supplied' needs a field");
}

TestFunction build_f_perimeter(const PerimeterLemmaParams& p) {
  p.validate();
  return sample(
      p.grid, p.shift_x1, p.x1_left, [&](double s) { return perimeter_g(s, p.L, p.A); },
      [&](double y) { return perimeter_h(y, p.L, p.A); });
}

StripMass strip_mass(const Contour& c, double L, double A, double x1_left) {
  const Bounds b = bounds_of(c);
  const double w = 1.0 / (4.0 * L), d = 1.0 / (32.0 * A);
  const double lo = x1_left + d, hi = x1_left + L - d;
  const int rows = 4096;
  const double dy = (b.ymax - b.ymin) / rows;
  StripMass m;
  for (int k = 0; k < rows; ++k) {
    const double y = b.ymin + (k + 0.5) * dy;
    const auto xs = scanline_crossings(c, y);
    double len = 0.0, inner = 0.0;
    for (std::size_t q = 0; q + 1 < xs.size(); q += 2) {
      len += xs[q + 1] - xs[q];
      inner += std::max(0.0, std::min(hi, xs[q + 1]) - std::max(lo, xs[q]));
    }
    if (y > 4.0 * A) m.above_4A += len * dy;
    else if (y < w) m.below_quarter_L += len * dy;
    else m.confined += inner * dy;
  }
  return m;
}

PerimeterLemmaParams make_perimeter_params(const Contour& c, const LemmaGridOptions& opt) {
  const Bounds b = bounds_of(c);
  PerimeterLemmaParams p;
  p.L = b.xmax - b.xmin;
  p.A = first_moment_x2(c);
  p.x1_left = b.xmin;
  if (!(p.A > 0.0)) throw LemmaError("first moment must be positive");

  const double hx = 1.0 / (32.0 * p.A) / opt.cells_per_ramp;
  const double hy = 1.0 / (4.0 * p.L) / opt.cells_per_ramp;
  const double need_x = 2.0 * p.L + 2.0 * opt.margin;
  const double need_y = 2.0 * (std::max(b.ymax, 4.0 * p.A + 1.0 / (4.0 * p.L)) + opt.margin);
  const int nx = next_pow2(need_x / hx), ny = next_pow2(need_y / hy);
  if (nx > opt.max_cells || ny > opt.max_cells) throw LemmaError("lemma grid would exceed max_cells");
  p.grid = Grid(nx, ny, nx * hx, ny * hy);
  p.shift_x1 = 0.5 * (p.grid.lx - 2.0 * p.L) - p.x1_left;
  return p;
}

LemmaReport check_lemma42(const Contour& c, const PerimeterLemmaParams& p, const LemmaGridOptions& opt) {
  p.validate();
  const StripMass m = strip_mass(c, p.L, p.A, p.x1_left);
  std::ostringstream fail;
  // Slack for the scanline quadrature.
  if (m.above_4A > 0.25 + 1e-6) fail << " mass above 4A is " << m.above_4A << " > 1/4;";
  if (m.below_quarter_L > 0.25 + 1e-6) fail << " mass below 1/(4L) is " << m.below_quarter_L << " > 1/4;";
  if (m.confined < 0.25 - 1e-6) fail << " confined mass is " << m.confined << " < 1/4;";
  if (!fail.str().empty()) throw LemmaError("strip confinement fails:" + fail.str());

  LemmaReport rep;
  rep.lemma = "4.2";
  rep.L = p.L;
  rep.A = p.A;

  const TestFunction f = build_f_perimeter(p);
  // Bounds the construction meets: |g'| <= 1, |g''| <= 32A, |h'| <= 8L, |h''| <= 64L^2.
  double g1 = 0.0, g2 = 0.0, h1 = 0.0, h2 = 0.0;
  for (int i = 0; i < p.grid.nx; ++i) {
    const Profile g = perimeter_g(p.grid.x1(i) - p.shift_x1 - p.x1_left, p.L, p.A);
    g1 = std::max(g1, std::abs(g.d1));
    g2 = std::max(g2, std::abs(g.d2));
  }
  for (int j = 0; j < p.grid.ny; ++j) {
    const Profile h = perimeter_h(std::abs(p.grid.x2(j)), p.L, p.A);
    h1 = std::max(h1, std::abs(h.d1));
    h2 = std::max(h2, std::abs(h.d2));
  }
  const double tol = 1.0 + 1e-9;
  rep.bounds_ok = g1 <= tol && g2 <= 32.0 * p.A * tol && h1 <= 8.0 * p.L * tol && h2 <= 64.0 * p.L * p.L * tol;

  rep.lhs = 2.0 * integrate_over_d(
                      c, bounds_of(c).ymin, bounds_of(c).ymax, 8192,
                      [&](double x) { return perimeter_g(x - p.x1_left, p.L, p.A).v; },
                      [&](double y) { return perimeter_h(y, p.L, p.A).v; });

  evaluate_duality(rep, c, p.grid, p.shift_x1, f, p.omega_choice, p.omega, opt);
  rep.predicted_lower_bound = 0.5;
  rep.sharp_lower_bound = 0.5;
  rep.lower_bound_ok = rep.lhs >= 0.475;
  const double rhs = rep.rhs_h1 + rep.rhs_l2;
  const double scale = (p.A + 1.0) * (1.0 + p.L * p.L * p.L);
  rep.empirical_constant = rhs > 0.0 ? 1.0 / (scale * rhs) : std::numeric_limits<double>::infinity();

  std::ostringstream os;
  os << "mass above 4A=" << m.above_4A << " below 1/(4L)=" << m.below_quarter_L << " confined=" << m.confined
     << "; max|h'|/L=" << h1 / p.L << " max|h''|/L^2=" << h2 / (p.L * p.L);
  if (!rep.bounds_ok) os << "; construction bounds violated";
  rep.detail = os.str();
  return rep;
}

// ---------------------------------------------------------------------------

PestovIonin pestov_ionin_check(const Contour& c) {
  PestovIonin out;
  const InscribedDisk disk = inscribed_disk(c);
  out.inscribed_radius = disk.radius;
  out.lattice_radius = disk.lattice_radius;
  out.lattice_spacing = disk.lattice_spacing;
  for (double k : curvature_profile(c)) out.max_abs_curvature = std::max(out.max_abs_curvature, std::abs(k));
  out.product = out.inscribed_radius * out.max_abs_curvature;
  out.ok = out.product >= 1.0 - 1e-2;
  out.lattice_ok = std::abs(out.inscribed_radius - out.lattice_radius) <=
                   0.5 * std::sqrt(2.0) * out.lattice_spacing + 1e-12;
  return out;
}

}  // namespace bq
