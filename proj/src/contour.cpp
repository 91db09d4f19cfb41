#include "bq/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>

namespace bq {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

namespace {

constexpr double kPi = std::numbers::pi;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGaussX = {-0.9602898564975363, -0.7966664774136267,
                                           -0.5255324099163290, -0.1834346424956498,
                                           0.1834346424956498,  0.5255324099163290,
                                           0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussW = {0.1012285362903763, 0.2223810344533745,
                                           0.3137066458778873, 0.3626837833783620,
                                           0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss(double a, double b, F&& f) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t q = 0; q < kGaussX.size(); ++q) s += kGaussW[q] * f(mid + half * kGaussX[q]);
  return s * half;
}

double polygon_area(const std::vector<Vec2>& p) {
  double s = 0.0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(p[i], p[(i + 1) % n]);
  return 0.5 * s;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

/// Sorted x-coordinates where the horizontal line at height y crosses the polygon.
std::vector<double> row_crossings(const std::vector<Vec2>& p, double y) {
  std::vector<double> xs;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % n];
    if ((a.y <= y) != (b.y <= y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

}  // namespace

// ---------------------------------------------------------------------------

Contour::Contour(std::vector<Vec2> markers) : markers_(std::move(markers)) {
  if (markers_.size() < kMinMarkers)
    throw GeometryError("contour needs at least " + std::to_string(kMinMarkers) + " markers, got " +
                        std::to_string(markers_.size()));
  for (const Vec2& p : markers_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("non-finite contour marker");
  if (polygon_area(markers_) < 0.0) std::reverse(markers_.begin() + 1, markers_.end());
}

std::vector<double> scanline_crossings(const Contour& c, double y) { return row_crossings(c.markers(), y); }

double Contour::signed_area() const { return polygon_area(markers_); }

double Contour::mean_spacing() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += norm(markers_[(i + 1) % size()] - markers_[i]);
  return s / static_cast<double>(size());
}

double Contour::min_x2() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Vec2& p : markers_) m = std::min(m, p.y);
  return m;
}

Contour Contour::translated(Vec2 shift) const {
  std::vector<Vec2> out(markers_);
  for (Vec2& p : out) p += shift;
  return Contour(std::move(out));
}

Contour Contour::mirrored() const {
  std::vector<Vec2> out(markers_);
  for (Vec2& p : out) p.y = -p.y;
  return Contour(std::move(out));
}

Contour Contour::rotated_index(std::size_t shift) const {
  std::vector<Vec2> out(markers_);
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(shift % out.size()), out.end());
  return Contour(std::move(out));
}

bool is_simple(const Contour& c) {
  const auto& p = c.markers();
  const std::size_t n = p.size();
  double xmin = p[0].x, ymin = p[0].y;
  for (const Vec2& q : p) {
    xmin = std::min(xmin, q.x);
    ymin = std::min(ymin, q.y);
  }
  const double cell = std::max(2.0 * c.mean_spacing(), 1e-12);
  std::unordered_map<long long, std::vector<std::size_t>> buckets;
  auto key = [](long long a, long long b) { return (a << 32) ^ (b & 0xffffffffLL); };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % n];
    const auto i0 = static_cast<long long>(std::floor((std::min(a.x, b.x) - xmin) / cell));
    const auto i1 = static_cast<long long>(std::floor((std::max(a.x, b.x) - xmin) / cell));
    const auto j0 = static_cast<long long>(std::floor((std::min(a.y, b.y) - ymin) / cell));
    const auto j1 = static_cast<long long>(std::floor((std::max(a.y, b.y) - ymin) / cell));
    for (long long bi = i0; bi <= i1; ++bi)
      for (long long bj = j0; bj <= j1; ++bj) buckets[key(bi, bj)].push_back(i);
  }
  for (const auto& [k, segs] : buckets) {
    for (std::size_t u = 0; u < segs.size(); ++u)
      for (std::size_t v = u + 1; v < segs.size(); ++v) {
        const std::size_t s = segs[u], t = segs[v];
        const std::size_t gap = s > t ? s - t : t - s;
        if (gap <= 1 || gap == n - 1) continue;
        if (segments_intersect(p[s], p[(s + 1) % n], p[t], p[(t + 1) % n])) return false;
      }
  }
  return true;
}

bool contains(const Contour& c, Vec2 q) {
  const auto& p = c.markers();
  bool inside = false;
  const std::size_t n = p.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((p[i].y > q.y) != (p[j].y > q.y) &&
        q.x < (p[j].x - p[i].x) * (q.y - p[i].y) / (p[j].y - p[i].y) + p[i].x)
      inside = !inside;
  }
  return inside;
}

double distance_to(const Contour& c, Vec2 q) {
  const auto& p = c.markers();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    d = std::min(d, segment_distance(q, p[i], p[(i + 1) % p.size()]));
  return d;
}

// ---------------------------------------------------------------------------

PeriodicSpline::PeriodicSpline(const Contour& c) : points_(c.markers()) {
  const std::size_t n = points_.size();
  knots_.assign(n + 1, 0.0);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = norm(points_[(i + 1) % n] - points_[i]);
    if (!(h[i] > 0.0)) throw GeometryError("degenerate marker spacing at index " + std::to_string(i));
    knots_[i + 1] = knots_[i] + h[i];
  }

  // Cyclic tridiagonal system for nodal second derivatives, solved with the
  // Sherman-Morrison correction of the Thomas algorithm.
  std::vector<double> sub(n), diag(n), sup(n);
  std::vector<Vec2> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
    sub[i] = h[im];
    diag[i] = 2.0 * (h[im] + h[i]);
    sup[i] = h[i];
    rhs[i] = 6.0 * ((1.0 / h[i]) * (points_[ip] - points_[i]) - (1.0 / h[im]) * (points_[i] - points_[im]));
  }
  const double alpha = sup[n - 1];  // A(n-1, 0)
  const double beta = sub[0];       // A(0, n-1)
  const double gamma = -diag[0];
  std::vector<double> d(diag);
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;

  auto thomas = [&](std::vector<Vec2> r) {
    std::vector<double> cp(n);
    std::vector<Vec2> x(n);
    cp[0] = sup[0] / d[0];
    r[0] = (1.0 / d[0]) * r[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = d[i] - sub[i] * cp[i - 1];
      cp[i] = sup[i] / m;
      r[i] = (1.0 / m) * (r[i] - sub[i] * r[i - 1]);
    }
    x[n - 1] = r[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = r[i] - cp[i] * x[i + 1];
    return x;
  };

  const std::vector<Vec2> y = thomas(rhs);
  std::vector<Vec2> u(n);
  u[0] = {gamma, gamma};
  u[n - 1] = {alpha, alpha};
  const std::vector<Vec2> z = thomas(u);
  const double zfac = 1.0 + z[0].x + beta * z[n - 1].x / gamma;
  const Vec2 num = y[0] + (beta / gamma) * y[n - 1];
  second_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    second_[i] = {y[i].x - num.x / zfac * z[i].x, y[i].y - num.y / zfac * z[i].x};
}

std::size_t PeriodicSpline::locate(double& s) const {
  const double per = period();
  s = std::fmod(s, per);
  if (s < 0.0) s += per;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  i = i == 0 ? 0 : i - 1;
  return std::min(i, segments() - 1);
}

Vec2 PeriodicSpline::eval(double s) const {
  const std::size_t i = locate(s), ip = (i + 1) % segments();
  const double h = knots_[i + 1] - knots_[i];
  const double a = knots_[i + 1] - s, b = s - knots_[i];
  const Vec2 mi = second_[i], mp = second_[ip];
  return (a * a * a / (6.0 * h)) * mi + (b * b * b / (6.0 * h)) * mp +
         a * ((1.0 / h) * points_[i] - (h / 6.0) * mi) + b * ((1.0 / h) * points_[ip] - (h / 6.0) * mp);
}

Vec2 PeriodicSpline::d1(double s) const {
  const std::size_t i = locate(s), ip = (i + 1) % segments();
  const double h = knots_[i + 1] - knots_[i];
  const double a = knots_[i + 1] - s, b = s - knots_[i];
  const Vec2 mi = second_[i], mp = second_[ip];
  return (-a * a / (2.0 * h)) * mi + (b * b / (2.0 * h)) * mp + (1.0 / h) * (points_[ip] - points_[i]) -
         (h / 6.0) * (mp - mi);
}

Vec2 PeriodicSpline::d2(double s) const {
  const std::size_t i = locate(s), ip = (i + 1) % segments();
  const double h = knots_[i + 1] - knots_[i];
  const double a = knots_[i + 1] - s, b = s - knots_[i];
  return (a / h) * second_[i] + (b / h) * second_[ip];
}

double PeriodicSpline::segment_length(std::size_t i) const {
  const double a = knots_[i], b = knots_[i + 1];
  return gauss(a, b, [&](double s) { return norm(d1(s)); });
}

double PeriodicSpline::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i < segments(); ++i) s += segment_length(i);
  return s;
}

double PeriodicSpline::node_curvature(std::size_t i) const {
  const Vec2 a = d1(knots_[i]), b = d2(knots_[i]);
  const double sp = norm(a);
  return cross(a, b) / (sp * sp * sp);
}

// ---------------------------------------------------------------------------

std::vector<double> curvature_profile(const Contour& c) {
  const PeriodicSpline sp(c);
  std::vector<double> k(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) k[i] = sp.node_curvature(i);
  return k;
}

namespace {

/// Enclosed area and first moment of x2 from the spline by Green's theorem.
std::pair<double, double> spline_moments(const PeriodicSpline& sp) {
  double area = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < sp.segments(); ++i) {
    const double a = sp.knot(i), b = sp.knot(i + 1);
    area += gauss(a, b, [&](double s) { return 0.5 * cross(sp.eval(s), sp.d1(s)); });
    moment += gauss(a, b, [&](double s) {
      const Vec2 p = sp.eval(s);
      return -0.5 * p.y * p.y * sp.d1(s).x;
    });
  }
  return {area, moment};
}

/// Lattice points strictly inside the polygon, found row by row.
struct Lattice {
  std::vector<Vec2> points;
  double spacing = 0.0;
};

Lattice interior_lattice(const Contour& c, int count) {
  const auto& p = c.markers();
  double xmin = p[0].x, xmax = p[0].x, ymin = p[0].y, ymax = p[0].y;
  for (const Vec2& q : p) {
    xmin = std::min(xmin, q.x);
    xmax = std::max(xmax, q.x);
    ymin = std::min(ymin, q.y);
    ymax = std::max(ymax, q.y);
  }
  Lattice lat;
  lat.spacing = std::max(xmax - xmin, ymax - ymin) / count;
  for (double y = ymin + 0.5 * lat.spacing; y < ymax; y += lat.spacing) {
    const auto xs = row_crossings(p, y);
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double first = xmin + lat.spacing * std::ceil((xs[k] - xmin) / lat.spacing - 0.5) + 0.5 * lat.spacing;
      for (double x = first; x < xs[k + 1]; x += lat.spacing)
        if (x > xs[k]) lat.points.push_back({x, y});
    }
  }
  return lat;
}

/// Distance to the polygon, abandoning the scan once it drops below `floor`.
double distance_above(const std::vector<Vec2>& p, Vec2 q, double floor) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    d = std::min(d, segment_distance(q, p[i], p[(i + 1) % n]));
    if (d <= floor) return d;
  }
  return d;
}

/// Nelder-Mead maximization of the signed inside distance.
std::pair<Vec2, double> refine_center(const Contour& c, Vec2 start, double step) {
  auto objective = [&](Vec2 q) {
    const double d = distance_to(c, q);
    return contains(c, q) ? d : -d;
  };
  std::array<Vec2, 3> v = {start, start + Vec2{step, 0.0}, start + Vec2{0.0, step}};
  std::array<double, 3> f{};
  for (int k = 0; k < 3; ++k) f[k] = objective(v[k]);
  const double tol = 1e-13 * std::max(1.0, norm(start));
  for (int iter = 0; iter < 400; ++iter) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return f[a] > f[b]; });
    const int best = order[0], mid = order[1], worst = order[2];
    const double size = std::max(norm(v[mid] - v[best]), norm(v[worst] - v[best]));
    if (size < tol) break;
    const Vec2 centroid = 0.5 * (v[best] + v[mid]);
    const Vec2 xr = centroid + (centroid - v[worst]);
    const double fr = objective(xr);
    if (fr > f[best]) {
      const Vec2 xe = centroid + 2.0 * (centroid - v[worst]);
      const double fe = objective(xe);
      if (fe > fr) { v[worst] = xe; f[worst] = fe; } else { v[worst] = xr; f[worst] = fr; }
    } else if (fr > f[mid]) {
      v[worst] = xr;
      f[worst] = fr;
    } else {
      const Vec2 xc = centroid + 0.5 * (v[worst] - centroid);
      const double fc = objective(xc);
      if (fc > f[worst]) {
        v[worst] = xc;
        f[worst] = fc;
      } else {
        for (int k : {mid, worst}) {
          v[k] = v[best] + 0.5 * (v[k] - v[best]);
          f[k] = objective(v[k]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::max_element(f.begin(), f.end()) - f.begin());
  return {v[best], f[best]};
}

}  // namespace

InscribedDisk inscribed_disk(const Contour& c, int lattice_points) {
  const Lattice lat = interior_lattice(c, lattice_points);
  const auto& p = c.markers();
  InscribedDisk out;
  out.lattice_spacing = lat.spacing;

  // Keep a handful of the best lattice candidates as refinement seeds.
  constexpr std::size_t kSeeds = 6;
  std::vector<std::pair<double, Vec2>> seeds;
  double floor = 0.0;
  for (const Vec2& q : lat.points) {
    const double d = distance_above(p, q, floor);
    if (d <= floor && seeds.size() >= kSeeds) continue;
    seeds.emplace_back(d, q);
    std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (seeds.size() > kSeeds) seeds.pop_back();
    if (seeds.size() == kSeeds) floor = seeds.back().first;
  }
  if (seeds.empty()) {
    // Too thin for the lattice; fall back to the centroid of the markers.
    Vec2 g{};
    for (const Vec2& q : p) g += q;
    seeds.emplace_back(0.0, (1.0 / static_cast<double>(p.size())) * g);
  }
  out.lattice_radius = std::max(0.0, seeds.front().first);
  out.center = seeds.front().second;
  out.radius = out.lattice_radius;
  for (const auto& [d, q] : seeds) {
    const auto [center, value] = refine_center(c, q, 0.5 * lat.spacing);
    if (value > out.radius) {
      out.radius = value;
      out.center = center;
    }
  }
  return out;
}

double inscribed_radius(const Contour& c) { return inscribed_disk(c).radius; }

double first_moment_x2(const Contour& c) { return spline_moments(PeriodicSpline(c)).second; }

PatchGeometry measure(const Contour& c, bool with_inscribed) {
  const PeriodicSpline sp(c);
  PatchGeometry g;
  const auto [area, moment] = spline_moments(sp);
  g.area = area;
  if (!(g.area > 0.0)) throw GeometryError("contour encloses non-positive area");
  g.perimeter = sp.length();
  for (std::size_t i = 0; i < c.size(); ++i)
    g.max_abs_curvature = std::max(g.max_abs_curvature, std::abs(sp.node_curvature(i)));
  double xmin = c[0].x, xmax = c[0].x;
  for (const Vec2& q : c.markers()) {
    xmin = std::min(xmin, q.x);
    xmax = std::max(xmax, q.x);
  }
  g.horizontal_extent = xmax - xmin;
  if (with_inscribed) g.inscribed_radius = inscribed_radius(c);
  g.centroid_height = moment / area;
  return g;
}

// ---------------------------------------------------------------------------

Contour advect_contour(const Contour& c, const StageVelocity& u, double dt) {
  std::vector<Vec2> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec2 x = c[i];
    const Vec2 k1 = u(0, x);
    const Vec2 k2 = u(1, x + (0.5 * dt) * k1);
    const Vec2 k3 = u(2, x + (0.5 * dt) * k2);
    const Vec2 k4 = u(3, x + dt * k3);
    out[i] = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return Contour(std::move(out));
}

Contour advect_contour(const Contour& c, const Velocity& u, double dt) {
  return advect_contour(c, StageVelocity([&](int, Vec2 p) { return u(p); }), dt);
}

std::size_t count_core_violations(const Contour& c, const Grid& g, double margin) {
  std::size_t n = 0;
  for (const Vec2& p : c.markers()) {
    const bool near_axis = p.y < margin;
    const bool near_seam = p.y > 0.5 * g.ly - margin;
    if (near_axis || near_seam) ++n;
  }
  return n;
}

Contour redistribute(const Contour& c, const RedistributeOptions& opt) {
  if (!is_simple(c)) throw GeometryError("contour self-intersects; cannot redistribute");
  const PeriodicSpline sp(c);
  const std::size_t segs = sp.segments();
  std::vector<double> cum(segs + 1, 0.0);
  for (std::size_t i = 0; i < segs; ++i) cum[i + 1] = cum[i] + sp.segment_length(i);
  const double total = cum.back();

  std::size_t n = c.size();
  while (total / static_cast<double>(n) > opt.max_spacing && 2 * n <= opt.max_markers) n *= 2;

  std::vector<Vec2> out(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < segs && cum[seg + 1] <= target) ++seg;
    const double a = sp.knot(seg), b = sp.knot(seg + 1);
    const double want = target - cum[seg];
    const double seg_len = cum[seg + 1] - cum[seg];
    double s = a + (b - a) * (seg_len > 0.0 ? want / seg_len : 0.0);
    for (int it = 0; it < 8; ++it) {
      const double have = s > a ? gauss(a, s, [&](double q) { return norm(sp.d1(std::clamp(q, a, b))); }) : 0.0;
      const double speed = norm(sp.d1(std::clamp(s, a, std::nextafter(b, a))));
      const double ds = (have - want) / speed;
      s = std::clamp(s - ds, a, b);
      if (std::abs(ds) < 1e-15 * std::max(1.0, total)) break;
    }
    out[k] = k == 0 ? c[0] : sp.eval(std::min(s, std::nextafter(b, a)));
  }
  return Contour(std::move(out));
}

// ---------------------------------------------------------------------------

RealField rasterize(const Contour& c, const Grid& g, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("interface width must be positive");
  if (c.min_x2() <= epsilon)
    throw GeometryError("patch comes within the interface width of the symmetry axis");

  const auto& p = c.markers();
  const double band = 16.0 * epsilon;
  const double hx = g.hx(), hy = g.hy();

  // Inside/outside by scanline crossings, then signed distance near the curve.
  std::vector<double> inside(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    const auto xs = row_crossings(p, g.x2(j));
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = std::max(0, static_cast<int>(std::ceil(xs[k] / hx)));
      const int i1 = std::min(g.nx - 1, static_cast<int>(std::floor(xs[k + 1] / hx)));
      for (int i = i0; i <= i1; ++i)
        if (g.x1(i) > xs[k] && g.x1(i) < xs[k + 1]) inside[g.index(i, j)] = 1.0;
    }
  }
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < p.size(); ++s) {
    const Vec2 a = p[s], b = p[(s + 1) % p.size()];
    const int i0 = std::max(0, static_cast<int>(std::floor((std::min(a.x, b.x) - band) / hx)));
    const int i1 = std::min(g.nx - 1, static_cast<int>(std::ceil((std::max(a.x, b.x) + band) / hx)));
    const int j0 = std::max(0, static_cast<int>(std::floor((std::min(a.y, b.y) - band + 0.5 * g.ly) / hy)));
    const int j1 = std::min(g.ny - 1, static_cast<int>(std::ceil((std::max(a.y, b.y) + band + 0.5 * g.ly) / hy)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        double& d = dist[g.index(i, j)];
        d = std::min(d, segment_distance({g.x1(i), g.x2(j)}, a, b));
      }
  }
  std::vector<std::size_t> band_nodes;
  std::vector<double> signed_d;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (dist[n] < band) {
      band_nodes.push_back(n);
      signed_d.push_back(inside[n] > 0.0 ? -dist[n] : dist[n]);
    }
  }

  const double target = [&] {
    const PeriodicSpline sp(c);
    return spline_moments(sp).first;
  }();

  RealField phi(g);
  auto fill = [&](double shift) {
    for (std::size_t n = 0; n < g.size(); ++n) phi.values[n] = inside[n];
    for (std::size_t k = 0; k < band_nodes.size(); ++k)
      phi.values[band_nodes[k]] = 0.5 * (1.0 - std::tanh((signed_d[k] - shift) / epsilon));
  };
  auto upper_integral = [&]() {
    double s = 0.0;
    for (int j = g.axis_row() + 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s += phi(i, j) - phi(i, g.mirror_row(j));
    return s * g.cell_area();
  };

  // Newton iteration on the level shift; d(integral)/d(shift) ~ perimeter.
  double shift = 0.0;
  for (int it = 0; it < 20; ++it) {
    fill(shift);
    const double err = upper_integral() - target;
    double slope = 0.0;
    for (std::size_t k = 0; k < band_nodes.size(); ++k) {
      const double t = std::tanh((signed_d[k] - shift) / epsilon);
      slope += 0.5 * (1.0 - t * t) / epsilon;
    }
    slope *= g.cell_area();
    if (!(slope > 0.0)) break;
    const double step = err / slope;
    shift = std::clamp(shift - step, -epsilon, epsilon);
    if (std::abs(step) < 1e-15) break;
  }
  fill(shift);

  RealField rho(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) rho(i, j) = phi(i, j) - phi(i, g.mirror_row(j));
  return rho;
}

// ---------------------------------------------------------------------------

Contour make_ellipse(Vec2 center, double semi_x, double semi_y, std::size_t n) {
  std::vector<Vec2> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    p[k] = {center.x + semi_x * std::cos(t), center.y + semi_y * std::sin(t)};
  }
  return Contour(std::move(p));
}

Contour make_unit_area_ellipse(Vec2 center, double aspect, std::size_t n) {
  const double semi_y = std::sqrt(1.0 / (kPi * aspect));
  return make_ellipse(center, aspect * semi_y, semi_y, n);
}

Contour make_rectangle(Vec2 center, double width, double height, std::size_t n) {
  const double per = 2.0 * (width + height);
  const Vec2 c0 = center + Vec2{-0.5 * width, -0.5 * height};
  std::vector<Vec2> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = per * static_cast<double>(k) / static_cast<double>(n);
    if (s < width) p[k] = c0 + Vec2{s, 0.0};
    else if ((s -= width) < height) p[k] = c0 + Vec2{width, s};
    else if ((s -= height) < width) p[k] = c0 + Vec2{width - s, height};
    else p[k] = c0 + Vec2{0.0, height - (s - width)};
  }
  return Contour(std::move(p));
}

Contour make_stadium(Vec2 center, double flat, double radius, std::size_t n) {
  const double per = 2.0 * flat + 2.0 * kPi * radius;
  std::vector<Vec2> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = per * static_cast<double>(k) / static_cast<double>(n);
    if (s < flat) {
      p[k] = center + Vec2{-0.5 * flat + s, -radius};
    } else if ((s -= flat) < kPi * radius) {
      const double t = -0.5 * kPi + s / radius;
      p[k] = center + Vec2{0.5 * flat + radius * std::cos(t), radius * std::sin(t)};
    } else if ((s -= kPi * radius) < flat) {
      p[k] = center + Vec2{0.5 * flat - s, radius};
    } else {
      s -= flat;
      const double t = 0.5 * kPi + s / radius;
      p[k] = center + Vec2{-0.5 * flat + radius * std::cos(t), radius * std::sin(t)};
    }
  }
  return Contour(std::move(p));
}

Contour make_star(Vec2 center, double r0, const std::vector<double>& amplitudes,
                  const std::vector<double>& phases, std::size_t n) {
  std::vector<Vec2> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    double r = 1.0;
    for (std::size_t m = 0; m < amplitudes.size(); ++m)
      r += amplitudes[m] * std::cos(static_cast<double>(m + 2) * t + (m < phases.size() ? phases[m] : 0.0));
    p[k] = center + Vec2{r0 * r * std::cos(t), r0 * r * std::sin(t)};
  }
  return Contour(std::move(p));
}

Contour normalize_area(const Contour& c, double target) {
  const double area = spline_moments(PeriodicSpline(c)).first;
  Vec2 g{};
  for (const Vec2& q : c.markers()) g += q;
  g = (1.0 / static_cast<double>(c.size())) * g;
  const double scale = std::sqrt(target / area);
  std::vector<Vec2> p(c.markers());
  for (Vec2& q : p) q = g + scale * (q - g);
  return Contour(std::move(p));
}

}  // namespace bq
