#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bq/field.hpp"

namespace bq {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
  friend Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 a);

/// Raised when a contour stops being a valid simple closed curve.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed, counter-clockwise marker polyline; the last marker connects back
/// to the first.
class Contour {
 public:
  Contour() = default;
  explicit Contour(std::vector<Vec2> markers);

  const std::vector<Vec2>& markers() const { return markers_; }
  std::size_t size() const { return markers_.size(); }
  const Vec2& operator[](std::size_t i) const { return markers_[i]; }

  double signed_area() const;
  double mean_spacing() const;
  double min_x2() const;

  Contour translated(Vec2 shift) const;
  Contour mirrored() const;  ///< Reflection x2 -> -x2, reordered to stay counter-clockwise.
  Contour rotated_index(std::size_t shift) const;

 private:
  std::vector<Vec2> markers_;
};

inline constexpr std::size_t kMinMarkers = 64;

/// Checks segment pairs for crossings (bucketed, so roughly linear time).
bool is_simple(const Contour& c);
/// Ray-casting point-in-polygon test.
bool contains(const Contour& c, Vec2 p);
/// Unsigned distance from p to the polygon.
double distance_to(const Contour& c, Vec2 p);
/// Sorted x1 values where the horizontal line at height y crosses the
/// polygon; consecutive pairs bound the interior intervals.
std::vector<double> scanline_crossings(const Contour& c, double y);

// ---------------------------------------------------------------------------
// Periodic cubic spline through the markers, parameterized by chord length.

class PeriodicSpline {
 public:
  explicit PeriodicSpline(const Contour& c);

  std::size_t segments() const { return knots_.size() - 1; }
  double period() const { return knots_.back(); }
  double knot(std::size_t i) const { return knots_[i]; }

  Vec2 eval(double s) const;
  Vec2 d1(double s) const;
  Vec2 d2(double s) const;
  /// Arclength of segment i by 8-point Gauss-Legendre quadrature.
  double segment_length(std::size_t i) const;
  double length() const;
  /// Signed curvature at node i, positive for a counter-clockwise convex curve.
  double node_curvature(std::size_t i) const;

 private:
  std::size_t locate(double& s) const;

  std::vector<double> knots_;  // size n+1, knots_[0] = 0
  std::vector<Vec2> points_;   // size n
  std::vector<Vec2> second_;   // nodal second derivatives
};

// ---------------------------------------------------------------------------
// Measurements.

struct InscribedDisk {
  Vec2 center;
  double radius = 0.0;          ///< refined value
  double lattice_radius = 0.0;  ///< brute-force lattice maximum
  double lattice_spacing = 0.0;
};

struct PatchGeometry {
  double area = 0.0;
  double perimeter = 0.0;
  double max_abs_curvature = 0.0;
  double horizontal_extent = 0.0;
  double inscribed_radius = 0.0;
  double centroid_height = 0.0;
};

std::vector<double> curvature_profile(const Contour& c);
InscribedDisk inscribed_disk(const Contour& c, int lattice_points = 128);
double inscribed_radius(const Contour& c);
/// Integral over the enclosed region of x2.
double first_moment_x2(const Contour& c);
/// inscribed_radius is left at 0 unless requested; it dominates the cost.
PatchGeometry measure(const Contour& c, bool with_inscribed = true);

// ---------------------------------------------------------------------------
// Transport and resampling.

/// Velocity at a point for a given Runge-Kutta stage (0: t, 1 and 2: t+dt/2,
/// 3: t+dt). Steady samplers ignore the stage.
using StageVelocity = std::function<Vec2(int stage, Vec2 p)>;
using Velocity = std::function<Vec2(Vec2 p)>;

/// One classical RK4 step of dX/dt = u(t, X) for every marker.
Contour advect_contour(const Contour& c, const StageVelocity& u, double dt);
Contour advect_contour(const Contour& c, const Velocity& u, double dt);

/// Markers within `margin` of the symmetry axis or of the periodic seam.
std::size_t count_core_violations(const Contour& c, const Grid& g, double margin);

struct RedistributeOptions {
  /// Markers are doubled while perimeter / n exceeds this spacing.
  double max_spacing = 0.02;
  std::size_t max_markers = 1 << 16;
};

/// Re-places markers at equal arclength along the periodic spline.
Contour redistribute(const Contour& c, const RedistributeOptions& opt = {});

/// Tanh-mollified indicator of D minus that of its mirror image, exactly odd
/// in x2 on the grid. The interface level is shifted so that the integral
/// over the upper half equals the spline-enclosed area.
RealField rasterize(const Contour& c, const Grid& g, double epsilon);

// ---------------------------------------------------------------------------
// Shape families. All are counter-clockwise and centered at `center`.

Contour make_ellipse(Vec2 center, double semi_x, double semi_y, std::size_t n);
/// Ellipse of unit area with semi_x / semi_y = aspect.
Contour make_unit_area_ellipse(Vec2 center, double aspect, std::size_t n);
/// Rectangle with corners sampled uniformly along its edges.
Contour make_rectangle(Vec2 center, double width, double height, std::size_t n);
/// Stadium: a rectangle of width `flat` capped by semicircles of radius `radius`.
Contour make_stadium(Vec2 center, double flat, double radius, std::size_t n);
/// Radial function r(theta) = r0 * (1 + sum_k a_k cos((k + 2) theta + phase_k)),
/// so the first amplitude drives the elliptical mode.
Contour make_star(Vec2 center, double r0, const std::vector<double>& amplitudes,
                  const std::vector<double>& phases, std::size_t n);
/// Rescales about the marker mean to the target area.
Contour normalize_area(const Contour& c, double target = 1.0);

}  // namespace bq
