#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bq/contour.hpp"
#include "bq/field.hpp"

namespace bq {

/// Comparison field Omega in the duality estimate.
enum class OmegaChoice { Zero, DerivativeOfMu, Supplied };

std::string to_string(OmegaChoice c);
OmegaChoice omega_choice_from_string(const std::string& s);

/// Lemma checks fail with this when their preconditions do not hold.
class LemmaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Disk chain.

struct DiskChain {
  int n_star = 0;
  /// overlaps[n - 1] = |D ∩ B_n| for n = 1 .. n_star.
  std::vector<double> overlaps;
  double threshold = 0.0;  ///< r^2 / 16
  double bound = 0.0;      ///< 32 / r^2
  bool within_bound = false;
};

/// |D ∩ B_r(center)| by exact chord lengths on `rows` scanlines.
double disk_overlap(const Contour& c, Vec2 center, double r, int rows = 2048);

/// Smallest n >= 1 with |D ∩ B_n| <= r^2/16, B_n the disk translated by 2rn
/// to the right. Throws LemmaError when the disk is not inside D.
DiskChain find_nstar(const Contour& c, Vec2 center, double r);

// ---------------------------------------------------------------------------
// Test functions f = g(x1) h(x2) for x2 >= 0, extended oddly to x2 < 0.

/// One-dimensional factor with its first two derivatives.
struct Profile {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

/// Sampled test function and its analytic derivatives.
struct TestFunction {
  RealField f, f_x1, f_x2, lap;
  double grad_l2 = 0.0;  ///< ||grad f||_{L^2}
  double lap_l2 = 0.0;   ///< ||lap f||_{L^2}
  double sup_dx1 = 0.0;  ///< max |d1 f| on the grid
};

struct CurvatureLemmaParams {
  Vec2 center;  ///< centre of B_0, in contour coordinates
  double r = 0.0;
  int n_star = 1;
  Grid grid;
  double shift_x1 = 0.0;  ///< added to contour x1 to reach grid coordinates
  OmegaChoice omega_choice = OmegaChoice::Zero;
  std::optional<RealField> omega;  ///< used with OmegaChoice::Supplied

  void validate() const;
};

/// Cosine ramps: g rises on [0, r], is 1 up to 2 r N*, falls to 0 at
/// 2 r N* + r (s measured from the centre of B_0); h is a cosine bump of
/// half-width r about b.
Profile curvature_g(double s, double r, int n_star);
Profile curvature_h(double x2, double b, double r);

TestFunction build_f_curvature(const CurvatureLemmaParams& p);

struct PerimeterLemmaParams {
  double L = 0.0;       ///< horizontal extent
  double A = 0.0;       ///< first moment of D in x2
  double x1_left = 0.0; ///< leftmost x1 of D, in contour coordinates
  Grid grid;
  double shift_x1 = 0.0;
  OmegaChoice omega_choice = OmegaChoice::Zero;
  std::optional<RealField> omega;

  void validate() const;
};

/// g' ramps linearly over 1/(32A) at both ends of [0, L] and g is reflected
/// about L, so |g''| = 32A. h rises over [0, 1/(4L)] and falls over
/// [4A, 4A + 1/(4L)] with piecewise-quadratic ramps.
Profile perimeter_g(double s, double L, double A);
Profile perimeter_h(double x2, double L, double A);

TestFunction build_f_perimeter(const PerimeterLemmaParams& p);

// ---------------------------------------------------------------------------
// Reports.

struct LemmaReport {
  std::string lemma;  ///< "4.1" or "4.2"
  OmegaChoice omega_choice = OmegaChoice::Zero;
  double lhs = 0.0;       ///< integral of mu d1 f, with D integrated exactly in x1
  double lhs_grid = 0.0;  ///< same integral with the rasterized mu on the grid
  double lhs_upper_half = 0.0;
  double rhs_h1 = 0.0;    ///< ||d1 lap^-1 mu - Omega||_{H^1} ||grad f||
  double rhs_l2 = 0.0;    ///< ||Omega|| ||lap f||
  double grad_f_l2 = 0.0;
  double lap_f_l2 = 0.0;
  double predicted_lower_bound = 0.0;  ///< the lemma's stated constant
  double sharp_lower_bound = 0.0;      ///< what the construction actually guarantees
  double ratio = 0.0;                  ///< lhs / (rhs_h1 + rhs_l2)
  double empirical_constant = 0.0;     ///< C making the lemma's inequality an equality
  // Shape parameters.
  double r = 0.0;
  int n_star = 0;
  double nstar_bound = 0.0;
  double L = 0.0;
  double A = 0.0;
  // Outcomes.
  bool duality_ok = false;
  bool lower_bound_ok = false;
  bool nstar_ok = true;
  bool bounds_ok = true;  ///< build-time sup-norm bounds of f
  std::string detail;

  bool passed() const { return duality_ok && lower_bound_ok && nstar_ok && bounds_ok; }
};

struct LemmaGridOptions {
  int cells_per_r = 16;            ///< Lemma 4.1: hx, hy <= r / cells_per_r
  int cells_per_ramp = 4;          ///< Lemma 4.2: ramps of f resolved by this many cells
  double margin = 1.0;             ///< free space around supports
  int max_cells = 4096;            ///< per direction
  double epsilon_cells = 1.5;      ///< mollifier width of mu, in cells
};

/// Parameters of Lemma 4.1 for D: inscribed disk, N*, and a grid that holds
/// D, its mirror and the support of f.
CurvatureLemmaParams make_curvature_params(const Contour& c, const LemmaGridOptions& opt = {});
PerimeterLemmaParams make_perimeter_params(const Contour& c, const LemmaGridOptions& opt = {});

LemmaReport check_lemma41(const Contour& c, const CurvatureLemmaParams& p, const LemmaGridOptions& opt = {});
LemmaReport check_lemma42(const Contour& c, const PerimeterLemmaParams& p, const LemmaGridOptions& opt = {});

/// 2 (pi sqrt(14) / 8 - pi / 32): the constant stated for Lemma 4.1's lower bound.
double lemma41_stated_constant();
/// 2 (I0 - pi / 32), I0 = integral over the right half of the unit disk of
/// (pi/2) sin(pi s) (1 + cos(pi t)) / 2: the constant the construction
/// guarantees. lhs <= 2 r always, so the stated constant is out of reach.
double lemma41_sharp_constant();

/// Mass bounds used to confine D to the strip for Lemma 4.2.
struct StripMass {
  double above_4A = 0.0;        ///< |D ∩ {x2 > 4A}|, at most 1/4
  double below_quarter_L = 0.0; ///< |D ∩ {x2 < 1/(4L)}|, at most 1/4
  double confined = 0.0;        ///< |D ∩ box|, at least 1/4
};

StripMass strip_mass(const Contour& c, double L, double A, double x1_left);

struct PestovIonin {
  double inscribed_radius = 0.0;
  double lattice_radius = 0.0;
  double lattice_spacing = 0.0;
  double max_abs_curvature = 0.0;
  double product = 0.0;  ///< inscribed_radius * max_abs_curvature
  bool ok = false;       ///< product >= 1 - 1e-2
  /// Lattice maximum within half a lattice diagonal of the refined radius.
  bool lattice_ok = false;
};

PestovIonin pestov_ionin_check(const Contour& c);

}  // namespace bq
