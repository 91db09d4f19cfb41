#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <variant>

#include "bq/contour.hpp"
#include "bq/field.hpp"

namespace bq {

/// Temperature and vorticity at time t.
struct State {
  RealField rho;
  RealField omega;
  double t = 0.0;
};

struct SolverConfig {
  double nu = 0.02;  ///< kinematic viscosity, > 0
  double cfl = 0.5;
  double dt_max = 0.01;
  bool enforce_symmetry = true;
  bool dealias = true;

  void validate() const;
};

/// Aborts a step: CFL violation or a non-finite intermediate.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Initial velocity recipes. Each is given through a stream function psi that
// is odd in x2, so that u1 = -d2 psi is even and u2 = d1 psi is odd.

struct ZeroVelocity {};

/// psi = amplitude * sin(2 pi mx x1 / lx) * sin(2 pi my x2 / ly); with
/// odd_psi = false the x2 factor is a cosine, which breaks the parity contract
/// and is rejected.
struct ModeVelocity {
  double amplitude = 0.0;
  int mx = 1;
  int my = 1;
  bool odd_psi = true;
};

/// Gaussian vortex and its mirror image of opposite sign.
struct VortexPairVelocity {
  double amplitude = 0.0;
  Vec2 center{};
  double width = 0.25;
};

/// Velocity components read from field snapshots.
struct FieldVelocity {
  RealField u1;
  RealField u2;
};

using VelocityRecipe = std::variant<ZeroVelocity, ModeVelocity, VortexPairVelocity, FieldVelocity>;

/// Regularity class of the initial velocity: "Cc-infinity" for zero data,
/// "H3" for smooth non-compact data (periodic modes, Gaussians, fields).
std::string velocity_class(const VelocityRecipe& r);

/// Vorticity of a recipe on the grid; throws std::invalid_argument when the
/// parity contract (u1 even, u2 odd, divergence-free) is violated.
RealField initial_vorticity(const VelocityRecipe& r, const Grid& g);

/// rho = mollified 1_D - 1_{D*} with D the patch lifted by height_offset;
/// omega = curl u0.
State seed_state(const Contour& patch, double height_offset, const VelocityRecipe& u0, const Grid& g,
                 double epsilon);

struct Rhs {
  RealField d_omega;
  RealField d_rho;
  RealField u1;
  RealField u2;
};

/// Nonlinear and buoyancy tendencies; the viscous term is left to the
/// integrating factor.
Rhs rhs(const State& s, const SolverConfig& cfg);

/// min(dt_max, cfl * min(hx, hy) / max|u|).
double cfl_dt(const State& s, const SolverConfig& cfg);

/// (f(x1, x2) - f(x1, -x2)) / 2 on the grid.
RealField enforce_odd_symmetry(const RealField& f);
/// max |f(x1,x2) + f(x1,-x2)| / max(max|f|, tiny).
double odd_parity_residual(const RealField& f);

/// Applies the solver's state projections (dealiasing, odd symmetry).
State project(const State& s, const SolverConfig& cfg);

struct StepResult {
  State state;
  /// Vorticity spectra at the four RK4 stages, for co-advecting markers.
  std::array<SpectralField, 4> stage_omega;
};

/// One integrating-factor RK4 step.
StepResult step_with_stages(const State& s, double dt, const SolverConfig& cfg);
State step(const State& s, double dt, const SolverConfig& cfg);

/// Velocity sampler that interpolates the stream function with bicubic
/// Hermite patches (values and spectral derivatives at nodes) and
/// differentiates the interpolant, so the sampled field is exactly
/// divergence-free.
class StreamSampler {
 public:
  explicit StreamSampler(const SpectralField& omega_hat);
  Vec2 operator()(Vec2 p) const;

 private:
  Grid grid_;
  RealField psi_, psi_x_, psi_y_, psi_xy_;
};

}  // namespace bq
