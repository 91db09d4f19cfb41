#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bq/config.hpp"
#include "bq/contour.hpp"
#include "bq/diagnostics.hpp"

namespace bq {

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitInvariant = 3 };

/// Contour measurements at one output time.
struct GeometrySample {
  double t = 0.0;
  double max_abs_curvature = 0.0;
  double horizontal_extent = 0.0;
  double area = 0.0;
  double perimeter = 0.0;
  double centroid_height = 0.0;
  double inscribed_radius = 0.0;  ///< NaN on records where it is not computed
  double field_area = 0.0;        ///< integral of rho over the upper half
  double contour_E_P = 0.0;       ///< 2 * first moment of the contour
  std::size_t markers = 0;
  std::size_t core_violations = 0;
};

/// Running maxima of curvature and extent, normalized by t^(1/6).
struct GrowthRow {
  double t = 0.0;
  double max_curvature = 0.0;
  double extent = 0.0;
  double running_max_curvature = 0.0;
  double running_max_extent = 0.0;
  double curvature_over_t16 = 0.0;  ///< NaN at t = 0
  double extent_over_t16 = 0.0;
};

struct LowDissipationRow {
  LowDissipationSample sample;
  double rate = 0.0;  ///< (n t_n)^(1/6)
  double max_curvature = 0.0;
  double extent = 0.0;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string status = "ok";  ///< ok | solver-abort | self-intersection | io-error
  std::string message;
  double t_final = 0.0;
  std::size_t steps = 0;
  double epsilon = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<GeometrySample> geometry;
  std::vector<GrowthRow> growth;
  std::vector<LowDissipationRow> low_dissipation;
};

std::vector<GrowthRow> growth_table(const std::vector<GeometrySample>& geo);

/// Runs the configured experiment, writing every output file into
/// cfg.output.dir. Never throws for numerical trouble: the result carries
/// the exit code, and the directory holds a valid truncated CSV plus a
/// status file. `log` receives occasional progress lines.
RunResult run_simulation(const RunConfig& cfg, std::ostream* log = nullptr);

struct DiagnoseReport {
  std::size_t snapshots = 0;
  double max_rel_diff = 0.0;  ///< worst relative difference over recomputed columns
  double max_residual_energy = 0.0;
  double max_residual_lemma31 = 0.0;
  double max_residual_epp = 0.0;
  std::string worst_column;
  bool ok = false;
};

/// Recomputes instantaneous diagnostics from the field snapshots of a run
/// directory and compares them with its diagnostics.csv.
DiagnoseReport diagnose_run(const std::string& dir, double tolerance = 1e-10);

}  // namespace bq
