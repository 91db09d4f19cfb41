#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bq/contour.hpp"
#include "bq/solver.hpp"

namespace bq {

/// Configuration error; `what()` names the key and, when known, the line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key=value document: '#' starts a comment, blank lines are ignored,
/// keys are dotted (solver.nu). Remembers the line of every key.
class KeyValueDocument {
 public:
  static KeyValueDocument parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  int line_of(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

struct PatchConfig {
  std::string shape = "ellipse";  ///< ellipse | stadium | polygon-file
  double aspect = 1.2;            ///< ellipse semi-axis ratio (horizontal / vertical)
  double flat = 1.0;              ///< stadium straight length before normalization
  double radius = 0.5;            ///< stadium cap radius before normalization
  std::string file;               ///< contour file for polygon-file
  bool normalize = true;          ///< rescale to unit area
  double center_x = -1.0;         ///< negative: middle of the domain
  double height = 1.5;            ///< b: height of the shape centre above the axis
  int markers = 512;
};

struct VelocityConfig {
  std::string kind = "zero";  ///< zero | mode | vortex-pair | file
  double amplitude = 0.0;
  int mx = 1;
  int my = 1;
  bool odd = true;
  double center_x = -1.0;
  double center_y = 1.5;
  double width = 0.25;
  std::string u1_file, u2_file;
};

struct OutputConfig {
  double dt = 0.01;  ///< diagnostics cadence
  std::string dir = "run";
  bool snapshots = false;
  double snapshot_interval = 1.0;
  int inscribed_every = 10;  ///< inscribed radius every n-th output record
};

struct TrackerConfig {
  double max_spacing = 0.005;
  int max_markers = 65536;
};

struct ExperimentConfig {
  double t_end = 0.0;
  double schedule_base = 0.5;  ///< T_0 of the geometric schedule
  int schedule_count = 0;      ///< 0: every T_n with 2 T_n <= t_end
};

struct RunConfig {
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  SolverConfig solver;
  double epsilon_cells = 3.0;  ///< interface width in units of max(hx, hy)
  PatchConfig patch;
  VelocityConfig velocity;
  OutputConfig output;
  TrackerConfig tracker;
  ExperimentConfig experiment;

  Grid grid() const { return Grid(nx, ny, lx, ly); }
  double epsilon() const;
};

/// Parses and validates; unknown keys, missing required keys, type errors and
/// constraint violations raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Every key, defaults included, in a canonical order; parse_config of the
/// result reproduces the configuration exactly.
std::string echo_config(const RunConfig& c);

/// Builds the initial patch from the configuration (before lifting).
Contour build_patch(const RunConfig& c);
VelocityRecipe build_velocity(const RunConfig& c);

/// Shape sweep for verify-lemmas.
struct LemmaSweepConfig {
  std::vector<double> ellipse_aspects{1.0, 2.0, 4.0, 8.0};
  int star_count = 0;
  unsigned seed = 1;
  std::vector<std::string> files;
  double height = 1.5;
  int markers = 1024;
  std::vector<std::string> omega{"zero"};
  std::string omega_file;
  int cells_per_r = 16;
  double margin = 1.0;
  std::string dir = "lemmas";
};

LemmaSweepConfig parse_lemma_config(const std::string& text);
LemmaSweepConfig load_lemma_config(const std::string& path);

/// Reads a whole file; throws ConfigError naming the path on failure.
std::string read_text_file(const std::string& path);

}  // namespace bq
