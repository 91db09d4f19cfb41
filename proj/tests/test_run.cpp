#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bq/io.hpp"
#include "bq/run.hpp"

using namespace bq;
namespace fs = std::filesystem;

namespace {

RunConfig small_run(const std::string& name, double t_end) {
  const fs::path dir = fs::temp_directory_path() / ("bq_run_" + name);
  fs::remove_all(dir);
  std::ostringstream text;
  text << "grid.nx=64\ngrid.ny=64\ngrid.Lx=8\ngrid.Ly=8\nsolver.nu=0.02\nsolver.dt_max=0.02\n"
       << "output.dt=0.04\noutput.snapshots=true\noutput.snapshot_interval=0.08\n"
       << "experiment.t_end=" << t_end << "\noutput.dir=" << dir.string() << "\n";
  return parse_config(text.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("t_end = 0 writes a header-only CSV and the initial snapshot") {
  const RunConfig cfg = small_run("zero", 0.0);
  const RunResult r = run_simulation(cfg);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.records.size() == 1);
  const fs::path dir = cfg.output.dir;
  CHECK(slurp(dir / "diagnostics.csv") == diagnostics_header() + "\n");
  CHECK(fs::exists(dir / "contour_initial.txt"));
  CHECK(fs::exists(dir / "rho_initial.bin"));
  CHECK(slurp(dir / "status").starts_with("ok"));
}

TEST_CASE("short run is deterministic and reproducible from its config echo") {
  const RunConfig cfg = small_run("a", 0.4);
  const RunResult a = run_simulation(cfg);
  REQUIRE(a.exit_code == kExitOk);
  CHECK(a.t_final == 0.4);
  CHECK(a.records.size() == 11);
  CHECK(a.records.back().t == 0.4);

  const fs::path dir = cfg.output.dir;
  const std::string csv = slurp(dir / "diagnostics.csv");
  CHECK(read_diagnostics_csv((dir / "diagnostics.csv").string()).size() == a.records.size());

  // Rerun from the echoed config into a different directory.
  RunConfig again = parse_config(slurp(dir / "config.echo"));
  const fs::path dir2 = fs::temp_directory_path() / "bq_run_b";
  fs::remove_all(dir2);
  again.output.dir = dir2.string();
  const RunResult b = run_simulation(again);
  REQUIRE(b.exit_code == kExitOk);
  CHECK(slurp(dir2 / "diagnostics.csv") == csv);
  CHECK(slurp(dir2 / "contour_final.txt") == slurp(dir / "contour_final.txt"));

  const DiagnoseReport rep = diagnose_run(dir.string());
  CHECK(rep.ok);
  CHECK(rep.snapshots >= 5);
  CHECK(rep.max_rel_diff <= 1e-10);
}

TEST_CASE("invalid initial data exits with a config error and a status file") {
  RunConfig cfg = small_run("bad", 0.1);
  cfg.patch.height = 0.3;  // the unit-area ellipse would cross the axis
  const RunResult r = run_simulation(cfg);
  CHECK(r.exit_code != kExitOk);
  CHECK(fs::exists(fs::path(cfg.output.dir) / "status"));
}

TEST_CASE("growth table running maxima") {
  std::vector<GeometrySample> geo(3);
  geo[0] = {.t = 0.0, .max_abs_curvature = 2.0, .horizontal_extent = 1.0};
  geo[1] = {.t = 1.0, .max_abs_curvature = 5.0, .horizontal_extent = 0.5};
  geo[2] = {.t = 64.0, .max_abs_curvature = 3.0, .horizontal_extent = 4.0};
  const auto g = growth_table(geo);
  REQUIRE(g.size() == 3);
  CHECK(std::isnan(g[0].curvature_over_t16));
  CHECK(g[1].running_max_extent == 1.0);
  CHECK(g[2].running_max_curvature == 5.0);
  CHECK(g[2].curvature_over_t16 == doctest::Approx(2.5));
  CHECK(g[2].extent_over_t16 == doctest::Approx(2.0));
}
