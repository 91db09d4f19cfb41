// Command-line front end: simulate, verify-lemmas, diagnose.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "bq/config.hpp"
#include "bq/io.hpp"
#include "bq/run.hpp"
#include "bq/sweep.hpp"

namespace {

int simulate(const std::string& path, bool quiet) {
  const bq::RunConfig cfg = bq::load_config(path);
  const bq::RunResult r = bq::run_simulation(cfg, quiet ? nullptr : &std::cerr);
  std::cout << "status: " << r.status << "\n";
  if (!r.message.empty()) std::cout << "message: " << r.message << "\n";
  std::cout << "t_final: " << r.t_final << "  steps: " << r.steps << "  records: " << r.records.size()
            << "  output: " << cfg.output.dir << "\n";
  return r.exit_code;
}

int verify(const std::string& path) {
  const bq::LemmaSweepConfig cfg = bq::load_lemma_config(path);
  const auto shapes = bq::sweep_shapes(cfg);
  const auto rows = bq::verify_lemmas(shapes, cfg, bq::worker_count());
  std::filesystem::create_directories(cfg.dir);
  const std::string out = (std::filesystem::path(cfg.dir) / "lemmas.csv").string();
  bq::CsvWriter csv(out, bq::lemma_csv_header());
  std::size_t failed = 0;
  for (const auto& r : rows) {
    csv.row(bq::lemma_csv_row(r));
    if (!r.passed) {
      ++failed;
      std::cout << "FAIL " << r.shape << " " << r.kind << (r.omega.empty() ? "" : " omega=" + r.omega) << ": "
                << (r.error.empty() ? r.report.detail : r.error) << "\n";
    }
  }
  std::cout << rows.size() << " rows, " << failed << " failed; wrote " << out << "\n";
  return failed ? bq::kExitInvariant : bq::kExitOk;
}

int diagnose(const std::string& dir, double tol) {
  const bq::DiagnoseReport r = bq::diagnose_run(dir, tol);
  std::cout << "snapshots compared: " << r.snapshots << "\n"
            << "max relative difference: " << r.max_rel_diff
            << (r.worst_column.empty() ? "" : " (" + r.worst_column + ")") << "\n"
            << "max residual_energy: " << r.max_residual_energy << "\n"
            << "max residual_lemma31: " << r.max_residual_lemma31 << "\n"
            << "max residual_epp: " << r.max_residual_epp << "\n"
            << (r.ok ? "consistent" : "MISMATCH") << "\n";
  return r.ok ? bq::kExitOk : bq::kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous Boussinesq temperature-patch laboratory"};
  app.require_subcommand(1);

  std::string sim_config;
  bool quiet = false;
  auto* sim = app.add_subcommand("simulate", "Run an experiment from a key=value config");
  sim->add_option("config", sim_config, "Config file")->required();
  sim->add_flag("-q,--quiet", quiet, "No progress lines");

  std::string lemma_config;
  auto* lem = app.add_subcommand("verify-lemmas", "Check the geometric lemmas on a shape sweep");
  lem->add_option("config", lemma_config, "Sweep config file")->required();

  std::string run_dir;
  double tol = 1e-10;
  auto* diag = app.add_subcommand("diagnose", "Recompute diagnostics from a run directory's snapshots");
  diag->add_option("run-dir", run_dir, "Run directory")->required();
  diag->add_option("--tolerance", tol, "Relative tolerance for the comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : bq::kExitUsage;
  }

  try {
    if (*sim) return simulate(sim_config, quiet);
    if (*lem) return verify(lemma_config);
    return diagnose(run_dir, tol);
  } catch (const bq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bq::kExitUsage;
  } catch (const bq::IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return bq::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bq::kExitNumerical;
  }
}
