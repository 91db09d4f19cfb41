#include "bq/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include <json.hpp>

#include "bq/io.hpp"

namespace bq {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double upper_half_integral(const RealField& rho) {
  const Grid& g = rho.grid;
  double sum = 0.0;
  for (int j = g.axis_row() + 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) sum += rho.values[g.index(i, j)];
  return sum * g.cell_area();
}

GeometrySample sample_geometry(const Contour& c, const State& s, const Grid& g, double margin, bool inscribed) {
  const PatchGeometry pg = measure(c, inscribed);
  GeometrySample out;
  out.t = s.t;
  out.max_abs_curvature = pg.max_abs_curvature;
  out.horizontal_extent = pg.horizontal_extent;
  out.area = pg.area;
  out.perimeter = pg.perimeter;
  out.centroid_height = pg.centroid_height;
  out.inscribed_radius = inscribed ? pg.inscribed_radius : kNaN;
  out.field_area = upper_half_integral(s.rho);
  out.contour_E_P = 2.0 * first_moment_x2(c);
  out.markers = c.size();
  out.core_violations = count_core_violations(c, g, margin);
  return out;
}

const char* kGeometryHeader =
    "t,max_abs_curvature,horizontal_extent,area,perimeter,centroid_height,inscribed_radius,field_area,"
    "contour_E_P,markers,core_violations";

std::string geometry_row(const GeometrySample& s) {
  return format_double(s.t) + "," + format_double(s.max_abs_curvature) + "," + format_double(s.horizontal_extent) +
         "," + format_double(s.area) + "," + format_double(s.perimeter) + "," + format_double(s.centroid_height) +
         "," + format_double(s.inscribed_radius) + "," + format_double(s.field_area) + "," +
         format_double(s.contour_E_P) + "," + std::to_string(s.markers) + "," + std::to_string(s.core_violations);
}

/// Redistribution is needed when markers are too sparse for the tracker
/// spacing or too uneven relative to their mean spacing.
bool needs_redistribution(const Contour& c, const TrackerConfig& t) {
  const double mean = c.mean_spacing();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double d = norm(c[(i + 1) % c.size()] - c[i]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const bool sparse = mean > t.max_spacing && 2 * c.size() <= static_cast<std::size_t>(t.max_markers);
  return sparse || lo < 0.25 * mean || hi > 4.0 * mean;
}

std::string snapshot_stem(const fs::path& dir, const std::string& tag) { return (dir / tag).string(); }

void write_snapshot(const fs::path& dir, const std::string& tag, const State& s, const Contour& c) {
  write_contour(snapshot_stem(dir, "contour_" + tag + ".txt"), c, s.t);
  write_field(snapshot_stem(dir, "rho_" + tag + ".bin"), s.rho, s.t);
  write_field(snapshot_stem(dir, "omega_" + tag + ".bin"), s.omega, s.t);
}

std::string index_tag(std::size_t k) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%06zu", k);
  return buf;
}

}  // namespace

std::vector<GrowthRow> growth_table(const std::vector<GeometrySample>& geo) {
  std::vector<GrowthRow> out;
  double kmax = 0.0, lmax = 0.0;
  for (const auto& g : geo) {
    kmax = std::max(kmax, g.max_abs_curvature);
    lmax = std::max(lmax, g.horizontal_extent);
    GrowthRow r;
    r.t = g.t;
    r.max_curvature = g.max_abs_curvature;
    r.extent = g.horizontal_extent;
    r.running_max_curvature = kmax;
    r.running_max_extent = lmax;
    const double scale = g.t > 0.0 ? std::pow(g.t, 1.0 / 6.0) : kNaN;
    r.curvature_over_t16 = kmax / scale;
    r.extent_over_t16 = lmax / scale;
    out.push_back(r);
  }
  return out;
}

RunResult run_simulation(const RunConfig& cfg, std::ostream* log) {
  RunResult result;
  const Grid g = cfg.grid();
  const double eps = cfg.epsilon();
  result.epsilon = eps;
  const fs::path dir(cfg.output.dir);

  auto write_status = [&]() {
    std::ofstream st(dir / "status");
    st << result.status << "\n";
    if (!result.message.empty()) st << result.message << "\n";
  };

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    result.exit_code = kExitUsage;
    result.status = "io-error";
    result.message = "cannot create '" + dir.string() + "': " + ec.message();
    return result;
  }
  {
    std::ofstream echo(dir / "config.echo");
    echo << echo_config(cfg);
  }

  Contour contour;
  State state;
  VelocityRecipe u0;
  try {
    contour = build_patch(cfg);
    u0 = build_velocity(cfg);
    state = project(seed_state(contour, 0.0, u0, g, eps), cfg.solver);
  } catch (const std::exception& e) {
    result.exit_code = kExitUsage;
    result.status = "invalid-initial-data";
    result.message = e.what();
    write_status();
    return result;
  }

  std::optional<CsvWriter> diag, geom;
  try {
    diag.emplace((dir / "diagnostics.csv").string(), diagnostics_header());
    geom.emplace((dir / "geometry.csv").string(), kGeometryHeader);
    write_snapshot(dir, "initial", state, contour);
  } catch (const IoError& e) {
    result.exit_code = kExitUsage;
    result.status = "io-error";
    result.message = e.what();
    write_status();
    return result;
  }

  const double t_end = cfg.experiment.t_end;
  const double dt_out = cfg.output.dt;
  const double margin = 2.0 * eps;
  const RedistributeOptions redist{cfg.tracker.max_spacing, static_cast<std::size_t>(cfg.tracker.max_markers)};
  DiagnosticsSeries series(cfg.solver.nu);
  std::size_t written = 0;
  auto flush_rows = [&](std::size_t upto) {
    for (; written < upto; ++written) diag->row(diagnostics_row(series.records()[written]));
  };

  std::size_t output_index = 0;
  auto record_output = [&]() {
    series.add(instantaneous(state, cfg.solver.nu));
    const bool inscribed = output_index % static_cast<std::size_t>(cfg.output.inscribed_every) == 0;
    result.geometry.push_back(sample_geometry(contour, state, g, margin, inscribed));
    geom->row(geometry_row(result.geometry.back()));
    // A record is final once its successor exists.
    if (t_end > 0.0) flush_rows(series.records().size() - 1);
  };

  const auto n_out = static_cast<std::size_t>(std::llround(std::ceil(t_end / dt_out - 1e-9)));
  const auto snap_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.output.snapshot_interval / dt_out)));
  double next_progress = 0.0;

  try {
    record_output();
    while (output_index < n_out) {
      const double next = std::min(t_end, static_cast<double>(output_index + 1) * dt_out);
      while (state.t < next) {
        const double remaining = next - state.t;
        const double limit = cfl_dt(state, cfg.solver);
        const double substeps = std::ceil(remaining / limit * (1.0 - 1e-12));
        const bool last = substeps <= 1.0;
        const double dt = last ? remaining : remaining / substeps;
        StepResult sr = step_with_stages(state, dt, cfg.solver);
        const std::array<StreamSampler, 4> samplers{StreamSampler(sr.stage_omega[0]), StreamSampler(sr.stage_omega[1]),
                                                    StreamSampler(sr.stage_omega[2]), StreamSampler(sr.stage_omega[3])};
        contour = advect_contour(contour, [&](int stage, Vec2 p) { return samplers[stage](p); }, dt);
        state = std::move(sr.state);
        if (last) state.t = next;
        ++result.steps;
      }
      ++output_index;
      if (!is_simple(contour)) {
        result.exit_code = kExitNumerical;
        result.status = "self-intersection";
        result.message = "contour self-intersects at t=" + format_double(state.t);
        break;
      }
      if (needs_redistribution(contour, cfg.tracker)) contour = redistribute(contour, redist);
      record_output();
      if (cfg.output.snapshots && output_index % snap_every == 0)
        write_snapshot(dir, index_tag(output_index), state, contour);
      if (log && state.t >= next_progress) {
        const auto& r = series.records().back();
        *log << "t=" << state.t << " E_P=" << r.E_P << " E_K=" << r.E_K << " res_energy=" << r.residual_energy
             << " res_lemma31=" << r.residual_lemma31 << " markers=" << contour.size() << std::endl;
        next_progress += 1.0;
      }
    }
  } catch (const SolverError& e) {
    result.exit_code = kExitNumerical;
    result.status = "solver-abort";
    result.message = e.what();
  } catch (const GeometryError& e) {
    result.exit_code = kExitNumerical;
    result.status = "geometry-abort";
    result.message = e.what();
  } catch (const IoError& e) {
    result.exit_code = kExitNumerical;
    result.status = "io-error";
    result.message = e.what();
  }

  result.t_final = state.t;
  try {
    if (t_end > 0.0) flush_rows(series.records().size());
    result.records = series.records();
    result.growth = growth_table(result.geometry);

    CsvWriter growth((dir / "growth.csv").string(),
                     "t,max_curvature,extent,running_max_curvature,running_max_extent,curvature_over_t16,"
                     "extent_over_t16");
    for (const auto& r : result.growth)
      growth.row(format_double(r.t) + "," + format_double(r.max_curvature) + "," + format_double(r.extent) + "," +
                 format_double(r.running_max_curvature) + "," + format_double(r.running_max_extent) + "," +
                 format_double(r.curvature_over_t16) + "," + format_double(r.extent_over_t16));

    auto schedule = geometric_schedule(cfg.experiment.schedule_base, state.t);
    if (cfg.experiment.schedule_count > 0 && schedule.size() > static_cast<std::size_t>(cfg.experiment.schedule_count))
      schedule.resize(static_cast<std::size_t>(cfg.experiment.schedule_count));
    if (t_end > 0.0 && !schedule.empty()) {
      for (const auto& s : extract_low_dissipation_times(result.records, schedule)) {
        LowDissipationRow row;
        row.sample = s;
        row.rate = std::pow(static_cast<double>(s.n) * s.t_n, 1.0 / 6.0);
        row.max_curvature = result.geometry[s.record].max_abs_curvature;
        row.extent = result.geometry[s.record].horizontal_extent;
        result.low_dissipation.push_back(row);
      }
    }
    CsvWriter low((dir / "low_dissipation.csv").string(),
                  "n,T_n,t_n,value,mean_value,rms_value,rate,max_curvature,extent,curvature_over_rate,"
                  "extent_over_rate");
    for (const auto& r : result.low_dissipation)
      low.row(std::to_string(r.sample.n) + "," + format_double(r.sample.T_n) + "," + format_double(r.sample.t_n) +
              "," + format_double(r.sample.value) + "," + format_double(r.sample.mean_value) + "," +
              format_double(r.sample.rms_value) + "," + format_double(r.rate) + "," + format_double(r.max_curvature) +
              "," + format_double(r.extent) + "," + format_double(r.max_curvature / r.rate) + "," +
              format_double(r.extent / r.rate));

    write_snapshot(dir, "final", state, contour);

    nlohmann::ordered_json js;
    js["status"] = result.status;
    js["message"] = result.message;
    js["t_final"] = state.t;
    js["steps"] = result.steps;
    js["epsilon"] = eps;
    js["velocity_class"] = velocity_class(u0);
    js["records"] = result.records.size();
    double max_e = 0.0, max_31 = 0.0, max_epp = 0.0, max_par = 0.0;
    for (const auto& r : result.records) {
      max_e = std::max(max_e, r.residual_energy);
      max_31 = std::max(max_31, r.residual_lemma31);
      if (std::isfinite(r.residual_epp)) max_epp = std::max(max_epp, r.residual_epp);
      max_par = std::max(max_par, r.parity_residual);
    }
    js["max_residual_energy"] = max_e;
    js["max_residual_lemma31"] = max_31;
    js["max_residual_epp"] = max_epp;
    js["max_parity_residual"] = max_par;
    if (!result.records.empty()) {
      const BoundReport b = lemma31_bound_check(result.records, cfg.solver.nu);
      js["cum_dissipation_final"] = b.dissipation_final;
      js["cum_hdot1_final"] = b.hdot1_final;
      js["lemma31_empirical_constant"] = b.empirical_constant;
    }
    if (!result.growth.empty()) {
      const auto& first = result.growth.front();
      const auto& last = result.growth.back();
      js["curvature_initial"] = first.max_curvature;
      js["curvature_running_max"] = last.running_max_curvature;
      js["curvature_growth_factor"] = last.running_max_curvature / first.max_curvature;
      js["extent_initial"] = first.extent;
      js["extent_running_max"] = last.running_max_extent;
      js["extent_growth_factor"] = last.running_max_extent / first.extent;
      js["final_markers"] = result.geometry.back().markers;
    }
    std::ofstream(dir / "summary.json") << js.dump(2) << "\n";
  } catch (const std::exception& e) {
    if (result.exit_code == kExitOk) {
      result.exit_code = kExitNumerical;
      result.status = "io-error";
    }
    result.message += (result.message.empty() ? "" : "; ") + std::string(e.what());
  }
  write_status();
  return result;
}

// ---------------------------------------------------------------------------

DiagnoseReport diagnose_run(const std::string& dir_name, double tolerance) {
  const fs::path dir(dir_name);
  const RunConfig cfg = load_config((dir / "config.echo").string());
  const auto records = read_diagnostics_csv((dir / "diagnostics.csv").string());
  DiagnoseReport rep;
  for (const auto& r : records) {
    rep.max_residual_energy = std::max(rep.max_residual_energy, r.residual_energy);
    rep.max_residual_lemma31 = std::max(rep.max_residual_lemma31, r.residual_lemma31);
    if (std::isfinite(r.residual_epp)) rep.max_residual_epp = std::max(rep.max_residual_epp, r.residual_epp);
  }

  // Cumulative columns and residuals, re-derived from the instantaneous ones.
  const auto rederived = resample(records, 1, cfg.solver.nu);
  auto compare = [&](const std::string& name, double a, double b) {
    if (!std::isfinite(a) && !std::isfinite(b)) return;
    const double d = std::abs(a - b) / std::max(1.0, std::abs(b));
    if (!(d <= rep.max_rel_diff)) {
      rep.max_rel_diff = d;
      rep.worst_column = name;
    }
  };
  for (std::size_t k = 0; k < rederived.size() && k < records.size(); ++k) {
    compare("cum_dissipation", rederived[k].cum_dissipation, records[k].cum_dissipation);
    compare("cum_hdot1", rederived[k].cum_hdot1, records[k].cum_hdot1);
    compare("residual_energy", rederived[k].residual_energy, records[k].residual_energy);
    compare("residual_lemma31", rederived[k].residual_lemma31, records[k].residual_lemma31);
  }

  // Instantaneous columns, recomputed from every field snapshot.
  std::vector<fs::path> rhos;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("rho_", 0) == 0 && name.size() > 8 && name.substr(name.size() - 4) == ".bin") rhos.push_back(e.path());
  }
  std::sort(rhos.begin(), rhos.end());
  for (const auto& rp : rhos) {
    const std::string tag = rp.filename().string().substr(4);
    double t = 0.0, t2 = 0.0;
    State s{read_field(rp.string(), &t), read_field((dir / ("omega_" + tag)).string(), &t2), 0.0};
    if (t != t2) throw IoError(rp.string() + ": rho and omega snapshot times differ");
    s.t = t;
    const auto it = std::find_if(records.begin(), records.end(), [&](const DiagnosticsRecord& r) { return r.t == t; });
    if (it == records.end()) continue;
    const DiagnosticsRecord now = instantaneous(s, cfg.solver.nu);
    compare("E_P", now.E_P, it->E_P);
    compare("E_K", now.E_K, it->E_K);
    compare("ep_prime", now.ep_prime, it->ep_prime);
    compare("enstrophy", now.enstrophy, it->enstrophy);
    compare("A_t", now.A_t, it->A_t);
    compare("B_t", now.B_t, it->B_t);
    compare("hdot1_sq", now.hdot1_sq, it->hdot1_sq);
    compare("h_neg2", now.h_neg2, it->h_neg2);
    compare("rho_l2", now.rho_l2, it->rho_l2);
    ++rep.snapshots;
  }
  rep.ok = rep.max_rel_diff <= tolerance;
  return rep;
}

}  // namespace bq
