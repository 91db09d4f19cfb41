#include "bq/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

#include "bq/io.hpp"

namespace bq {

Contour random_star(unsigned seed, int index, double height, std::size_t markers) {
  std::seed_seq seq{seed, static_cast<unsigned>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> amps, phases;
  for (int m = 2; m <= 5; ++m) {
    amps.push_back(0.2 / (m - 1) * unit(rng));
    phases.push_back(2.0 * std::numbers::pi * unit(rng));
  }
  const Contour raw = normalize_area(make_star({0.0, 0.0}, 1.0, amps, phases, markers), 1.0);
  const PatchGeometry geo = measure(raw, false);
  return raw.translated({0.0, height - geo.centroid_height});
}

std::vector<NamedShape> sweep_shapes(const LemmaSweepConfig& cfg) {
  std::vector<NamedShape> out;
  const auto n = static_cast<std::size_t>(cfg.markers);
  for (double a : cfg.ellipse_aspects)
    out.push_back({"ellipse-" + format_double(a), make_unit_area_ellipse({0.0, cfg.height}, a, n)});
  for (int k = 0; k < cfg.star_count; ++k)
    out.push_back({"star-" + std::to_string(k), random_star(cfg.seed, k, cfg.height, n)});
  for (const auto& f : cfg.files) out.push_back({f, read_contour(f)});
  return out;
}

RealField resample_field(const RealField& src, const Grid& dst, double shift_x1) {
  const Grid& s = src.grid;
  RealField out(dst);
  for (int j = 0; j < dst.ny; ++j) {
    const double y = dst.x2(j);
    const double fy = (y + 0.5 * s.ly) / s.hy();
    if (fy < 0.0 || fy > s.ny) continue;
    const int j0 = std::min(static_cast<int>(std::floor(fy)), s.ny - 1);
    const double wy = fy - j0;
    const int j1 = (j0 + 1) % s.ny;
    for (int i = 0; i < dst.nx; ++i) {
      const double x = dst.x1(i) - shift_x1;
      const double fx = x / s.hx();
      if (fx < 0.0 || fx > s.nx) continue;
      const int i0 = std::min(static_cast<int>(std::floor(fx)), s.nx - 1);
      const double wx = fx - i0;
      const int i1 = (i0 + 1) % s.nx;
      out.values[dst.index(i, j)] =
          (1 - wy) * ((1 - wx) * src.values[s.index(i0, j0)] + wx * src.values[s.index(i1, j0)]) +
          wy * ((1 - wx) * src.values[s.index(i0, j1)] + wx * src.values[s.index(i1, j1)]);
    }
  }
  return out;
}

int worker_count() {
  const char* env = std::getenv("BQ_WORKERS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

namespace {

/// All rows of one shape, in a fixed order.
std::vector<LemmaRow> shape_rows(const NamedShape& s, const LemmaSweepConfig& cfg, const RealField* supplied) {
  std::vector<LemmaRow> rows;
  LemmaGridOptions opt;
  opt.cells_per_r = cfg.cells_per_r;
  opt.margin = cfg.margin;

  auto with_omega = [&](auto params, const std::string& choice) {
    params.omega_choice = omega_choice_from_string(choice);
    if (params.omega_choice == OmegaChoice::Supplied)
      params.omega = resample_field(*supplied, params.grid, params.shift_x1);
    return params;
  };

  std::optional<CurvatureLemmaParams> p41;
  std::string err41;
  try {
    p41 = make_curvature_params(s.contour, opt);
  } catch (const LemmaError& e) {
    err41 = e.what();
  }
  std::optional<PerimeterLemmaParams> p42;
  std::string err42;
  try {
    p42 = make_perimeter_params(s.contour, opt);
  } catch (const LemmaError& e) {
    err42 = e.what();
  }

  for (const auto& choice : cfg.omega) {
    LemmaRow row{s.name, "4.1", choice, {}, {}, false, err41};
    if (p41) {
      try {
        row.report = check_lemma41(s.contour, with_omega(*p41, choice), opt);
        row.passed = row.report.passed();
      } catch (const LemmaError& e) {
        row.error = e.what();
      }
    }
    rows.push_back(row);
  }
  for (const auto& choice : cfg.omega) {
    LemmaRow row{s.name, "4.2", choice, {}, {}, false, err42};
    if (p42) {
      try {
        row.report = check_lemma42(s.contour, with_omega(*p42, choice), opt);
        row.passed = row.report.passed();
      } catch (const LemmaError& e) {
        row.error = e.what();
      }
    }
    rows.push_back(row);
  }
  LemmaRow pi{s.name, "pestov-ionin", "", {}, {}, false, ""};
  try {
    pi.pestov = pestov_ionin_check(s.contour);
    pi.passed = pi.pestov.ok && pi.pestov.lattice_ok;
  } catch (const GeometryError& e) {
    pi.error = e.what();
  }
  rows.push_back(pi);
  return rows;
}

}  // namespace

std::vector<LemmaRow> verify_lemmas(const std::vector<NamedShape>& shapes, const LemmaSweepConfig& cfg,
                                    int workers) {
  std::optional<RealField> supplied;
  for (const auto& o : cfg.omega)
    if (omega_choice_from_string(o) == OmegaChoice::Supplied && !supplied) supplied = read_field(cfg.omega_file);

  std::vector<std::vector<LemmaRow>> per_shape(shapes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < shapes.size();)
      per_shape[k] = shape_rows(shapes[k], cfg, supplied ? &*supplied : nullptr);
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(shapes.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
  }
  std::vector<LemmaRow> out;
  for (auto& rows : per_shape) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

std::string lemma_csv_header() {
  return "shape,lemma,omega,passed,lhs,lhs_grid,lhs_upper_half,rhs_h1,rhs_l2,ratio,predicted_lower_bound,"
         "sharp_lower_bound,empirical_constant,grad_f_l2,lap_f_l2,r,n_star,nstar_bound,L,A,duality_ok,"
         "lower_bound_ok,nstar_ok,bounds_ok,pi_product,pi_max_abs_curvature,pi_lattice_radius,pi_lattice_spacing,"
         "detail";
}

std::string lemma_csv_row(const LemmaRow& r) {
  auto b = [](bool v) { return std::string(v ? "1" : "0"); };
  auto d = [](double v) { return format_double(v); };
  const double nan = std::nan("");
  std::string detail = r.error.empty() ? r.report.detail : r.error;
  for (char& ch : detail)
    if (ch == ',' || ch == '\n') ch = ';';
  std::string s = r.shape + "," + r.kind + "," + r.omega + "," + b(r.passed) + ",";
  if (r.kind == "pestov-ionin") {
    const auto& p = r.pestov;
    for (int k = 0; k < 11; ++k) s += d(nan) + ",";
    s += d(p.inscribed_radius) + ",";
    for (int k = 0; k < 4; ++k) s += d(nan) + ",";
    s += ",,,,";  // lemma flags do not apply
    s += d(p.product) + "," + d(p.max_abs_curvature) + "," + d(p.lattice_radius) + "," + d(p.lattice_spacing) + ",";
  } else {
    const auto& q = r.report;
    s += d(q.lhs) + "," + d(q.lhs_grid) + "," + d(q.lhs_upper_half) + "," + d(q.rhs_h1) + "," + d(q.rhs_l2) + "," +
         d(q.ratio) + "," + d(q.predicted_lower_bound) + "," + d(q.sharp_lower_bound) + "," +
         d(q.empirical_constant) + "," + d(q.grad_f_l2) + "," + d(q.lap_f_l2) + "," + d(q.r) + "," +
         std::to_string(q.n_star) + "," + d(q.nstar_bound) + "," + d(q.L) + "," + d(q.A) + "," + b(q.duality_ok) +
         "," + b(q.lower_bound_ok) + "," + b(q.nstar_ok) + "," + b(q.bounds_ok) + "," + d(nan) + "," + d(nan) +
         "," + d(nan) + "," + d(nan) + ",";
  }
  return s + detail;
}

}  // namespace bq
