#include "bq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bq {

namespace sp = spectral;

double DiagnosticsRecord::dissipation_norm() const {
  return std::sqrt(std::max(enstrophy, 0.0)) + std::sqrt(std::max(hdot1_sq, 0.0));
}

std::vector<double> height_weight(const Grid& g) {
  // W' = 1 - ly * beta, beta a periodized unit Gaussian centred on the seam.
  // W is odd, periodic, and equals x2 to round-off for |x2| < 0.25 ly.
  const double sigma = g.ly / 32.0;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  auto beta = [&](double y) {
    double s = 0.0;
    for (int k = -2; k <= 2; ++k) {
      const double d = y - 0.5 * g.ly - k * g.ly;
      s += std::exp(-0.5 * d * d / (sigma * sigma));
    }
    return norm * s;
  };
  // Integrate W' from the axis outwards with composite Simpson on fine substeps.
  std::vector<double> w(g.ny, 0.0);
  const int axis = g.axis_row();
  const int sub = 16;
  const double h = g.hy() / sub;
  double acc = 0.0;
  for (int j = axis + 1; j < g.ny; ++j) {
    const double y0 = g.x2(j - 1);
    for (int q = 0; q < sub; ++q) {
      const double a = y0 + q * h;
      auto f = [&](double y) { return 1.0 - g.ly * beta(y); };
      acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    }
    w[j] = acc;
  }
  for (int j = 0; j < axis; ++j) w[j] = -w[g.mirror_row(j)];
  w[0] = 0.0;
  return w;
}

Energies energies(const State& s, const sp::Velocity& u) {
  const Grid& g = s.rho.grid;
  const std::vector<double> weight = height_weight(g);
  Energies e;
  double ep = 0.0, ek = 0.0, epp = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double x2 = weight[j];
    for (int i = 0; i < g.nx; ++i) {
      const double r = s.rho(i, j);
      ep += r * x2;
      ek += u.u1(i, j) * u.u1(i, j) + u.u2(i, j) * u.u2(i, j);
      epp += r * u.u2(i, j);
    }
  }
  e.E_P = ep * g.cell_area();
  e.E_K = 0.5 * ek * g.cell_area();
  e.ep_prime = epp * g.cell_area();
  return e;
}

ABTerms AB_terms(const State& s, const sp::Velocity& u, double nu) {
  const SpectralField r = sp::forward(s.rho);
  const SpectralField u1 = sp::forward(u.u1), u2 = sp::forward(u.u2);
  const RealField weight = sp::inverse(-1.0 * sp::inverse_laplacian(sp::dy(r)));
  const RealField u1x = sp::inverse(sp::dx(u1)), u1y = sp::inverse(sp::dy(u1));
  const RealField u2x = sp::inverse(sp::dx(u2)), u2y = sp::inverse(sp::dy(u2));
  double a = 0.0;
  for (std::size_t n = 0; n < weight.values.size(); ++n) {
    const double q = u1x.values[n] * u1x.values[n] + 2.0 * u1y.values[n] * u2x.values[n] +
                     u2y.values[n] * u2y.values[n];
    a += weight.values[n] * q;
  }
  ABTerms out;
  out.A_t = a * s.rho.grid.cell_area();
  out.B_t_form1 = nu * inner(s.rho, sp::inverse(sp::laplacian(u2)));
  out.B_t_form2 = -nu * inner(sp::inverse(sp::dx(r)), s.omega);
  return out;
}

DiagnosticsRecord instantaneous(const State& s, double nu) {
  DiagnosticsRecord rec;
  rec.t = s.t;
  const SpectralField w = sp::forward(s.omega), r = sp::forward(s.rho);
  SpectralField u1h, u2h;
  sp::biot_savart(w, u1h, u2h);
  const sp::Velocity u{sp::inverse(u1h), sp::inverse(u2h), w(0, 0).real()};

  const Energies e = energies(s, u);
  rec.E_P = e.E_P;
  rec.E_K = e.E_K;
  rec.E_T = e.E_P + e.E_K;
  rec.ep_prime = e.ep_prime;
  rec.enstrophy = inner(s.omega, s.omega);
  rec.grad_u_sq = sp::hs_norm_sq(u1h, 1.0) + sp::hs_norm_sq(u2h, 1.0);

  const ABTerms ab = AB_terms(s, u, nu);
  rec.A_t = ab.A_t;
  rec.B_t = ab.B_t_form1;
  rec.B_t_form2 = ab.B_t_form2;

  const SpectralField phi = sp::dx(sp::inverse_laplacian(r));
  rec.grad_term = sp::hs_norm_sq(phi, 1.0);
  rec.hdot1_sq = sp::hs_norm_sq(phi - nu * w, 1.0);
  rec.h_neg2 = sp::hs_norm_sq(sp::dx(r), -2.0);
  rec.rho_l2 = l2_norm(s.rho);
  rec.u_l2 = std::sqrt(2.0 * e.E_K);
  rec.parity_residual = std::max(odd_parity_residual(s.rho), odd_parity_residual(s.omega));
  return rec;
}

double epp_identity_residual(const std::vector<DiagnosticsRecord>& records, std::size_t center) {
  if (center == 0 || center + 1 >= records.size())
    throw std::invalid_argument("second-difference residual needs a record on each side");
  const auto& a = records[center - 1];
  const auto& b = records[center];
  const auto& c = records[center + 1];
  const double h1 = b.t - a.t, h2 = c.t - b.t;
  if (!(h1 > 0.0) || std::abs(h2 - h1) > 1e-9 * h1)
    throw std::invalid_argument("second-difference residual needs uniformly spaced records");
  const double fd2 = (c.E_P - 2.0 * b.E_P + a.E_P) / (h1 * h1);
  const double rhs = b.A_t + b.B_t - b.grad_term;
  const double scale = std::max(1.0, std::abs(b.A_t) + std::abs(b.B_t) + std::abs(b.grad_term));
  return std::abs(fd2 - rhs) / scale;
}

double lemma31_identity_residual(const DiagnosticsRecord& rec, const DiagnosticsRecord& first, double nu) {
  const double lhs = rec.ep_prime + 0.5 * nu * rec.enstrophy + rec.cum_hdot1;
  const double rhs = first.ep_prime + 0.5 * nu * first.enstrophy + rec.cum_A;
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

std::ptrdiff_t DiagnosticsSeries::add(DiagnosticsRecord rec) {
  if (records_.empty()) {
    rec.cum_dissipation = rec.cum_hdot1 = rec.cum_A = 0.0;
  } else {
    const auto& prev = records_.back();
    const double dt = rec.t - prev.t;
    if (!(dt > 0.0)) throw std::invalid_argument("diagnostics records must advance in time");
    rec.cum_dissipation = prev.cum_dissipation + 0.5 * dt * (prev.grad_u_sq + rec.grad_u_sq);
    rec.cum_hdot1 = prev.cum_hdot1 + 0.5 * dt * (prev.hdot1_sq + rec.hdot1_sq);
    rec.cum_A = prev.cum_A + 0.5 * dt * (prev.A_t + rec.A_t);
  }
  const auto& first = records_.empty() ? rec : records_.front();
  const double et0 = first.E_T;
  rec.residual_energy = std::abs(rec.E_T + nu_ * rec.cum_dissipation - et0) / std::max(std::abs(et0), 1e-300);
  rec.residual_lemma31 = lemma31_identity_residual(rec, first, nu_);
  rec.residual_epp = std::numeric_limits<double>::quiet_NaN();
  records_.push_back(rec);

  if (records_.size() < 3) return -1;
  const std::size_t c = records_.size() - 2;
  records_[c].residual_epp = epp_identity_residual(records_, c);
  return static_cast<std::ptrdiff_t>(c);
}

std::vector<DiagnosticsRecord> resample(const std::vector<DiagnosticsRecord>& records, std::size_t stride,
                                        double nu) {
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  DiagnosticsSeries series(nu);
  for (std::size_t k = 0; k < records.size(); k += stride) series.add(records[k]);
  return series.records();
}

BoundReport lemma31_bound_check(const std::vector<DiagnosticsRecord>& records, double nu) {
  BoundReport rep;
  if (records.empty()) return rep;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (!std::isfinite(r.cum_dissipation) || !std::isfinite(r.cum_hdot1)) rep.finite = false;
    if (k > 0) {
      if (r.cum_dissipation < records[k - 1].cum_dissipation) rep.dissipation_monotone = false;
      if (r.cum_hdot1 < records[k - 1].cum_hdot1) rep.hdot1_monotone = false;
    }
    rep.empirical_constant = std::max(rep.empirical_constant, r.cum_hdot1 / (1.0 + 1.0 / nu));
  }
  const auto& last = records.back();
  rep.dissipation_final = last.cum_dissipation;
  rep.hdot1_final = last.cum_hdot1;
  const double half = 0.5 * (records.front().t + last.t);
  auto at_half = std::lower_bound(records.begin(), records.end(), half,
                                  [](const DiagnosticsRecord& r, double t) { return r.t < t; });
  if (at_half != records.end()) {
    if (last.cum_dissipation > 0.0)
      rep.dissipation_late_fraction = (last.cum_dissipation - at_half->cum_dissipation) / last.cum_dissipation;
    if (last.cum_hdot1 > 0.0) rep.hdot1_late_fraction = (last.cum_hdot1 - at_half->cum_hdot1) / last.cum_hdot1;
  }
  return rep;
}

double torus_chain_bound(const DiagnosticsRecord& rec, double nu, const Grid& g) {
  const double kmin = 2.0 * std::numbers::pi / std::max(g.lx, g.ly);
  return 2.0 * (nu * nu * rec.enstrophy + rec.hdot1_sq / (kmin * kmin));
}

std::vector<double> geometric_schedule(double t0, double t_end) {
  if (!(t0 > 0.0)) throw std::invalid_argument("schedule base must be positive");
  std::vector<double> out;
  for (double T = t0; 2.0 * T <= t_end * (1.0 + 1e-12); T *= 2.0) out.push_back(T);
  return out;
}

LowDissipationTimes extract_low_dissipation_times(const std::vector<DiagnosticsRecord>& records,
                                                  const std::vector<double>& schedule) {
  LowDissipationTimes out;
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    const double T = schedule[n];
    const double lo = T * (1.0 - 1e-9), hi = 2.0 * T * (1.0 + 1e-9);
    if (records.empty() || records.front().t > lo || records.back().t < 2.0 * T * (1.0 - 1e-9))
      throw std::invalid_argument("records do not cover [" + std::to_string(T) + ", " + std::to_string(2 * T) + "]");
    LowDissipationSample s;
    s.n = static_cast<int>(n) + 1;
    s.T_n = T;
    s.value = std::numeric_limits<double>::infinity();
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& r = records[k];
      if (r.t < lo || r.t > hi) continue;
      const double v = r.dissipation_norm();
      sum += v;
      sum_sq += r.enstrophy + r.hdot1_sq;
      ++count;
      if (v < s.value) {
        s.value = v;
        s.t_n = r.t;
        s.record = k;
      }
    }
    s.mean_value = sum / static_cast<double>(count);
    s.rms_value = std::sqrt(sum_sq / static_cast<double>(count));
    out.push_back(s);
  }
  return out;
}

}  // namespace bq
