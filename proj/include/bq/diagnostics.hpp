#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bq/solver.hpp"
#include "bq/spectral.hpp"

namespace bq {

/// One time sample of every tracked energy, integral and identity residual.
///
/// Cumulative integrals use the trapezoid rule on the record cadence.
/// residual_epp needs both neighbours, so it is NaN on the first and last
/// records of a run.
struct DiagnosticsRecord {
  double t = 0.0;
  double E_P = 0.0;        ///< integral of rho * x2
  double E_K = 0.0;        ///< half the integral of |u|^2
  double E_T = 0.0;
  double ep_prime = 0.0;   ///< integral of rho * u2
  double enstrophy = 0.0;  ///< ||omega||^2
  double grad_u_sq = 0.0;  ///< ||grad u||^2
  double cum_dissipation = 0.0;  ///< time integral of grad_u_sq (not nu-weighted)
  double A_t = 0.0;
  double B_t = 0.0;        ///< nu * integral of rho * lap u2
  double B_t_form2 = 0.0;  ///< -nu * integral of d1 rho * omega
  double grad_term = 0.0;  ///< ||grad d1 lap^-1 rho||^2
  double hdot1_sq = 0.0;   ///< ||d1 lap^-1 rho - nu omega||^2 in H^1 (homogeneous)
  double cum_hdot1 = 0.0;
  double cum_A = 0.0;
  double h_neg2 = 0.0;     ///< ||d1 rho||^2 in H^-2 (homogeneous)
  double rho_l2 = 0.0;
  double u_l2 = 0.0;
  double parity_residual = 0.0;
  double residual_energy = 0.0;
  double residual_lemma31 = 0.0;
  double residual_epp = std::numeric_limits<double>::quiet_NaN();

  /// ||omega|| + ||d1 lap^-1 rho - nu omega||_{H^1}: the quantity minimized
  /// when extracting low-dissipation times.
  double dissipation_norm() const;
};

struct Energies {
  double E_P = 0.0;
  double E_K = 0.0;
  double ep_prime = 0.0;
};

/// Height coordinate used by E_P: equal to x2 away from the periodic seam
/// (|x2| < 0.25 ly) and turned smoothly at the seam so that the weight is
/// periodic and effectively band-limited.
std::vector<double> height_weight(const Grid& g);

/// E_P weights rho by height_weight, i.e. by x2 wherever rho lives.
Energies energies(const State& s, const spectral::Velocity& u);

struct ABTerms {
  double A_t = 0.0;
  double B_t_form1 = 0.0;
  double B_t_form2 = 0.0;
};

/// A = sum_ij integral of ((-lap)^-1 d2 rho) d_i u_j d_j u_i,
/// B = nu * integral of rho lap u2 = -nu * integral of d1 rho * omega.
ABTerms AB_terms(const State& s, const spectral::Velocity& u, double nu);

/// Every non-cumulative field of a record.
DiagnosticsRecord instantaneous(const State& s, double nu);

/// Relative residual of the second-difference potential-energy identity at
/// records[center], which needs uniformly spaced neighbours on both sides.
double epp_identity_residual(const std::vector<DiagnosticsRecord>& records, std::size_t center);

/// |lhs - rhs| / max(1, |rhs|) for the integrated vorticity/energy identity
/// between `first` and `rec`.
double lemma31_identity_residual(const DiagnosticsRecord& rec, const DiagnosticsRecord& first, double nu);

/// Builds the time series record by record: cumulative integrals, energy
/// and integrated-identity residuals, and the delayed second-difference
/// residual.
class DiagnosticsSeries {
 public:
  explicit DiagnosticsSeries(double nu) : nu_(nu) {}

  /// Appends a sample; returns the index of the record whose residual_epp
  /// became final with this sample, if any.
  std::ptrdiff_t add(DiagnosticsRecord rec);
  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  double nu() const { return nu_; }

 private:
  double nu_;
  std::vector<DiagnosticsRecord> records_;
};

/// Re-derives cumulative integrals and residuals from every stride-th record,
/// i.e. as if the run had been sampled at stride times the cadence.
std::vector<DiagnosticsRecord> resample(const std::vector<DiagnosticsRecord>& records, std::size_t stride,
                                        double nu);

struct BoundReport {
  bool dissipation_monotone = true;
  bool hdot1_monotone = true;
  bool finite = true;
  double dissipation_final = 0.0;
  double hdot1_final = 0.0;
  /// Share of the final value accumulated over the second half of the run.
  double dissipation_late_fraction = 0.0;
  double hdot1_late_fraction = 0.0;
  /// Empirical constant C with cum_hdot1(t) <= (1 + 1/nu) * C over the run.
  double empirical_constant = 0.0;
};

BoundReport lemma31_bound_check(const std::vector<DiagnosticsRecord>& records, double nu);

/// The homogeneous H^-2 chain bound: h_neg2 <= 2 (nu^2 enstrophy + hdot1_sq / k_min^2).
double torus_chain_bound(const DiagnosticsRecord& rec, double nu, const Grid& g);

struct LowDissipationSample {
  int n = 0;
  double T_n = 0.0;
  double t_n = 0.0;
  double value = 0.0;       ///< dissipation_norm at t_n
  double mean_value = 0.0;  ///< mean of dissipation_norm over [T_n, 2 T_n]
  double rms_value = 0.0;   ///< sqrt of the mean of enstrophy + hdot1_sq
  std::size_t record = 0;
};

using LowDissipationTimes = std::vector<LowDissipationSample>;

/// T_n = t0 * 2^n for n = 0, 1, ... while 2 T_n <= t_end.
std::vector<double> geometric_schedule(double t0, double t_end);

/// Throws std::invalid_argument when [T_n, 2 T_n] is not covered by records.
LowDissipationTimes extract_low_dissipation_times(const std::vector<DiagnosticsRecord>& records,
                                                  const std::vector<double>& schedule);

}  // namespace bq
