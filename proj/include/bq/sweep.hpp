#pragma once

#include <string>
#include <vector>

#include "bq/config.hpp"
#include "bq/lemmas.hpp"

namespace bq {

struct NamedShape {
  std::string name;
  Contour contour;
};

/// Random smooth star-shaped contour of unit area centered at height b.
/// Modes 2..5 with amplitudes at most 0.2 / (m - 1), so the radius stays
/// within a factor 0.58 of its mean and the curve is simple.
Contour random_star(unsigned seed, int index, double height, std::size_t markers);

/// Ellipses, random stars and contour files, in that order. Files are read
/// eagerly, so a malformed file raises IoError before any work starts.
std::vector<NamedShape> sweep_shapes(const LemmaSweepConfig& cfg);

/// Bilinear periodic sample of `src` at the points of `dst`, with dst point
/// (x1, x2) taken to src point (x1 - shift_x1, x2); zero outside src's box.
RealField resample_field(const RealField& src, const Grid& dst, double shift_x1);

struct LemmaRow {
  std::string shape;
  std::string kind;  ///< "4.1", "4.2" or "pestov-ionin"
  std::string omega;
  LemmaReport report;
  PestovIonin pestov;
  bool passed = false;
  std::string error;  ///< precondition failures
};

/// Worker count from BQ_WORKERS (default 1).
int worker_count();

/// One row per (shape, lemma, Omega) and one Pestov-Ionin row per shape,
/// in a deterministic order regardless of the worker count.
std::vector<LemmaRow> verify_lemmas(const std::vector<NamedShape>& shapes, const LemmaSweepConfig& cfg,
                                    int workers = 1);

std::string lemma_csv_header();
std::string lemma_csv_row(const LemmaRow& r);

}  // namespace bq
