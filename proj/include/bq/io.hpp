#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bq/contour.hpp"
#include "bq/diagnostics.hpp"
#include "bq/field.hpp"

namespace bq {

/// File-format or file-system failure; the message names the file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double; "nan", "inf"
/// and "-inf" for non-finite values.
std::string format_double(double v);
/// Inverse of format_double; also accepts any strtod syntax. Throws
/// std::invalid_argument on trailing garbage.
double parse_double(const std::string& s);

// ---------------------------------------------------------------------------
// Diagnostics CSV.

const std::vector<std::string>& diagnostics_columns();
std::string diagnostics_header();
std::string diagnostics_row(const DiagnosticsRecord& r);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path);

/// CSV writer that flushes every row, so an aborted run leaves a valid file.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header);
  void row(const std::string& line);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Contour snapshots: "t=<value>" then one "x1,x2" line per marker.

void write_contour(const std::string& path, const Contour& c, double t);
Contour read_contour(const std::string& path, double* t = nullptr);

// ---------------------------------------------------------------------------
// Field snapshots: 64-byte ASCII header "BQP1 nx ny Lx Ly t" padded with
// spaces, then nx*ny little-endian float64 values, row-major with x1 fastest.

void write_field(const std::string& path, const RealField& f, double t);
RealField read_field(const std::string& path, double* t = nullptr);

}  // namespace bq
