#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "bq/io.hpp"
#include "helpers.hpp"

using namespace bq;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("bq_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("shortest round-trip doubles") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, k % 40 - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::isnan(parse_double("nan")));
  CHECK(parse_double("-inf") == -std::numeric_limits<double>::infinity());
  CHECK(parse_double("+2.5") == 2.5);
  CHECK_THROWS(parse_double("1.5x"));
  CHECK_THROWS(parse_double(""));
}

TEST_CASE("diagnostics csv round trip") {
  const fs::path d = temp_dir("csv");
  DiagnosticsRecord a;
  a.t = 0.01;
  a.E_P = 2.9999639211177343;
  a.residual_epp = std::nan("");
  DiagnosticsRecord b = a;
  b.t = 0.02;
  b.residual_epp = 1e-7;
  {
    CsvWriter w((d / "x.csv").string(), diagnostics_header());
    w.row(diagnostics_row(a));
    w.row(diagnostics_row(b));
  }
  const auto recs = read_diagnostics_csv((d / "x.csv").string());
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].E_P == a.E_P);
  CHECK(std::isnan(recs[0].residual_epp));
  CHECK(recs[1].residual_epp == 1e-7);
  CHECK(diagnostics_columns().front() == "t");
  CHECK(diagnostics_columns().size() == 22);

  std::ofstream((d / "bad.csv").string()) << "t,E_P\n1,2\n";
  CHECK_THROWS_AS(read_diagnostics_csv((d / "bad.csv").string()), IoError);
  CHECK_THROWS_AS(read_diagnostics_csv((d / "missing.csv").string()), IoError);
}

TEST_CASE("contour snapshots round-trip bit-exactly") {
  const fs::path d = temp_dir("contour");
  const Contour c = make_unit_area_ellipse({4.0 / 3.0, 1.5}, 1.7, 200);
  write_contour((d / "c.txt").string(), c, 0.1 + 0.2);
  double t = 0;
  const Contour back = read_contour((d / "c.txt").string(), &t);
  CHECK(t == 0.1 + 0.2);
  CHECK(back.markers() == c.markers());

  std::ofstream((d / "bad.txt").string()) << "t=0\n1,2\n3;4\n";
  try {
    read_contour((d / "bad.txt").string());
    FAIL("expected a parse error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("bad.txt:3") != std::string::npos);
  }
  std::ofstream((d / "nohead.txt").string()) << "1,2\n";
  CHECK_THROWS_AS(read_contour((d / "nohead.txt").string()), IoError);
}

TEST_CASE("field snapshots") {
  const fs::path d = temp_dir("field");
  const Grid g(16, 8, 8.0, 4.0);
  const RealField f = bqtest::random_band_limited(g, 3, 2);
  write_field((d / "f.bin").string(), f, 12.5);
  CHECK(fs::file_size(d / "f.bin") == 64 + 8 * g.size());
  std::ifstream in(d / "f.bin", std::ios::binary);
  std::string head(4, '\0');
  in.read(head.data(), 4);
  CHECK(head == "BQP1");
  double t = 0;
  const RealField back = read_field((d / "f.bin").string(), &t);
  CHECK(t == 12.5);
  CHECK(back.grid == g);
  CHECK(back.values == f.values);

  // Corrupted magic and truncated data are rejected.
  {
    std::fstream io(d / "f.bin", std::ios::in | std::ios::out | std::ios::binary);
    io.write("XQP1", 4);
  }
  CHECK_THROWS_AS(read_field((d / "f.bin").string()), IoError);
  write_field((d / "g.bin").string(), f, 0.0);
  fs::resize_file(d / "g.bin", 64 + 8 * 10);
  CHECK_THROWS_AS(read_field((d / "g.bin").string()), IoError);
}
