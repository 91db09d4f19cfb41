#include "bq/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace bq {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || s.empty())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------

namespace {

using Member = double DiagnosticsRecord::*;

const std::vector<std::pair<std::string, Member>>& columns() {
  static const std::vector<std::pair<std::string, Member>> cols = {
      {"t", &DiagnosticsRecord::t},
      {"E_P", &DiagnosticsRecord::E_P},
      {"E_K", &DiagnosticsRecord::E_K},
      {"E_T", &DiagnosticsRecord::E_T},
      {"ep_prime", &DiagnosticsRecord::ep_prime},
      {"enstrophy", &DiagnosticsRecord::enstrophy},
      {"grad_u_sq", &DiagnosticsRecord::grad_u_sq},
      {"cum_dissipation", &DiagnosticsRecord::cum_dissipation},
      {"A_t", &DiagnosticsRecord::A_t},
      {"B_t", &DiagnosticsRecord::B_t},
      {"B_t_form2", &DiagnosticsRecord::B_t_form2},
      {"grad_term", &DiagnosticsRecord::grad_term},
      {"hdot1_sq", &DiagnosticsRecord::hdot1_sq},
      {"cum_hdot1", &DiagnosticsRecord::cum_hdot1},
      {"cum_A", &DiagnosticsRecord::cum_A},
      {"h_neg2", &DiagnosticsRecord::h_neg2},
      {"rho_l2", &DiagnosticsRecord::rho_l2},
      {"u_l2", &DiagnosticsRecord::u_l2},
      {"parity_residual", &DiagnosticsRecord::parity_residual},
      {"residual_energy", &DiagnosticsRecord::residual_energy},
      {"residual_lemma31", &DiagnosticsRecord::residual_lemma31},
      {"residual_epp", &DiagnosticsRecord::residual_epp},
  };
  return cols;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(path, mode);
  if (!f) throw IoError("cannot open '" + path + "'");
  return f;
}

}  // namespace

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : columns()) n.push_back(c.first);
    return n;
  }();
  return names;
}

std::string diagnostics_header() {
  std::string s;
  for (const auto& name : diagnostics_columns()) {
    if (!s.empty()) s += ',';
    s += name;
  }
  return s;
}

std::string diagnostics_row(const DiagnosticsRecord& r) {
  std::string s;
  for (const auto& [name, member] : columns()) {
    if (!s.empty()) s += ',';
    s += format_double(r.*member);
  }
  return s;
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != diagnostics_columns())
    throw IoError(path + ": header does not match the diagnostics schema");
  std::vector<DiagnosticsRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != columns().size())
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns().size()) +
                    " columns, got " + std::to_string(cells.size()));
    DiagnosticsRecord r;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      try {
        r.*(columns()[k].second) = parse_double(cells[k]);
      } catch (const std::invalid_argument& e) {
        throw IoError(path + ":" + std::to_string(lineno) + ": column " + columns()[k].first + ": " + e.what());
      }
    }
    out.push_back(r);
  }
  return out;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : path_(path), out_(open_out(path)) {
  out_ << header << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed on '" + path + "'");
}

void CsvWriter::row(const std::string& line) {
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed on '" + path_ + "'");
}

// ---------------------------------------------------------------------------

void write_contour(const std::string& path, const Contour& c, double t) {
  std::ofstream out = open_out(path);
  out << "t=" << format_double(t) << '\n';
  for (const Vec2& p : c.markers()) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
  if (!out) throw IoError("write failed on '" + path + "'");
}

Contour read_contour(const std::string& path, double* t) {
  std::ifstream in = open_in(path);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw IoError(path + ":" + std::to_string(lineno) + ": " + what);
  };
  if (!std::getline(in, line)) {
    lineno = 1;
    fail("empty contour file");
  }
  ++lineno;
  if (line.rfind("t=", 0) != 0) fail("expected 't=<value>' header");
  double time = 0.0;
  try {
    time = parse_double(line.substr(2));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  std::vector<Vec2> pts;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) fail("expected 'x1,x2'");
    try {
      pts.push_back({parse_double(cells[0]), parse_double(cells[1])});
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (t) *t = time;
  try {
    return Contour(std::move(pts));
  } catch (const GeometryError& e) {
    throw IoError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kHeaderBytes = 64;

void put_le(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
  out.write(b.data(), 8);
}

double get_le(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(const std::string& path, const RealField& f, double t) {
  const Grid& g = f.grid;
  std::string header = "BQP1 " + std::to_string(g.nx) + " " + std::to_string(g.ny) + " " + format_double(g.lx) +
                       " " + format_double(g.ly) + " " + format_double(t);
  if (header.size() > kHeaderBytes) throw IoError(path + ": field header does not fit in 64 bytes");
  header.resize(kHeaderBytes, ' ');
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (double v : f.values) put_le(out, v);
  if (!out) throw IoError("write failed on '" + path + "'");
}

RealField read_field(const std::string& path, double* t) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  std::string header(kHeaderBytes, '\0');
  in.read(header.data(), kHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes)) throw IoError(path + ": truncated header");
  std::istringstream hs(header);
  std::string magic, snx, sny, slx, sly, st;
  hs >> magic >> snx >> sny >> slx >> sly >> st;
  if (magic != "BQP1") throw IoError(path + ": bad magic '" + magic + "'");
  Grid g;
  double time = 0.0;
  try {
    g = Grid(std::stoi(snx), std::stoi(sny), parse_double(slx), parse_double(sly));
    time = parse_double(st);
  } catch (const std::exception& e) {
    throw IoError(path + ": bad header: " + e.what());
  }
  RealField f(g);
  std::vector<unsigned char> raw(g.size() * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw IoError(path + ": expected " + std::to_string(g.size()) + " values");
  char extra;
  if (in.read(&extra, 1)) throw IoError(path + ": trailing bytes after field data");
  for (std::size_t n = 0; n < g.size(); ++n) f.values[n] = get_le(raw.data() + 8 * n);
  if (t) *t = time;
  return f;
}

}  // namespace bq
