#include "bq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

#include "bq/io.hpp"
#include "bq/lemmas.hpp"

namespace bq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  return std::all_of(k.begin(), k.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
  });
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(const std::string& text) {
  KeyValueDocument doc;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + "invalid key '" + key + "'");
    if (doc.has(key))
      throw ConfigError(where + "duplicate key " + key + " (first set on line " +
                        std::to_string(doc.line_of(key)) + ")");
    doc.values_[key] = value;
    doc.lines_[key] = lineno;
  }
  return doc;
}

int KeyValueDocument::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// Typed bindings between keys and struct members.

namespace {

using Target = std::variant<int*, unsigned*, double*, bool*, std::string*, std::vector<double>*,
                            std::vector<std::string>*>;

struct Binding {
  std::string key;
  Target target;
  bool required = false;
};

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::string cur;
  std::istringstream in(v);
  while (std::getline(in, cur, ',')) out.push_back(trim(cur));
  return out;
}

std::string prefix(const KeyValueDocument& doc, const std::string& key) {
  const int line = doc.line_of(key);
  return line > 0 ? "line " + std::to_string(line) + ": " + key : key;
}

long long parse_integer(const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw std::invalid_argument("not an integer");
  return out;
}

double parse_finite(const std::string& v) {
  const double d = parse_double(v);
  if (!std::isfinite(d)) throw std::invalid_argument("not a finite number");
  return d;
}

void assign(const Binding& b, const std::string& v, const KeyValueDocument& doc) {
  try {
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, int>) {
            const long long x = parse_integer(v);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
              throw std::invalid_argument("integer out of range");
            *p = static_cast<int>(x);
          } else if constexpr (std::is_same_v<T, unsigned>) {
            const long long x = parse_integer(v);
            if (x < 0 || x > std::numeric_limits<unsigned>::max())
              throw std::invalid_argument("expected a non-negative integer");
            *p = static_cast<unsigned>(x);
          } else if constexpr (std::is_same_v<T, double>) {
            *p = parse_finite(v);
          } else if constexpr (std::is_same_v<T, bool>) {
            if (v == "true" || v == "1" || v == "yes" || v == "on")
              *p = true;
            else if (v == "false" || v == "0" || v == "no" || v == "off")
              *p = false;
            else
              throw std::invalid_argument("expected true or false");
          } else if constexpr (std::is_same_v<T, std::string>) {
            *p = v;
          } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            p->clear();
            for (const auto& item : split_list(v)) p->push_back(parse_finite(item));
          } else {
            *p = split_list(v);
          }
        },
        b.target);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(prefix(doc, b.key) + ": " + e.what() + ", got '" + v + "'");
  }
}

std::string render(const Target& t) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, int> || std::is_same_v<T, unsigned>) {
          return std::to_string(*p);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(*p);
        } else if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return *p;
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string s;
          for (double d : *p) s += (s.empty() ? "" : ",") + format_double(d);
          return s;
        } else {
          std::string s;
          for (const auto& x : *p) s += (s.empty() ? "" : ",") + x;
          return s;
        }
      },
      t);
}

std::vector<Binding> bindings(RunConfig& c) {
  return {
      {"grid.nx", &c.nx, true},
      {"grid.ny", &c.ny, true},
      {"grid.Lx", &c.lx, true},
      {"grid.Ly", &c.ly, true},
      {"solver.nu", &c.solver.nu, true},
      {"solver.cfl", &c.solver.cfl},
      {"solver.dt_max", &c.solver.dt_max},
      {"solver.dealias", &c.solver.dealias},
      {"solver.enforce_symmetry", &c.solver.enforce_symmetry},
      {"solver.epsilon_cells", &c.epsilon_cells},
      {"patch.shape", &c.patch.shape},
      {"patch.aspect", &c.patch.aspect},
      {"patch.flat", &c.patch.flat},
      {"patch.radius", &c.patch.radius},
      {"patch.file", &c.patch.file},
      {"patch.normalize", &c.patch.normalize},
      {"patch.center_x", &c.patch.center_x},
      {"patch.height", &c.patch.height},
      {"patch.markers", &c.patch.markers},
      {"velocity.kind", &c.velocity.kind},
      {"velocity.amplitude", &c.velocity.amplitude},
      {"velocity.mx", &c.velocity.mx},
      {"velocity.my", &c.velocity.my},
      {"velocity.odd", &c.velocity.odd},
      {"velocity.center_x", &c.velocity.center_x},
      {"velocity.center_y", &c.velocity.center_y},
      {"velocity.width", &c.velocity.width},
      {"velocity.u1_file", &c.velocity.u1_file},
      {"velocity.u2_file", &c.velocity.u2_file},
      {"output.dt", &c.output.dt},
      {"output.dir", &c.output.dir},
      {"output.snapshots", &c.output.snapshots},
      {"output.snapshot_interval", &c.output.snapshot_interval},
      {"output.inscribed_every", &c.output.inscribed_every},
      {"tracker.max_spacing", &c.tracker.max_spacing},
      {"tracker.max_markers", &c.tracker.max_markers},
      {"experiment.t_end", &c.experiment.t_end, true},
      {"experiment.schedule_base", &c.experiment.schedule_base},
      {"experiment.schedule_count", &c.experiment.schedule_count},
  };
}

std::vector<Binding> lemma_bindings(LemmaSweepConfig& c) {
  return {
      {"shapes.ellipse_aspects", &c.ellipse_aspects},
      {"shapes.star_count", &c.star_count},
      {"shapes.seed", &c.seed},
      {"shapes.files", &c.files},
      {"shapes.height", &c.height},
      {"shapes.markers", &c.markers},
      {"lemma.omega", &c.omega},
      {"lemma.omega_file", &c.omega_file},
      {"lemma.cells_per_r", &c.cells_per_r},
      {"lemma.margin", &c.margin},
      {"output.dir", &c.dir},
  };
}

/// Applies the document to the bindings; unknown and missing keys are errors.
void apply_document(const KeyValueDocument& doc, const std::vector<Binding>& binds) {
  for (const auto& [key, value] : doc.values()) {
    const auto it = std::find_if(binds.begin(), binds.end(), [&](const Binding& b) { return b.key == key; });
    if (it == binds.end()) throw ConfigError(prefix(doc, key) + ": unknown key");
    assign(*it, value, doc);
  }
  std::vector<std::string> missing;
  for (const auto& b : binds)
    if (b.required && !doc.has(b.key)) missing.push_back(b.key);
  if (!missing.empty()) {
    std::string msg = "missing required key";
    msg += missing.size() > 1 ? "s: " : ": ";
    for (std::size_t k = 0; k < missing.size(); ++k) msg += (k ? ", " : "") + missing[k];
    throw ConfigError(msg);
  }
}

class Checker {
 public:
  explicit Checker(const KeyValueDocument& doc) : doc_(doc) {}
  void require(bool ok, const std::string& key, const std::string& constraint) const {
    if (!ok) throw ConfigError(prefix(doc_, key) + ": must satisfy " + constraint);
  }

 private:
  const KeyValueDocument& doc_;
};

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate(const RunConfig& c, const KeyValueDocument& doc) {
  const Checker ck(doc);
  ck.require(power_of_two(c.nx) && c.nx >= 8, "grid.nx", "nx >= 8 and a power of two");
  ck.require(power_of_two(c.ny) && c.ny >= 8, "grid.ny", "ny >= 8 and a power of two");
  ck.require(c.lx > 0, "grid.Lx", "Lx > 0");
  ck.require(c.ly > 0, "grid.Ly", "Ly > 0");
  ck.require(c.solver.nu > 0, "solver.nu", "nu > 0");
  ck.require(c.solver.cfl > 0 && c.solver.cfl <= 1, "solver.cfl", "0 < cfl <= 1");
  ck.require(c.solver.dt_max > 0, "solver.dt_max", "dt_max > 0");
  ck.require(c.epsilon_cells > 0, "solver.epsilon_cells", "epsilon_cells > 0");

  const auto& p = c.patch;
  ck.require(p.shape == "ellipse" || p.shape == "stadium" || p.shape == "polygon-file", "patch.shape",
             "one of ellipse, stadium, polygon-file");
  ck.require(p.aspect > 0, "patch.aspect", "aspect > 0");
  ck.require(p.flat >= 0, "patch.flat", "flat >= 0");
  ck.require(p.radius > 0, "patch.radius", "radius > 0");
  ck.require(p.shape != "polygon-file" || !p.file.empty(), "patch.file", "non-empty when shape = polygon-file");
  ck.require(p.center_x < 0 || p.center_x < c.lx, "patch.center_x", "center_x < Lx (negative: domain middle)");
  ck.require(p.height > 0 && p.height < c.ly / 2, "patch.height", "0 < height < Ly/2");
  ck.require(p.markers >= 64, "patch.markers", "markers >= 64");

  const auto& v = c.velocity;
  ck.require(v.kind == "zero" || v.kind == "mode" || v.kind == "vortex-pair" || v.kind == "file", "velocity.kind",
             "one of zero, mode, vortex-pair, file");
  ck.require(v.mx >= 0, "velocity.mx", "mx >= 0");
  ck.require(v.my >= 0, "velocity.my", "my >= 0");
  ck.require(v.width > 0, "velocity.width", "width > 0");
  ck.require(v.kind != "file" || !v.u1_file.empty(), "velocity.u1_file", "non-empty when kind = file");
  ck.require(v.kind != "file" || !v.u2_file.empty(), "velocity.u2_file", "non-empty when kind = file");

  ck.require(c.output.dt > 0, "output.dt", "dt > 0");
  ck.require(!c.output.dir.empty(), "output.dir", "non-empty");
  ck.require(c.output.snapshot_interval > 0, "output.snapshot_interval", "snapshot_interval > 0");
  ck.require(c.output.inscribed_every >= 1, "output.inscribed_every", "inscribed_every >= 1");
  ck.require(c.tracker.max_spacing > 0, "tracker.max_spacing", "max_spacing > 0");
  ck.require(c.tracker.max_markers >= 64, "tracker.max_markers", "max_markers >= 64");
  ck.require(c.experiment.t_end >= 0, "experiment.t_end", "t_end >= 0");
  ck.require(c.experiment.schedule_base > 0, "experiment.schedule_base", "schedule_base > 0");
  ck.require(c.experiment.schedule_count >= 0, "experiment.schedule_count", "schedule_count >= 0");
}

}  // namespace

double RunConfig::epsilon() const { return epsilon_cells * std::max(lx / nx, ly / ny); }

RunConfig parse_config(const std::string& text) {
  const KeyValueDocument doc = KeyValueDocument::parse(text);
  RunConfig c;
  c.solver.dt_max = 0.005;
  apply_document(doc, bindings(c));
  validate(c, doc);
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_config(const std::string& path) {
  try {
    return parse_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string echo_config(const RunConfig& c) {
  RunConfig copy = c;
  std::string out;
  for (const auto& b : bindings(copy)) out += b.key + "=" + render(b.target) + "\n";
  return out;
}

Contour build_patch(const RunConfig& c) {
  const auto& p = c.patch;
  const Vec2 center{p.center_x < 0 ? c.lx / 2 : p.center_x, p.height};
  const auto n = static_cast<std::size_t>(p.markers);
  Contour shape = [&] {
    if (p.shape == "ellipse") return make_ellipse(center, std::sqrt(p.aspect), 1.0 / std::sqrt(p.aspect), n);
    if (p.shape == "stadium") return make_stadium(center, p.flat, p.radius, n);
    try {
      return read_contour(p.file);
    } catch (const IoError& e) {
      throw ConfigError(std::string("patch.file: ") + e.what());
    }
  }();
  if (!p.normalize) return shape;
  shape = normalize_area(shape, 1.0);
  // Normalization scales about the marker mean; put the shape back at its
  // configured centre (for files: keep x1, place the centroid at the height).
  const PatchGeometry geo = measure(shape);
  Vec2 mean{0.0, 0.0};
  for (const Vec2& q : shape.markers()) mean = mean + q;
  mean = (1.0 / static_cast<double>(shape.size())) * mean;
  const Vec2 shift{p.shape == "polygon-file" && p.center_x < 0 ? 0.0 : center.x - mean.x,
                   center.y - geo.centroid_height};
  std::vector<Vec2> moved;
  moved.reserve(shape.size());
  for (const Vec2& q : shape.markers()) moved.push_back(q + shift);
  return Contour(std::move(moved));
}

VelocityRecipe build_velocity(const RunConfig& c) {
  const auto& v = c.velocity;
  if (v.kind == "zero") return ZeroVelocity{};
  if (v.kind == "mode") return ModeVelocity{v.amplitude, v.mx, v.my, v.odd};
  if (v.kind == "vortex-pair")
    return VortexPairVelocity{v.amplitude, {v.center_x < 0 ? c.lx / 2 : v.center_x, v.center_y}, v.width};
  try {
    FieldVelocity f{read_field(v.u1_file), read_field(v.u2_file)};
    const Grid g = c.grid();
    for (const RealField* u : {&f.u1, &f.u2})
      if (u->grid.nx != g.nx || u->grid.ny != g.ny || u->grid.lx != g.lx || u->grid.ly != g.ly)
        throw ConfigError("velocity field files must match the configured grid");
    return f;
  } catch (const IoError& e) {
    throw ConfigError(std::string("velocity file: ") + e.what());
  }
}

LemmaSweepConfig parse_lemma_config(const std::string& text) {
  const KeyValueDocument doc = KeyValueDocument::parse(text);
  LemmaSweepConfig c;
  apply_document(doc, lemma_bindings(c));
  const Checker ck(doc);
  for (double a : c.ellipse_aspects) ck.require(a >= 1.0, "shapes.ellipse_aspects", "every aspect >= 1");
  ck.require(c.star_count >= 0, "shapes.star_count", "star_count >= 0");
  ck.require(c.height > 0, "shapes.height", "height > 0");
  ck.require(c.markers >= 64, "shapes.markers", "markers >= 64");
  ck.require(!c.omega.empty(), "lemma.omega", "at least one choice");
  for (const auto& o : c.omega) {
    try {
      const OmegaChoice choice = omega_choice_from_string(o);
      ck.require(choice != OmegaChoice::Supplied || !c.omega_file.empty(), "lemma.omega_file",
                 "non-empty when lemma.omega includes supplied");
    } catch (const std::invalid_argument&) {
      ck.require(false, "lemma.omega", "choices among zero, d1_invlap_mu, supplied");
    }
  }
  ck.require(c.cells_per_r >= 8, "lemma.cells_per_r", "cells_per_r >= 8");
  ck.require(c.margin >= 0, "lemma.margin", "margin >= 0");
  ck.require(!c.dir.empty(), "output.dir", "non-empty");
  ck.require(!c.ellipse_aspects.empty() || c.star_count > 0 || !c.files.empty(), "shapes",
             "at least one shape source");
  return c;
}

LemmaSweepConfig load_lemma_config(const std::string& path) {
  try {
    return parse_lemma_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace bq
