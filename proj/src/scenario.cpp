#include "nclab/scenario.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nclab {

namespace {

std::string error_text(std::size_t line, const std::string& key, const std::string& message, const std::string& file) {
  std::string out = file;
  if (!file.empty()) out += line ? ":" + std::to_string(line) + ": " : ": ";
  else if (line) out += "line " + std::to_string(line) + ": ";
  if (!key.empty()) out += "key '" + key + "': ";
  return out + message;
}

}  // namespace

ScenarioError::ScenarioError(std::size_t line_, const std::string& key_, const std::string& message_,
                             const std::string& file)
    : std::runtime_error(error_text(line_, key_, message_, file)), line(line_), key(key_), message(message_) {}

std::string to_string(FieldInit f) {
  switch (f) {
    case FieldInit::none: return "none";
    case FieldInit::mean_curvature: return "H";
    case FieldInit::constant: return "constant";
    case FieldInit::support: return "support";
  }
  return "none";
}

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"scenario", {"name", "output"}},
      {"geometry", {"shape", "radius", "a", "b", "c", "major", "minor", "cos", "sin", "points_file", "topology", "N", "M"}},
      {"flow", {"c_stab", "c_diff", "dt_safety", "t_end", "h_cap_factor", "snapshot_interval", "remesh", "remesh_ratio"}},
      {"analysis",
       {"interior", "exterior", "enclosure", "pinching", "radii", "f_field", "f_constant", "slack", "verdict_horizon",
        "svg", "threads", "prune"}},
      {"verify", {"suite"}},
      {"tolerances", {"scale", "first", "second", "lemma1", "time", "evolution"}},
  };
  return k;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Section>& sections) : sections_(sections) {}

  const Entry* find(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    return parse_number(*e, key);
  }

  long integer(const std::string& section, const std::string& key, long fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(e->value.c_str(), &end, 10);
    if (errno || end == e->value.c_str() || *end != '\0') throw ScenarioError(e->line, key, "expected an integer, got '" + e->value + "'");
    return v;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ScenarioError(e->line, key, "expected a boolean, got '" + e->value + "'");
  }

  std::vector<double> list(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return {};
    std::string s = e->value;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
      Entry t{tok, e->line, true};
      out.push_back(parse_number(t, key));
    }
    if (out.empty()) throw ScenarioError(e->line, key, "expected a list of numbers");
    return out;
  }

  static double parse_number(const Entry& e, const std::string& key) {
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(e.value.c_str(), &end);
    if (errno || end == e.value.c_str() || *end != '\0' || !std::isfinite(v))
      throw ScenarioError(e.line, key, "expected a finite number, got '" + e.value + "'");
    return v;
  }

 private:
  std::map<std::string, Section>& sections_;
};

void require(bool ok, const Entry* e, const std::string& key, const std::string& message) {
  if (!ok) throw ScenarioError(e ? e->line : 0, key, message);
}

std::vector<Vec2> read_points(const std::filesystem::path& path, std::size_t line, const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(line, key, "cannot open points file '" + path.string() + "'");
  std::vector<Vec2> pts;
  std::string row;
  std::size_t n = 0;
  while (std::getline(in, row)) {
    ++n;
    row = trim(row);
    if (row.empty() || row[0] == '#') continue;
    if (n == 1 && row.rfind("nclab-geometry", 0) == 0) {
      in.clear();
      in.seekg(0);
      return vertices(read_geometry(in));
    }
    std::istringstream is(row);
    Vec2 p;
    std::string extra;
    if (!(is >> p.x >> p.y) || (is >> extra))
      throw ScenarioError(line, key, path.string() + ":" + std::to_string(n) + ": expected two numbers");
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  std::map<std::string, Section> sections;
  std::string current;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError(line_no, "", "malformed section header '" + line + "'");
      current = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(current)) throw ScenarioError(line_no, "", "unknown section [" + current + "]");
      sections[current];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError(line_no, "", "expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (current.empty()) throw ScenarioError(line_no, key, "key outside of any section");
    if (!known_keys().at(current).count(key)) throw ScenarioError(line_no, key, "unknown key in [" + current + "]");
    if (value.empty()) throw ScenarioError(line_no, key, "empty value");
    auto& sec = sections[current];
    if (sec.count(key)) throw ScenarioError(line_no, key, "repeated key (first on line " + std::to_string(sec[key].line) + ")");
    sec[key] = Entry{value, line_no, false};
  }

  Reader r(sections);
  Scenario sc;

  if (const Entry* e = r.find("scenario", "name")) sc.name = e->value;
  if (const Entry* e = r.find("scenario", "output")) sc.output = e->value;

  // Geometry.
  const Entry* shape_e = r.find("geometry", "shape");
  if (!shape_e) throw ScenarioError(0, "shape", "[geometry] shape is required");
  const std::string shape = shape_e->value;
  auto positive = [&](const std::string& key, double fallback) {
    double v = r.number("geometry", key, fallback);
    require(v > 0.0, r.find("geometry", key), key, "must be positive");
    return v;
  };
  bool surface = false;
  bool from_points = false;
  if (shape == "circle") {
    sc.geometry.shape = CircleSpec{positive("radius", 1.0)};
  } else if (shape == "ellipse") {
    sc.geometry.shape = EllipseSpec{positive("a", 2.0), positive("b", 1.0)};
  } else if (shape == "fourier-star" || shape == "fourier") {
    FourierSpec f;
    f.cos = r.list("geometry", "cos");
    f.sin = r.list("geometry", "sin");
    if (f.cos.empty() && f.sin.empty()) f.cos = {1.0, 0.0, 0.0, 0.3};
    require(f.cos.size() <= 9 && f.sin.size() <= 9, r.find("geometry", "cos"), "cos", "at most 9 coefficients (k = 0..8)");
    sc.geometry.shape = f;
  } else if (shape == "polygon") {
    const Entry* p = r.find("geometry", "points_file");
    require(p != nullptr, shape_e, "points_file", "polygon needs points_file");
    sc.geometry.shape = PolygonSpec{read_points(base_dir / p->value, p->line, "points_file")};
    from_points = true;
  } else if (shape == "sphere") {
    sc.geometry.shape = SphereSpec{positive("radius", 1.0)};
    surface = true;
  } else if (shape == "ellipsoid") {
    sc.geometry.shape = EllipsoidSpec{positive("a", 1.0), positive("c", 1.0)};
    surface = true;
  } else if (shape == "torus") {
    double major = positive("major", 2.0), minor = positive("minor", 0.5);
    require(minor < major, r.find("geometry", "minor"), "minor", "must be smaller than major");
    sc.geometry.shape = TorusSpec{major, minor};
    surface = true;
  } else if (shape == "profile") {
    const Entry* p = r.find("geometry", "points_file");
    require(p != nullptr, shape_e, "points_file", "profile needs points_file");
    ProfileSpec ps;
    ps.points = read_points(base_dir / p->value, p->line, "points_file");
    if (const Entry* t = r.find("geometry", "topology")) {
      if (t->value == "sphere") ps.topology = ProfileTopology::sphere;
      else if (t->value == "torus") ps.topology = ProfileTopology::torus;
      else throw ScenarioError(t->line, "topology", "expected 'sphere' or 'torus', got '" + t->value + "'");
    }
    sc.geometry.shape = ps;
    surface = true;
    from_points = true;
  } else {
    throw ScenarioError(shape_e->line, "shape",
                        "unknown shape '" + shape + "' (circle, ellipse, fourier-star, polygon, sphere, ellipsoid, torus, profile)");
  }
  const long N = r.integer("geometry", "N", from_points ? 0 : (surface ? 128 : 256));
  if (const Entry* e = r.find("geometry", "N")) require(N >= 8, e, "N", "must be at least 8");
  sc.geometry.resolution = int(N);
  const long M = r.integer("geometry", "M", 64);
  if (const Entry* e = r.find("geometry", "M")) {
    require(surface, e, "M", "only used by axisymmetric shapes");
    require(M >= 4, e, "M", "must be at least 4");
  }
  sc.geometry.azimuthal_samples = int(M);

  // Flow.
  auto flow_num = [&](const std::string& key, double fallback, auto ok, const char* message) {
    double v = r.number("flow", key, fallback);
    require(ok(v), r.find("flow", key), key, message);
    return v;
  };
  auto pos = [](double v) { return v > 0.0; };
  auto nonneg = [](double v) { return v >= 0.0; };
  sc.flow.c_stab = flow_num("c_stab", sc.flow.c_stab, pos, "must be positive");
  sc.flow.c_diff = flow_num("c_diff", sc.flow.c_diff, pos, "must be positive");
  sc.flow.dt_safety = flow_num("dt_safety", sc.flow.dt_safety, [](double v) { return v > 0.0 && v <= 1.0; }, "must lie in (0, 1]");
  sc.t_end = flow_num("t_end", sc.t_end, nonneg, "must be non-negative");
  sc.h_cap_factor = flow_num("h_cap_factor", sc.h_cap_factor, [](double v) { return v > 1.0; }, "must exceed 1");
  sc.snapshot_interval = flow_num("snapshot_interval", sc.snapshot_interval, nonneg, "must be non-negative");
  sc.flow.remesh = r.boolean("flow", "remesh", sc.flow.remesh);
  sc.flow.remesh_ratio = flow_num("remesh_ratio", sc.flow.remesh_ratio, [](double v) { return v > 1.0; }, "must exceed 1");

  // Analysis.
  auto& a = sc.analysis;
  a.interior = r.boolean("analysis", "interior", a.interior);
  a.exterior = r.boolean("analysis", "exterior", a.exterior);
  a.enclosure = r.boolean("analysis", "enclosure", a.enclosure);
  a.pinching = r.boolean("analysis", "pinching", a.pinching);
  a.radii = r.boolean("analysis", "radii", a.radii);
  a.svg = r.boolean("analysis", "svg", a.svg);
  a.prune = r.boolean("analysis", "prune", a.prune);
  if (const Entry* e = r.find("analysis", "f_field")) {
    if (e->value == "none") a.f_field = FieldInit::none;
    else if (e->value == "H") a.f_field = FieldInit::mean_curvature;
    else if (e->value == "constant") a.f_field = FieldInit::constant;
    else if (e->value == "support") a.f_field = FieldInit::support;
    else throw ScenarioError(e->line, "f_field", "expected none, H, constant or support, got '" + e->value + "'");
  }
  a.f_constant = r.number("analysis", "f_constant", a.f_constant);
  if (const Entry* e = r.find("analysis", "f_constant")) {
    require(a.f_constant > 0.0, e, "f_constant", "must be positive");
    require(a.f_field == FieldInit::constant, e, "f_constant", "only used with f_field = constant");
  }
  a.slack = r.number("analysis", "slack", a.slack);
  require(a.slack >= 0.0, r.find("analysis", "slack"), "slack", "must be non-negative");
  a.verdict_horizon = r.number("analysis", "verdict_horizon", a.verdict_horizon);
  require(a.verdict_horizon > 0.0 && a.verdict_horizon <= 1.0, r.find("analysis", "verdict_horizon"), "verdict_horizon",
          "must lie in (0, 1]");
  long threads = r.integer("analysis", "threads", a.threads);
  require(threads >= 1, r.find("analysis", "threads"), "threads", "must be at least 1");
  a.threads = int(threads);

  // Verification.
  if (const Entry* e = r.find("verify", "suite")) {
    if (e->value != "none" && e->value != "all" && !parse_identity(e->value))
      throw ScenarioError(e->line, "suite", "unknown identity suite '" + e->value + "'");
    sc.verify_suite = e->value;
  }
  sc.tolerance_scale = r.number("tolerances", "scale", 1.0);
  require(sc.tolerance_scale > 0.0, r.find("tolerances", "scale"), "scale", "must be positive");
  auto tol = [&](const std::string& key, double& field) {
    field = r.number("tolerances", key, field);
    require(field > 0.0, r.find("tolerances", key), key, "must be positive");
  };
  tol("first", sc.tolerances.first);
  tol("second", sc.tolerances.second);
  tol("lemma1", sc.tolerances.lemma1);
  tol("time", sc.tolerances.time);
  tol("evolution", sc.tolerances.evolution);

  // Keys that are valid in general but unused by this configuration.
  for (const auto& [name, sec] : sections)
    for (const auto& [key, entry] : sec)
      if (!entry.used) throw ScenarioError(entry.line, key, "not used by shape '" + shape + "'");

  if (sc.output.empty()) sc.output = std::filesystem::path("out") / sc.name;
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "", "cannot open scenario file '" + path.string() + "'");
  try {
    return parse_scenario(in, path.parent_path());
  } catch (const ScenarioError& e) {
    throw ScenarioError(e.line, e.key, e.message, path.string());
  }
}

}  // namespace nclab
