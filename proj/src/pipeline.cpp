#include "nclab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace nclab {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ArtifactError("cannot write '" + path.string() + "'");
  os << content;
  if (!os) throw ArtifactError("write failed for '" + path.string() + "'");
}

std::string index_name(const char* prefix, std::size_t k, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05zu.%s", prefix, k, ext);
  return buf;
}

Weight weight_of(const FlowState& s) { return s.fields.f.empty() ? Weight::mean_curvature : Weight::f_field; }

ReportOptions report_options(const AnalysisOptions& a, Weight w, int threads) {
  ReportOptions r;
  r.weight = w;
  r.radii = a.radii;
  r.search.threads = std::max(1, threads);
  r.search.prune = a.prune;
  return r;
}

// Verdicts on enabled quantities only; horizon applies to blowup-terminated runs.
Certification judge(std::vector<NoncollapseReport> reports, const CertificateColumns& c, double slack, double t_max) {
  Certification out = verdicts(std::move(reports), slack, t_max);
  auto off = [](MonotonicityVerdict& v) {
    v.passed = true;
    v.compared = 0;
    v.worst_violation = 0.0;
    v.at = 0;
  };
  if (!c.interior) off(out.interior);
  if (!c.exterior) off(out.exterior);
  if (!c.enclosure) off(out.enclosure);
  return out;
}

bool all_passed(const Certification& c) { return c.interior.passed && c.exterior.passed && c.enclosure.passed; }

}  // namespace

CertificateColumns columns_of(const AnalysisOptions& a) {
  return {a.interior, a.exterior, a.enclosure, a.pinching, a.radii};
}

// ---------------------------------------------------------------------------
// certificates.csv

std::string certificates_header() {
  return "t,delta_interior,delta_exterior,delta_enclosure,pinch_min_interior,pinch_min_exterior,r_in,r_out,H_min,"
         "H_max,interior_x,interior_y,exterior_x,exterior_y,enclosure_x,enclosure_y\n";
}

std::string certificate_row(const NoncollapseReport& r, const CertificateColumns& c) {
  const std::string none = "none";
  std::string s = num(r.t);
  auto add = [&](const std::string& v) { s += ',' + v; };
  add(c.interior ? num(r.interior.value) : none);
  add(!c.exterior ? none : r.exterior.finite ? num(r.exterior.value) : "inf");
  add(c.enclosure && r.enclosure.present ? num(r.enclosure.value) : none);
  add(c.pinching && c.interior ? num(r.pinch_min_interior) : none);
  add(c.pinching && c.exterior && r.pinch_min_exterior ? num(*r.pinch_min_exterior) : none);
  add(c.radii ? num(r.r_in) : none);
  add(c.radii ? num(r.r_out) : none);
  add(num(r.H_min));
  add(num(r.H_max));
  add(c.interior ? std::to_string(r.interior.x) : none);
  add(c.interior ? std::to_string(r.interior.y) : none);
  add(c.exterior && r.exterior.finite ? std::to_string(r.exterior.x) : none);
  add(c.exterior && r.exterior.finite ? std::to_string(r.exterior.y) : none);
  add(c.enclosure && r.enclosure.present ? std::to_string(r.enclosure.x) : none);
  add(c.enclosure && r.enclosure.present ? std::to_string(r.enclosure.y) : none);
  return s + '\n';
}

std::vector<NoncollapseReport> read_certificates(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw ArtifactError("missing certificates file '" + csv.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line + '\n' != certificates_header())
    throw ArtifactError("'" + csv.string() + "': unexpected header");
  std::vector<NoncollapseReport> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = split_csv(line);
    auto bad = [&] { return ArtifactError("'" + csv.string() + "' line " + std::to_string(row) + ": corrupt row"); };
    if (f.size() != 16) throw bad();
    auto value = [&](const std::string& s) {
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "none") return std::numeric_limits<double>::quiet_NaN();
      try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw bad();
        return v;
      } catch (const std::logic_error&) {
        throw bad();
      }
    };
    auto index = [&](const std::string& s) -> std::size_t { return s == "none" ? 0 : std::size_t(value(s)); };
    NoncollapseReport r;
    r.t = value(f[0]);
    r.interior.value = value(f[1]);
    r.exterior.value = value(f[2]);
    r.exterior.finite = f[2] != "inf";
    r.enclosure.present = f[3] != "none";
    r.enclosure.value = value(f[3]);
    r.pinch_min_interior = value(f[4]);
    if (f[5] != "none") r.pinch_min_exterior = value(f[5]);
    r.r_in = value(f[6]);
    r.r_out = value(f[7]);
    r.H_min = value(f[8]);
    r.H_max = value(f[9]);
    r.interior.x = index(f[10]);
    r.interior.y = index(f[11]);
    r.exterior.x = index(f[12]);
    r.exterior.y = index(f[13]);
    r.enclosure.x = index(f[14]);
    r.enclosure.y = index(f[15]);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// diagnostics.csv

Diagnostics diagnose(const FlowState& s, const NoncollapseReport& r) {
  Diagnostics d;
  d.t = s.t;
  d.step = s.step;
  d.vertices = vertex_count(s.geometry);
  d.measures = measures(s.geometry);
  d.H_min = r.H_min;
  d.H_max = r.H_max;
  d.r_in = r.r_in;
  d.r_out = r.r_out;
  if (!s.fields.f.empty()) {
    const auto& f = s.fields.f;
    const auto& H = s.fields.H;
    d.f_min = *std::min_element(f.begin(), f.end());
    double dev = 0.0, hmax = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      dev = std::max(dev, std::abs(f[i] - H[i]));
      hmax = std::max(hmax, std::abs(H[i]));
    }
    d.f_relative_deviation = dev / hmax;
  }
  return d;
}

std::string diagnostics_header() {
  return "t,step,vertices,boundary,enclosed,isoperimetric_ratio,radius,H_min,H_max,r_in,r_out,r_out_over_r_in,f_min,"
         "f_minus_H_rel\n";
}

std::string diagnostics_row(const Diagnostics& d) {
  std::string s = num(d.t) + ',' + std::to_string(d.step) + ',' + std::to_string(d.vertices);
  for (double v : {d.measures.boundary, d.measures.enclosed, d.measures.isoperimetric_ratio,
                   d.measures.equivalent_radius, d.H_min, d.H_max, d.r_in, d.r_out})
    s += ',' + num(v);
  s += ',' + (d.r_in > 0.0 ? num(d.r_out / d.r_in) : std::string("none"));
  s += ',' + (d.f_min ? num(*d.f_min) : std::string("none"));
  s += ',' + (d.f_relative_deviation ? num(*d.f_relative_deviation) : std::string("none"));
  return s + '\n';
}

// ---------------------------------------------------------------------------
// Snapshots

void write_snapshot(std::ostream& os, const FlowState& s) {
  os << "nclab-snapshot 1\n";
  os << "t " << num(s.t) << "\n";
  os << "step " << s.step << "\n";
  write_geometry(os, s.geometry);
  os << "f " << s.fields.f.size() << "\n";
  for (double v : s.fields.f) os << num(v) << "\n";
}

FlowState read_snapshot(std::istream& is, const std::string& name) {
  auto fail = [&](const std::string& what) { return ArtifactError("corrupt snapshot '" + name + "': " + what); };
  std::string line, word;
  if (!std::getline(is, line) || line != "nclab-snapshot 1") throw fail("bad header");
  double t = 0.0;
  long step = 0;
  {
    if (!std::getline(is, line)) throw fail("missing time");
    std::istringstream ls(line);
    if (!(ls >> word >> t) || word != "t") throw fail("bad time line");
  }
  {
    if (!std::getline(is, line)) throw fail("missing step");
    std::istringstream ls(line);
    if (!(ls >> word >> step) || word != "step") throw fail("bad step line");
  }
  Geometry g;
  try {
    g = read_geometry(is);
    validate(g);
  } catch (const GeometryError& e) {
    throw fail(e.what());
  }
  std::size_t count = 0;
  if (!std::getline(is, line)) throw fail("missing f block");
  {
    std::istringstream ls(line);
    if (!(ls >> word >> count) || word != "f") throw fail("bad f header");
  }
  if (count != 0 && count != vertex_count(g)) throw fail("f count does not match the vertex count");
  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw fail("truncated f block");
    try {
      f[i] = std::stod(line);
    } catch (const std::logic_error&) {
      throw fail("bad f value on f line " + std::to_string(i + 1));
    }
  }
  FlowState s = make_state(std::move(g), std::move(f), t);
  s.step = step;
  return s;
}

FlowState read_snapshot(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("missing snapshot file '" + path.string() + "'");
  return read_snapshot(in, path.string());
}

std::vector<fs::path> snapshot_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ArtifactError("not a directory: '" + dir.string() + "'");
  fs::path d = fs::is_directory(dir / "snapshots") ? dir / "snapshots" : dir;
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(d)) {
    const std::string n = e.path().filename().string();
    if (e.is_regular_file() && n.rfind("snap_", 0) == 0 && e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ArtifactError("no snapshot files (snap_*.txt) in '" + d.string() + "'");
  return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

// Points of the drawn outline: the curve, or the meridian section (profile
// and its mirror image).
std::vector<std::vector<Vec2>> outline(const Geometry& g) {
  const auto& v = vertices(g);
  if (std::holds_alternative<DiscreteCurve>(g)) {
    std::vector<Vec2> c = v;
    c.push_back(v.front());
    return {c};
  }
  const auto& s = std::get<AxisymmetricSurface>(g);
  std::vector<Vec2> right = v, left;
  for (const Vec2& p : v) left.push_back({-p.x, p.y});
  if (s.topology == ProfileTopology::torus) {
    right.push_back(v.front());
    left.push_back(left.front());
  }
  return {right, left};
}

std::string colour(double u) {
  u = std::clamp(u, 0.0, 1.0);
  int r = int(std::lround(255 * u)), b = int(std::lround(255 * (1.0 - u))), gr = int(std::lround(255 * (1.0 - std::abs(2 * u - 1)) * 0.6));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, gr, b);
  return buf;
}

Vec2 drawn(const SampledHypersurface& s, std::size_t i) {
  const Vec3& p = s.X[i];
  return s.dim == 1 ? Vec2{p.x, p.y} : Vec2{p.x, p.z};
}

Vec2 drawn_normal(const SampledHypersurface& s, std::size_t i) {
  const Vec3& n = s.nu[i];
  return s.dim == 1 ? Vec2{n.x, n.y} : Vec2{n.x, n.z};
}

}  // namespace

ViewBox view_box(const Geometry& g) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& line : outline(g))
    for (const Vec2& p : line) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  const double m = 0.1 * std::max(x1 - x0, y1 - y0);
  return {x0 - m, y0 - m, x1 - x0 + 2 * m, y1 - y0 + 2 * m};
}

std::string svg_frame(const FlowState& st, const NoncollapseReport& r, const ViewBox& box, Weight weight) {
  const double scale = std::max(box.width, box.height);
  const double stroke = 0.004 * scale;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\""
     << std::lround(800.0 * box.height / box.width) << "\" viewBox=\"" << short_num(box.x0) << ' '
     << short_num(-(box.y0 + box.height)) << ' ' << short_num(box.width) << ' ' << short_num(box.height) << "\">\n";
  os << "<title>t = " << short_num(st.t) << ", delta* = " << short_num(r.interior.value) << "</title>\n";
  os << "<rect x=\"" << short_num(box.x0) << "\" y=\"" << short_num(-(box.y0 + box.height)) << "\" width=\""
     << short_num(box.width) << "\" height=\"" << short_num(box.height) << "\" fill=\"white\"/>\n";
  os << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"" << short_num(stroke) << "\">\n";

  // Outline segments coloured by H on a log scale over this frame.
  const auto& H = st.fields.H;
  const double lo = std::log(std::max(r.H_min, 1e-300)), hi = std::log(std::max(r.H_max, 1e-300));
  auto u_of = [&](double h) {
    if (!(hi > lo) || !(h > 0.0)) return 0.5;
    return (std::log(h) - lo) / (hi - lo);
  };
  const auto lines = outline(st.geometry);
  const std::size_t n = H.size();
  for (const auto& line : lines)
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const double h = 0.5 * (H[i % n] + H[(i + 1) % n]);
      os << "<line x1=\"" << short_num(line[i].x) << "\" y1=\"" << short_num(line[i].y) << "\" x2=\""
         << short_num(line[i + 1].x) << "\" y2=\"" << short_num(line[i + 1].y) << "\" stroke=\"" << colour(u_of(h))
         << "\"/>\n";
    }

  // Touching balls at the argmin pairs.
  SampledHypersurface s = sample(st, weight);
  auto ball = [&](const Extremum& e, double sign, const char* stroke_colour, const char* dash) {
    const Vec2 x = drawn(s, e.x), nu = drawn_normal(s, e.x);
    const double radius = e.value / s.weight[e.x];
    const Vec2 c = x - nu * (sign * radius);
    os << "<circle cx=\"" << short_num(c.x) << "\" cy=\"" << short_num(c.y) << "\" r=\"" << short_num(radius)
       << "\" stroke=\"" << stroke_colour << "\"" << dash << "/>\n";
    os << "<circle cx=\"" << short_num(x.x) << "\" cy=\"" << short_num(x.y) << "\" r=\"" << short_num(2 * stroke)
       << "\" fill=\"" << stroke_colour << "\" stroke=\"none\"/>\n";
    if (!e.diagonal()) {
      const Vec2 y = drawn(s, e.y);
      os << "<circle cx=\"" << short_num(y.x) << "\" cy=\"" << short_num(y.y) << "\" r=\"" << short_num(2 * stroke)
         << "\" fill=\"" << stroke_colour << "\" stroke=\"none\"/>\n";
    }
  };
  if (r.interior.value > 0.0) ball(r.interior, 1.0, "#000000", "");
  if (r.exterior.finite && r.exterior.value > 0.0) ball(r.exterior, -1.0, "#666666", " stroke-dasharray=\"0.02 0.02\"");
  os << "</g>\n</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// run

std::string verdict_text(const Certification& c) {
  std::string s;
  for (const MonotonicityVerdict* v : {&c.interior, &c.exterior, &c.enclosure}) {
    char buf[256];
    if (v->compared == 0)
      std::snprintf(buf, sizeof buf, "%-32s n/a (no comparable snapshots)\n", v->quantity.c_str());
    else
      std::snprintf(buf, sizeof buf, "%-32s %s (pairs %zu, worst excess %.3g at report %zu)\n", v->quantity.c_str(),
                    v->passed ? "PASS" : "FAIL", v->compared, v->worst_violation, v->at);
    s += buf;
  }
  return s;
}

RunResult run_scenario(const Scenario& sc, const RunOptions& o) {
  RunResult res;
  res.out = o.out.empty() ? sc.output : o.out;
  const fs::path snaps = res.out / "snapshots", frames = res.out / "frames";
  fs::create_directories(snaps);
  const bool svg = sc.analysis.svg;
  if (svg) fs::create_directories(frames);
  for (const fs::path& d : {snaps, frames})
    if (fs::is_directory(d))
      for (const auto& e : fs::directory_iterator(d)) fs::remove(e.path());

  const Geometry initial = build(sc.geometry);
  const Weight weight = sc.analysis.f_field == FieldInit::none ? Weight::mean_curvature : Weight::f_field;
  const int threads = o.threads > 0 ? o.threads : sc.analysis.threads;
  const ReportOptions ropt = report_options(sc.analysis, weight, threads);
  const CertificateColumns cols = columns_of(sc.analysis);
  const ViewBox box = view_box(initial);
  const double slack = sc.analysis.slack * sc.tolerance_scale * o.tolerance_scale;

  std::vector<NoncollapseReport> reports;
  std::string cert_csv = certificates_header(), diag_csv = diagnostics_header();

  EvolveOptions eo;
  eo.params = sc.flow;
  eo.t_end = sc.t_end;
  eo.snapshot_interval = sc.snapshot_interval;
  eo.h_cap_factor = sc.h_cap_factor;
  eo.f_init = sc.analysis.f_field;
  eo.f_constant = sc.analysis.f_constant;
  eo.keep_snapshots = false;
  eo.on_snapshot = [&](const FlowState& s) {
    const std::size_t k = reports.size();
    {
      std::ofstream os(snaps / index_name("snap", k, "txt"), std::ios::binary);
      if (!os) throw ArtifactError("cannot write snapshot " + std::to_string(k));
      write_snapshot(os, s);
    }
    NoncollapseReport r = report(s, ropt);
    cert_csv += certificate_row(r, cols);
    Diagnostics d = diagnose(s, r);
    diag_csv += diagnostics_row(d);
    res.diagnostics.push_back(d);
    if (svg) write_file(frames / index_name("frame", k, "svg"), svg_frame(s, r, box, weight));
    if (o.log)
      *o.log << "snapshot " << k << "  t=" << short_num(s.t) << "  delta*=" << short_num(r.interior.value)
             << "  H_max=" << short_num(r.H_max) << "\n";
    reports.push_back(std::move(r));
  };

  Trajectory traj = evolve(initial, eo);
  res.termination = traj.termination;
  res.message = traj.message;
  res.steps = traj.steps;
  res.final_time = traj.final_time;
  res.verdict_horizon = traj.termination == Termination::h_blowup ? sc.analysis.verdict_horizon * traj.final_time
                                                                   : std::numeric_limits<double>::infinity();
  res.certification = judge(std::move(reports), cols, slack, res.verdict_horizon);
  res.verdicts_passed = all_passed(res.certification);

  write_file(res.out / "certificates.csv", cert_csv);
  write_file(res.out / "diagnostics.csv", diag_csv);

  if (sc.verify_suite != "none") {
    res.verify = run_verify(sc.verify_suite, sc.tolerances.scaled(sc.tolerance_scale * o.tolerance_scale), res.out);
    res.verify_passed = std::all_of(res.verify.begin(), res.verify.end(), [](const auto& r) { return r.passed; });
  }

  nlohmann::ordered_json j;
  j["name"] = sc.name;
  j["dimension"] = dimension(initial);
  j["weight"] = weight == Weight::f_field ? "f" : "H";
  j["f_field"] = to_string(sc.analysis.f_field);
  j["analysis"] = {{"interior", cols.interior}, {"exterior", cols.exterior}, {"enclosure", cols.enclosure},
                   {"pinching", cols.pinching}, {"radii", cols.radii},       {"prune", sc.analysis.prune},
                   {"slack", slack},            {"verdict_horizon", sc.analysis.verdict_horizon}};
  j["flow"] = {{"c_stab", sc.flow.c_stab},
               {"c_diff", sc.flow.c_diff},
               {"dt_safety", sc.flow.dt_safety},
               {"t_end", sc.t_end},
               {"h_cap_factor", sc.h_cap_factor},
               {"snapshot_interval", sc.snapshot_interval},
               {"remesh", sc.flow.remesh},
               {"remesh_ratio", sc.flow.remesh_ratio}};
  j["termination"] = to_string(traj.termination);
  j["message"] = traj.message;
  j["steps"] = traj.steps;
  j["final_time"] = traj.final_time;
  j["snapshots"] = res.certification.reports.size();
  write_file(res.out / "run.json", j.dump(2) + "\n");

  std::ostringstream summary;
  summary << "scenario     " << sc.name << "\n";
  summary << "termination  " << to_string(traj.termination) << (traj.message.empty() ? "" : " (" + traj.message + ")")
          << "\n";
  summary << "steps        " << traj.steps << "\n";
  summary << "final time   " << num(traj.final_time) << "\n";
  summary << "snapshots    " << res.certification.reports.size() << "\n";
  summary << "certificate  " << (weight == Weight::f_field ? "f" : "H") << "\n";
  if (std::isfinite(res.verdict_horizon)) summary << "verdicts to  t <= " << num(res.verdict_horizon) << "\n";
  summary << verdict_text(res.certification);
  if (!res.verify.empty()) summary << "verify       " << (res.verify_passed ? "PASS" : "FAIL") << "\n";
  write_file(res.out / "summary.txt", summary.str());
  if (o.log) *o.log << summary.str();
  return res;
}

// ---------------------------------------------------------------------------
// analyze

AnalyzeResult analyze_directory(const AnalyzeOptions& o) {
  const auto files = snapshot_files(o.dir);
  AnalysisOptions a;
  double slack = a.slack;
  double horizon = std::numeric_limits<double>::infinity();
  const fs::path run_dir = o.dir.filename() == "snapshots" ? o.dir.parent_path() : o.dir;
  if (fs::exists(run_dir / "run.json")) {
    std::ifstream in(run_dir / "run.json");
    try {
      nlohmann::json j = nlohmann::json::parse(in);
      const auto& an = j.at("analysis");
      a.interior = an.at("interior");
      a.exterior = an.at("exterior");
      a.enclosure = an.at("enclosure");
      a.pinching = an.at("pinching");
      a.radii = an.at("radii");
      a.prune = an.at("prune");
      slack = an.at("slack");
      if (j.at("termination") == "H-blowup") horizon = double(an.at("verdict_horizon")) * double(j.at("final_time"));
    } catch (const nlohmann::json::exception& e) {
      throw ArtifactError("corrupt run manifest '" + (run_dir / "run.json").string() + "': " + e.what());
    }
  }
  const CertificateColumns cols = columns_of(a);
  AnalyzeResult res;
  std::vector<NoncollapseReport> reports;
  std::string cert_csv = certificates_header();
  std::string minz_csv = "t,delta,min_z,x,y\n";
  for (const fs::path& p : files) {
    FlowState s = read_snapshot(p);
    const Weight w = weight_of(s);
    NoncollapseReport r = report(s, report_options(a, w, o.threads));
    cert_csv += certificate_row(r, cols);
    reports.push_back(r);
    if (!o.delta_grid.empty()) {
      SampledHypersurface sh = sample(s, w);
      for (double delta : o.delta_grid) {
        MinZRow row;
        row.t = s.t;
        row.delta = delta;
        row.min_z = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < sh.base_count; ++x)
          for (std::size_t y = 0; y < sh.size(); ++y) {
            if (y == x) continue;
            const double z = z_value(sh, x, y, delta).z;
            if (z < row.min_z) {
              row.min_z = z;
              row.x = x;
              row.y = y;
            }
          }
        minz_csv += num(row.t) + ',' + num(row.delta) + ',' + num(row.min_z) + ',' + std::to_string(row.x) + ',' +
                    std::to_string(row.y) + '\n';
        res.min_z.push_back(row);
      }
    }
  }
  res.certification = judge(std::move(reports), cols, slack, horizon);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(o.out / "certificates.csv", cert_csv);
    if (!o.delta_grid.empty()) write_file(o.out / "min_z.csv", minz_csv);
  }
  return res;
}

// ---------------------------------------------------------------------------
// report

RunReport report_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ArtifactError("not a directory: '" + dir.string() + "'");
  auto reports = read_certificates(dir / "certificates.csv");
  if (reports.empty()) throw ArtifactError("'" + (dir / "certificates.csv").string() + "' has no rows");
  CertificateColumns cols;
  double slack = AnalysisOptions{}.slack, horizon = std::numeric_limits<double>::infinity();
  std::string name = dir.filename().string(), termination = "unknown";
  if (fs::exists(dir / "run.json")) {
    std::ifstream in(dir / "run.json");
    try {
      nlohmann::json j = nlohmann::json::parse(in);
      const auto& an = j.at("analysis");
      cols = {an.at("interior"), an.at("exterior"), an.at("enclosure"), an.at("pinching"), an.at("radii")};
      slack = an.at("slack");
      name = j.at("name");
      termination = j.at("termination");
      if (termination == "H-blowup") horizon = double(an.at("verdict_horizon")) * double(j.at("final_time"));
    } catch (const nlohmann::json::exception& e) {
      throw ArtifactError("corrupt run manifest '" + (dir / "run.json").string() + "': " + e.what());
    }
  }
  Certification c = judge(reports, cols, slack, horizon);
  std::ostringstream os;
  os << "run          " << name << "\n";
  os << "termination  " << termination << "\n";
  os << "snapshots    " << reports.size() << "  (t = " << short_num(reports.front().t) << " .. "
     << short_num(reports.back().t) << ")\n";
  auto range = [&](const char* label, auto get, bool on) {
    if (!on) return;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : reports) {
      double v = get(r);
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    os << label << short_num(get(reports.front())) << " -> " << short_num(get(reports.back())) << "  (range "
       << short_num(lo) << " .. " << short_num(hi) << ")\n";
  };
  range("delta_int    ", [](const NoncollapseReport& r) { return r.interior.value; }, cols.interior);
  range("delta_ext    ", [](const NoncollapseReport& r) { return r.exterior.value; }, cols.exterior);
  range("delta_enc    ", [](const NoncollapseReport& r) { return r.enclosure.value; }, cols.enclosure);
  range("pinch_int    ", [](const NoncollapseReport& r) { return r.pinch_min_interior; }, cols.pinching);
  if (cols.radii) {
    const auto& last = reports.back();
    os << "r_out/r_in   " << short_num(last.r_out / last.r_in) << " at the last snapshot\n";
  }
  if (fs::exists(dir / "diagnostics.csv")) {
    std::ifstream in(dir / "diagnostics.csv");
    std::string line, last;
    std::getline(in, line);
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    auto f = split_csv(last);
    if (f.size() >= 7) os << "iso ratio    " << f[5] << " at the last snapshot\n";
  }
  if (std::isfinite(horizon)) os << "verdicts to  t <= " << short_num(horizon) << "\n";
  os << verdict_text(c);
  return {os.str(), all_passed(c)};
}

// ---------------------------------------------------------------------------
// verify

std::string verify_csv(const std::vector<IdentityResidual>& results) {
  std::string s = "identity,config_hash,configuration,h,residual,residual_half,order,tolerance,status,note\n";
  for (const auto& r : results) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.config_hash));
    s += to_string(r.id) + ',' + hash + ',' + csv_quote(r.configuration) + ',' + num(r.h) + ',' + num(r.residual) + ',' +
         (r.residual_half ? num(*r.residual_half) : "none") + ',' + (r.order ? num(*r.order) : "none") + ',' +
         num(r.tolerance) + ',' + (r.skipped ? "skip" : r.passed ? "pass" : "fail") + ',' + csv_quote(r.note) + '\n';
  }
  return s;
}

std::string verify_summary(const std::vector<IdentityResidual>& results) {
  struct Tally {
    std::size_t total = 0, failed = 0, skipped = 0;
    double worst = 0.0, min_order = std::numeric_limits<double>::infinity(), max_order = -std::numeric_limits<double>::infinity();
  };
  std::vector<std::pair<IdentityId, Tally>> tallies;
  for (const auto& r : results) {
    auto it = std::find_if(tallies.begin(), tallies.end(), [&](const auto& t) { return t.first == r.id; });
    if (it == tallies.end()) {
      tallies.push_back({r.id, {}});
      it = tallies.end() - 1;
    }
    Tally& t = it->second;
    ++t.total;
    if (!r.passed) ++t.failed;
    if (r.skipped) ++t.skipped;
    else t.worst = std::max(t.worst, r.residual);
    if (r.order) {
      t.min_order = std::min(t.min_order, *r.order);
      t.max_order = std::max(t.max_order, *r.order);
    }
  }
  std::ostringstream os;
  std::size_t failed = 0;
  for (const auto& [id, t] : tallies) {
    char buf[256];
    std::string order = std::isfinite(t.min_order) ? short_num(t.min_order) + " .. " + short_num(t.max_order) : "-";
    std::snprintf(buf, sizeof buf, "%-18s %4zu checks  %4zu failed  %3zu skipped  worst residual %-10.3g order %s\n",
                  to_string(id).c_str(), t.total, t.failed, t.skipped, t.worst, order.c_str());
    os << buf;
    failed += t.failed;
  }
  for (const auto& r : results)
    if (!r.passed) os << "FAIL " << to_string(r.id) << "  " << r.configuration << "  residual " << short_num(r.residual)
                      << " > " << short_num(r.tolerance) << (r.note.empty() ? "" : "  (" + r.note + ")") << "\n";
  os << results.size() << " checks, " << failed << " failed: " << (failed ? "FAIL" : "PASS") << "\n";
  return os.str();
}

std::vector<IdentityResidual> run_verify(const std::string& selector, const Tolerances& tol, const fs::path& out,
                                         std::string* summary) {
  auto results = run_suite(selector, tol);
  const std::string text = verify_summary(results);
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(out / "verify.csv", verify_csv(results));
    write_file(out / "verify_summary.txt", text);
  }
  if (summary) *summary = text;
  return results;
}

}  // namespace nclab
