// nclab: scenario-driven front end.
//
// Exit status: 0 success, 1 a verdict or identity check failed, 2 usage or
// configuration error (including unknown suites), 3 flow invariant
// violation, 4 missing or corrupt artifacts and other runtime errors.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nclab/pipeline.hpp"
#include "nclab/scenario.hpp"

namespace fs = std::filesystem;
using namespace nclab;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2, kInvariant = 3, kRuntime = 4;

std::vector<double> parse_grid(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != tok.size()) throw std::invalid_argument("bad delta-grid value '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty delta grid");
  return out;
}

// Run directory from --out, a positional directory, or the scenario's output.
fs::path resolve_dir(const std::string& positional, const std::string& out, const std::string& scenario) {
  if (!positional.empty()) return positional;
  if (!out.empty()) return out;
  if (!scenario.empty()) return load_scenario(scenario).output;
  throw std::invalid_argument("a run directory is required (DIR, --out or --scenario)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nclab: mean curvature flow non-collapsing lab"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, dir_arg, suite = "all", grid_text;
  int threads = 0;
  double tolerance_scale = 1.0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Evolve a scenario, certify every snapshot and write the run directory");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the scenario)");
  run->add_option("--threads", threads, "Pair-search threads (overrides the scenario)")->check(CLI::PositiveNumber);
  run->add_option("--tolerance-scale", tolerance_scale, "Multiply the slack and identity tolerances")
      ->check(CLI::PositiveNumber);
  run->add_flag("--quiet", quiet, "Do not print per-snapshot progress");

  auto* analyze = app.add_subcommand("analyze", "Recompute certificates offline from a snapshot directory");
  analyze->add_option("dir", dir_arg, "Run directory or its snapshots/ subdirectory");
  analyze->add_option("--scenario", scenario_path, "Take the run directory from this scenario's output");
  analyze->add_option("--out", out_dir, "Output directory (default: DIR/analysis)");
  analyze->add_option("--delta-grid", grid_text, "Comma-separated delta values for min Z sweeps");
  analyze->add_option("--threads", threads, "Pair-search threads")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run the derivative identity suite");
  verify->add_option("suite", suite, "all, or one of Zy Zx Zyy Zxy Zxx Zt Lemma1 EvolutionIdentity");
  verify->add_option("--out", out_dir, "Directory for verify.csv and verify_summary.txt");
  verify->add_option("--scenario", scenario_path, "Take tolerances (and the suite, if set) from this scenario");
  verify->add_option("--tolerance-scale", tolerance_scale, "Multiply every tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--threads", threads, "Accepted for uniformity; the suite is sequential")
      ->check(CLI::PositiveNumber);

  auto* rep = app.add_subcommand("report", "Summarize a run directory and recheck its verdicts");
  rep->add_option("dir", dir_arg, "Run directory");
  rep->add_option("--out", out_dir, "Run directory (alternative to DIR)");
  rep->add_option("--scenario", scenario_path, "Take the run directory from this scenario's output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      Scenario sc = load_scenario(scenario_path);
      RunOptions o;
      o.out = out_dir;
      o.threads = threads;
      o.tolerance_scale = tolerance_scale;
      o.log = quiet ? nullptr : &std::cout;
      RunResult r = run_scenario(sc, o);
      if (quiet) std::cout << "wrote " << r.out.string() << "\n";
      if (r.termination == Termination::invariant_violation) {
        std::cerr << "invariant violation: " << r.message << "\n";
        return kInvariant;
      }
      return r.verdicts_passed && r.verify_passed ? kOk : kFailed;
    }
    if (*analyze) {
      AnalyzeOptions o;
      o.dir = resolve_dir(dir_arg, "", scenario_path);
      o.out = out_dir.empty() ? o.dir / "analysis" : fs::path(out_dir);
      if (!grid_text.empty()) o.delta_grid = parse_grid(grid_text);
      o.threads = threads > 0 ? threads : 1;
      AnalyzeResult r = analyze_directory(o);
      std::cout << "analyzed " << r.certification.reports.size() << " snapshots into " << o.out.string() << "\n";
      for (const auto& row : r.min_z)
        std::printf("t=%-10.6g delta=%-6.4g min Z=% .6e  (x=%zu, y=%zu)\n", row.t, row.delta, row.min_z, row.x, row.y);
      std::cout << verdict_text(r.certification);
      return kOk;
    }
    if (*verify) {
      Tolerances tol;
      double scale = tolerance_scale;
      if (!scenario_path.empty()) {
        Scenario sc = load_scenario(scenario_path);
        tol = sc.tolerances;
        scale *= sc.tolerance_scale;
        if (verify->count("suite") == 0 && sc.verify_suite != "none") suite = sc.verify_suite;
      }
      if (suite != "all" && !parse_identity(suite)) {
        std::cerr << "error: unknown identity suite '" << suite
                  << "' (expected all, Zy, Zx, Zyy, Zxy, Zxx, Zt, Lemma1, EvolutionIdentity)\n";
        return kUsage;
      }
      std::string summary;
      auto results = run_verify(suite, tol.scaled(scale), out_dir, &summary);
      std::cout << summary;
      bool ok = true;
      for (const auto& r : results) ok = ok && r.passed;
      return ok ? kOk : kFailed;
    }
    if (*rep) {
      RunReport r = report_directory(resolve_dir(dir_arg, out_dir, scenario_path));
      std::cout << r.text;
      return r.passed ? kOk : kFailed;
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
