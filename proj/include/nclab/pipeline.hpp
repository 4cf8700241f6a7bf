#pragma once

// Run orchestration and artifacts: evolve + certify a scenario, offline
// re-analysis of snapshot directories, run summaries, and the identity suite.
//
// Run directory layout:
//   run.json                 scenario echo, analysis flags, termination
//   certificates.csv         one NoncollapseReport per snapshot
//   diagnostics.csv          shape diagnostics per snapshot
//   summary.txt              termination and monotonicity verdicts
//   snapshots/snap_NNNNN.txt time, step, geometry and f per snapshot
//   frames/frame_NNNNN.svg   outline coloured by H with the touching balls
//   verify.csv, verify_summary.txt  when the scenario selects a suite

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nclab/flow.hpp"
#include "nclab/noncollapse.hpp"
#include "nclab/scenario.hpp"
#include "nclab/verify.hpp"

namespace nclab {

/// Missing, unreadable or corrupt artifact; the message names the file.
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which certificate columns are populated; disabled ones print "none".
struct CertificateColumns {
  bool interior = true, exterior = true, enclosure = true, pinching = true, radii = true;
};

CertificateColumns columns_of(const AnalysisOptions& a);

/// Header and rows of certificates.csv. Numbers use %.17g; an infinite
/// exterior constant prints "inf", absent or disabled values print "none".
std::string certificates_header();
std::string certificate_row(const NoncollapseReport& r, const CertificateColumns& c = {});
std::vector<NoncollapseReport> read_certificates(const std::filesystem::path& csv);

struct Diagnostics {
  double t = 0.0;
  long step = 0;
  std::size_t vertices = 0;
  Measures measures;
  double H_min = 0.0, H_max = 0.0;
  double r_in = 0.0, r_out = 0.0;
  std::optional<double> f_min;
  std::optional<double> f_relative_deviation;  // max|f - H| / max|H|
};

Diagnostics diagnose(const FlowState& s, const NoncollapseReport& r);
std::string diagnostics_header();
std::string diagnostics_row(const Diagnostics& d);

/// Snapshot record: header, time, step, geometry block, then the f values.
void write_snapshot(std::ostream& os, const FlowState& s);
FlowState read_snapshot(std::istream& is, const std::string& name);
FlowState read_snapshot(const std::filesystem::path& path);
/// Sorted snap_*.txt files in `dir` or in `dir`/snapshots.
std::vector<std::filesystem::path> snapshot_files(const std::filesystem::path& dir);

struct ViewBox {
  double x0 = -1.0, y0 = -1.0, width = 2.0, height = 2.0;
};

/// World-coordinate box around the (meridian section of the) geometry with a
/// 10% margin.
ViewBox view_box(const Geometry& g);

/// SVG 1.1 frame: outline coloured by H, touching balls at the interior and
/// (when finite) exterior argmin pairs.
std::string svg_frame(const FlowState& s, const NoncollapseReport& r, const ViewBox& box, Weight weight);

struct RunOptions {
  std::filesystem::path out;    // empty: scenario output
  int threads = 0;              // 0: scenario setting
  double tolerance_scale = 1.0; // multiplies verify tolerances and the slack
  std::ostream* log = nullptr;
};

struct RunResult {
  std::filesystem::path out;
  Termination termination = Termination::time_limit;
  std::string message;
  long steps = 0;
  double final_time = 0.0;
  double verdict_horizon = 0.0;
  Certification certification;
  std::vector<Diagnostics> diagnostics;
  std::vector<IdentityResidual> verify;
  bool verdicts_passed = true;
  bool verify_passed = true;
};

/// Evolve, certify and write the run directory. Throws InvariantViolation for
/// non-mean-convex input without an f field; a mid-run invariant violation
/// is reported through `termination` after all artifacts are written.
RunResult run_scenario(const Scenario& sc, const RunOptions& o = {});

struct AnalyzeOptions {
  std::filesystem::path dir;     // run directory or its snapshots/ subdirectory
  std::filesystem::path out;     // empty: write nothing
  std::vector<double> delta_grid;
  int threads = 1;
};

struct MinZRow {
  double t = 0.0;
  double delta = 0.0;
  double min_z = 0.0;
  std::size_t x = 0, y = 0;
};

struct AnalyzeResult {
  Certification certification;
  std::vector<MinZRow> min_z;
};

/// Recompute certificates from snapshot files, using the run's analysis
/// flags from run.json when present. Writes certificates.csv (and min_z.csv
/// for a delta grid) into `out`.
AnalyzeResult analyze_directory(const AnalyzeOptions& o);

/// Human-readable summary of a run directory from its CSV files; `passed`
/// reflects the recomputed monotonicity verdicts.
struct RunReport {
  std::string text;
  bool passed = true;
};
RunReport report_directory(const std::filesystem::path& dir);

/// Identity suite with CSV and summary emission into `out` (when non-empty).
/// Throws std::invalid_argument for unknown selectors.
std::vector<IdentityResidual> run_verify(const std::string& selector, const Tolerances& tol,
                                         const std::filesystem::path& out, std::string* summary = nullptr);

std::string verify_csv(const std::vector<IdentityResidual>& results);
std::string verify_summary(const std::vector<IdentityResidual>& results);

/// Monotonicity verdict lines.
std::string verdict_text(const Certification& c);

}  // namespace nclab
