#pragma once

// Declarative run description read from a flat sectioned key = value file.
//
//   [scenario]  name, output
//   [geometry]  shape, radius, a, b, c, major, minor, cos, sin, points_file,
//               topology, N, M
//   [flow]      c_stab, c_diff, dt_safety, t_end, h_cap_factor,
//               snapshot_interval, remesh, remesh_ratio
//   [analysis]  interior, exterior, enclosure, pinching, radii, f_field,
//               f_constant, slack, verdict_horizon, svg, threads, prune
//   [verify]    suite
//   [tolerances] scale, first, second, lemma1, time, evolution
//
// Unknown sections and keys, repeated keys, and keys that the chosen shape
// does not use are rejected with the offending line number.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "nclab/flow.hpp"
#include "nclab/geometry.hpp"
#include "nclab/verify.hpp"

namespace nclab {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::size_t line, const std::string& key, const std::string& message, const std::string& file = {});
  std::size_t line;  // 0 when not tied to a line
  std::string key;
  std::string message;
};

struct AnalysisOptions {
  bool interior = true;
  bool exterior = true;
  bool enclosure = true;
  bool pinching = true;
  bool radii = true;
  FieldInit f_field = FieldInit::none;
  double f_constant = 1.0;
  double slack = 1e-3;
  /// Fraction of the horizon entering the verdicts when the run ends by
  /// H-blowup; runs ending at t_end use every snapshot.
  double verdict_horizon = 0.8;
  bool svg = true;
  int threads = 1;
  bool prune = true;
};

struct Scenario {
  std::string name = "scenario";
  std::filesystem::path output;  // empty: "out/<name>"
  ShapeDescriptor geometry;
  FlowParams flow;
  double t_end = 0.0;
  double h_cap_factor = 1000.0;
  double snapshot_interval = 0.0;
  AnalysisOptions analysis;
  std::string verify_suite = "none";
  Tolerances tolerances;
  double tolerance_scale = 1.0;
};

/// `base_dir` resolves relative points_file paths.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = ".");
Scenario load_scenario(const std::filesystem::path& path);

std::string to_string(FieldInit f);

}  // namespace nclab
