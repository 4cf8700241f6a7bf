// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs the shipped scenarios into a scratch directory.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nclab/pipeline.hpp"

using namespace nclab;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Run {
  std::string name;
  Scenario scenario;
  RunResult result;
  std::vector<FlowState> snapshots;
  double seconds = 0.0;
  Weight weight = Weight::mean_curvature;
};

Run run(const std::string& name, const fs::path& root, void (*tweak)(Scenario&) = nullptr) {
  Run r;
  r.name = name;
  r.scenario = load_scenario(fs::path(NCLAB_SCENARIOS) / (name + ".ini"));
  if (tweak) tweak(r.scenario);
  RunOptions o;
  o.out = root / name;
  const auto t0 = Clock::now();
  r.result = run_scenario(r.scenario, o);
  r.seconds = seconds_since(t0);
  for (const auto& f : snapshot_files(o.out)) r.snapshots.push_back(read_snapshot(f));
  r.weight = r.scenario.analysis.f_field == FieldInit::none ? Weight::mean_curvature : Weight::f_field;
  return r;
}

int failures = 0;

void line(int id, bool pass, const std::string& text) {
  std::printf("[%s] %d %s\n", pass ? "PASS" : "FAIL", id, text.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const fs::path root = fs::temp_directory_path() / ("nclab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);

  auto ellipse_f = std::async(std::launch::async, [&] { return run("ellipse-gage-hamilton", root); });
  auto star_f = std::async(std::launch::async, [&] { return run("fourier-star", root); });
  auto torus_f = std::async(std::launch::async, [&] { return run("torus", root); });
  auto circle_f = std::async(std::launch::async, [&] {
    return run("circle-f", root, [](Scenario& s) { s.snapshot_interval = 0.01; });
  });
  auto circle1024_f = std::async(std::launch::async, [&] {
    return run("circle-baseline", root, [](Scenario& s) {
      s.geometry.resolution = 1024;
      s.snapshot_interval = 0.15;
      s.analysis.svg = false;
    });
  });
  Run ellipse = ellipse_f.get(), star = star_f.get(), torus = torus_f.get();
  Run circle_f_run = circle_f.get(), circle = circle1024_f.get();
  const std::vector<const Run*> trio{&ellipse, &star, &torus};

  // 1. Interior monotonicity up to the verdict horizon, runtime per scenario.
  {
    bool ok = true;
    std::ostringstream os;
    for (const Run* r : trio) {
      const auto& v = r->result.certification.interior;
      const bool blowup = r->result.termination == Termination::h_blowup;
      const bool fine = v.passed && v.compared > 0 && blowup && r->seconds <= 120.0;
      ok = ok && fine;
      os << r->name << " pairs " << v.compared << " worst " << fmt("%.3g", v.worst_violation) << " t<="
         << fmt("%.4g", r->result.verdict_horizon) << " in " << fmt("%.0f", r->seconds) << "s; ";
    }
    line(1, ok, "delta*_interior non-decreasing within slack 1e-3: " + os.str());
  }

  // 2. Calibration on circles and spheres.
  {
    double worst_circle = 0.0;
    for (const auto& rep : circle.result.certification.reports)
      worst_circle = std::max(worst_circle, std::abs(rep.interior.value - 1.0));
    FlowState sphere = make_state(build({SphereSpec{1.0}, 256, 64}));
    const double sphere_delta = delta_certificates(sample(sphere), {4, true}).interior.value;
    const FlowState& last = circle.snapshots.back();
    const double t = last.t, exact = std::sqrt(1.0 - 2.0 * t);
    const double radius = measures(last.geometry).equivalent_radius;
    const double rel = std::abs(radius - exact) / exact;
    const bool ok = worst_circle <= 1e-4 && std::abs(sphere_delta - 2.0) <= 1e-3 && rel <= 1e-3 && t == 0.45;
    line(2, ok,
         "circle N=1024 max|delta*-1| " + fmt("%.2e", worst_circle) + ", sphere 256x64 delta* " +
             fmt("%.6f", sphere_delta) + ", radius at t=0.45 rel. error " + fmt("%.2e", rel));
  }

  // 3. Proposition equivalence on random (snapshot, x, delta) triples.
  {
    std::mt19937_64 rng(20240601);
    std::vector<std::pair<const FlowState*, Weight>> pool;
    for (const Run* r : trio)
      for (const FlowState& s : r->snapshots) pool.push_back({&s, r->weight});
    std::uniform_int_distribution<std::size_t> pick_snap(0, pool.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int agree = 0, total = 0, banded = 0;
    while (total < 1200) {
      const auto& [st, w] = pool[pick_snap(rng)];
      SampledHypersurface s = sample(*st, w);
      for (int k = 0; k < 20; ++k) {
        const std::size_t x = std::uniform_int_distribution<std::size_t>(0, s.base_count - 1)(rng);
        // delta up to 3 delta*(x): both signs occur.
        const double d = (0.02 + 2.98 * unit(rng)) * std::min(vertex_delta_star(s, x), 10.0);
        const double mz = min_z(s, x, d);
        if (std::abs(mz) <= 1e-6) {
          ++banded;
          continue;
        }
        ++total;
        if ((mz > 0.0) == touching_ball_check(*st, s, x, d, Side::interior).avoids) ++agree;
      }
    }
    line(3, agree == total,
         std::to_string(agree) + "/" + std::to_string(total) + " triples agree (" + std::to_string(banded) +
             " in the 1e-6 band excluded)");
  }

  // 4. Identity suite.
  {
    auto all = run_suite("all");
    int ordered = 0, noise = 0, bad = 0, lemma = 0, zt = 0;
    double lemma_max = 0.0, zt_max = 0.0;
    for (const auto& r : all) {
      if (!r.passed) ++bad;
      switch (r.id) {
        case IdentityId::Lemma1:
          if (!r.skipped) {
            ++lemma;
            lemma_max = std::max(lemma_max, r.residual);
          }
          break;
        case IdentityId::Zt:
          ++zt;
          zt_max = std::max(zt_max, r.residual);
          break;
        case IdentityId::EvolutionIdentity: break;
        default:
          if (r.order) {
            const double ratio = r.residual / *r.residual_half;
            if (ratio < 3.5 || ratio > 4.5) ++bad;
            ++ordered;
          } else {
            ++noise;
          }
      }
    }
    const bool ok = bad == 0 && ordered > 0 && lemma > 0 && lemma_max <= 1e-12 && zt > 0 && zt_max <= 1e-6;
    line(4, ok,
         std::to_string(all.size()) + " checks: " + std::to_string(ordered) + " spatial residuals with ratio in [3.5,4.5], " +
             std::to_string(noise) + " at the rounding floor; Lemma1 max " + fmt("%.1e", lemma_max) + "; Zt max " +
             fmt("%.1e", zt_max));
  }

  // 5. Evolution identity.
  {
    ShrinkingRound c{1, 1.0};
    const double res = check_evolution_identity(c, 0.2, {0.4, 0.0}, {0.4 + kPi, 0.0}, 0.5).residual;
    IdentityResidual ref = evolution_identity_refinement(2.0, 1.0, {128, 256, 512}, 0.9);
    const bool ok = res <= 1e-6 && ref.order && *ref.order >= 1.0;
    line(5, ok,
         "shrinking circle delta=0.5 residual " + fmt("%.1e", res) + "; ellipse refinement order " +
             fmt("%.2f", ref.order.value_or(0.0)) + " (" + ref.note + ")");
  }

  // 6. Pinching and the exterior / enclosure monotonicity remarks.
  {
    double pin_in = 1e300, pin_out = 1e300;
    for (const Run* r : trio)
      for (const auto& rep : r->result.certification.reports) {
        pin_in = std::min(pin_in, rep.pinch_min_interior);
        if (rep.pinch_min_exterior) pin_out = std::min(pin_out, *rep.pinch_min_exterior);
      }
    const auto& ext = star.result.certification.exterior;
    const auto& enc = ellipse.result.certification.enclosure;
    const bool ok = pin_in >= -1e-6 && pin_out >= -1e-6 && ext.passed && ext.compared > 0 && enc.passed && enc.compared > 0;
    line(6, ok,
         "min eig(w g - delta* h) " + fmt("%.3g", pin_in) + ", min eig(w g + delta_ext h) " + fmt("%.3g", pin_out) +
             "; star exterior pairs " + std::to_string(ext.compared) + " worst " + fmt("%.3g", ext.worst_violation) +
             "; ellipse enclosure pairs " + std::to_string(enc.compared) + " worst " + fmt("%.3g", enc.worst_violation));
  }

  // 7. Roundness diagnostics of the ellipse run.
  {
    double iso = 1e300, ratio = 1e300;
    for (const auto& d : ellipse.result.diagnostics) {
      iso = std::min(iso, d.measures.isoperimetric_ratio);
      ratio = std::min(ratio, d.r_out / d.r_in);
    }
    line(7, iso < 1.01 && ratio < 1.02,
         "ellipse(2,1) min L^2/(4 pi A) " + fmt("%.6f", iso) + ", min r_out/r_in " + fmt("%.6f", ratio));
  }

  // 8. f = H on the circle.
  {
    double dev = 0.0;
    for (const auto& d : circle_f_run.result.diagnostics) dev = std::max(dev, d.f_relative_deviation.value_or(1e300));
    const auto& v = circle_f_run.result.certification.interior;
    line(8, dev <= 1e-2 && v.passed && v.compared > 0,
         "max ||f-H||/||H|| " + fmt("%.2e", dev) + " over " + std::to_string(circle_f_run.result.diagnostics.size()) +
             " snapshots; delta*_f pairs " + std::to_string(v.compared) + " worst " + fmt("%.3g", v.worst_violation));
  }

  // 9. Pruned == exhaustive everywhere, and total runtime.
  {
    int compared = 0, mismatch = 0;
    auto same = [](const Extremum& a, const Extremum& b) {
      return a.value == b.value && a.x == b.x && a.y == b.y && a.finite == b.finite && a.present == b.present;
    };
    for (const Run* r : {&ellipse, &star, &torus, &circle, &circle_f_run})
      for (const FlowState& st : r->snapshots) {
        SampledHypersurface s = sample(st, r->weight);
        Certificates a = delta_certificates(s, {1, false});
        Certificates b = delta_certificates(s, {4, true});
        ++compared;
        if (!same(a.interior, b.interior) || !same(a.exterior, b.exterior) || !same(a.enclosure, b.enclosure)) ++mismatch;
      }
    const double total = seconds_since(start);
    line(9, mismatch == 0 && total <= 600.0,
         "pruned/threaded == exhaustive on " + std::to_string(compared - mismatch) + "/" + std::to_string(compared) +
             " snapshots; acceptance wall time " + fmt("%.0f", total) + "s");
  }

  fs::remove_all(root);
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
