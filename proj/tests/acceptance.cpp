#include <chrono>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qtm/config.hpp"
#include "qtm/mirror.hpp"
#include "qtm/oracle.hpp"
#include "qtm/simulation.hpp"
#include "qtm/sweep.hpp"
#include "qtm/units.hpp"
#include "qtm/validation.hpp"

using namespace qtm;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

// Tolerances.
constexpr double kKickTol = 0.0;
constexpr double kCurrentJumpTol = 1e-8;
constexpr double kFreeOracleTol = 1e-8;
constexpr double kRingTol = 5e-2;
constexpr double kEcho1dLo = 0.45;
constexpr double kEcho1dHi = 0.75;
constexpr double kEchoTimeRel = 0.10;
constexpr double kBelowThresholdExcess = 0.2;
constexpr double kThresholdLo = 0.7;
constexpr double kThresholdHi = 1.5;
constexpr double kRatioLo = 1.6;
constexpr double kRatioHi = 2.4;
constexpr double kEcho2dFloor = 0.7;
constexpr double kEcho2dTarget = 0.9;
constexpr double kPhaseTol = 1e-6;
constexpr double kNormDriftTol = 1e-9;
constexpr double kStrangOrder = 1.9;
constexpr double kUnitsRel = 0.01;
constexpr double kScatteringRel = 0.02;

// Independent reference values.
constexpr double kLambdaMinSigma1K4 = 19.27;
constexpr double kEchoTimeLambda40 = 1.93;

struct Outcome {
  bool passed;
  std::string detail;
};

fs::path preset(const std::string& name) { return fs::path(QTM_PRESET_DIR) / (name + ".ini"); }

RunOptions quiet_run() {
  RunOptions o;
  o.warn_outside_regime = false;
  return o;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome kick_identity_check() {
  double density = 0.0, drift = 0.0;
  unsigned seed = 100;
  for (const auto& g : {make_grid(1, {-20.0, 20.0}, 4096), make_grid(2, {-10.0, 10.0}, 128)})
    for (double lambda : {1.0, 20.0, 40.0, 200.0, 4843.0}) {
      const auto id = kick_identity(random_state(g, seed++), lambda);
      density = std::max(density, id.max_density_change);
      drift = std::max(drift, id.norm_drift);
    }
  return {density == kKickTol && drift == kKickTol,
          fmt::format("max density change {:.3g}, norm drift {:.3g} vs {} (10 random 1D/2D states)", density, drift,
                      kKickTol)};
}

Outcome current_jump_check() {
  const auto g = make_grid(1, {-40.0, 40.0}, 8192);
  const auto psi = oracle::gaussian_free_1d({1.0, 4.0, 0.0}, 1.0, g);
  double worst = 0.0;
  std::string parts;
  for (double lambda : {20.0, 40.0, 200.0}) {
    const double e = current_jump_error(psi, lambda);
    worst = std::max(worst, e);
    parts += fmt::format(" lambda={}:{:.3g}", lambda, e);
  }
  return {worst < kCurrentJumpTol, fmt::format("relative L2 {:.3g} vs {:.0e} ({} )", worst, kCurrentJumpTol, parts)};
}

Outcome free_oracle_check() {
  const auto g = make_grid(1, {-40.0, 40.0}, 4096);
  Propagator prop(g);
  double worst = 0.0;
  std::string where;
  for (double sigma : {0.5, 1.0, 2.0})
    for (double k : {0.0, 4.0, 8.0})
      for (double t : {0.5, 1.0}) {
        const PacketSpec1D spec{sigma, k, 0.0};
        const double e = l2_distance(prop.free_segment(gaussian_1d(spec, g), t), oracle::gaussian_free_1d(spec, t, g));
        if (e >= worst) {
          worst = e;
          where = fmt::format("sigma={} k={} t={}", sigma, k, t);
        }
      }
  return {worst < kFreeOracleTol, fmt::format("L2 {:.3g} vs {:.0e} (worst at {})", worst, kFreeOracleTol, where)};
}

double ring_error(const PacketSpecRing& spec, double t, double half_width) {
  const auto g = make_grid(2, {-half_width, half_width}, 1024);
  Propagator prop(g);
  const auto evolved = prop.free_segment(gaussian_ring_2d(spec, g), t);
  return l2_distance(evolved, oracle::ring_free_2d(spec, t, g));
}

Outcome ring_check() {
  const double t = 0.25;
  const double base = ring_error({12.0, 2.0, 6.0}, t, 32.0);
  const double doubled_R = ring_error({24.0, 2.0, 6.0}, t, 48.0);
  const double doubled_k = ring_error({12.0, 2.0, 12.0}, t, 32.0);
  return {base < kRingTol && doubled_R < base,
          fmt::format("L2 {:.4g} vs {:.0e} (kR=72); kR=144 via R=24: {:.4g} (must decrease); "
                      "kR=144 via k=12: {:.4g} (reported)",
                      base, kRingTol, doubled_R, doubled_k)};
}

Outcome echo_1d_check() {
  const auto c40 = load_run_config(preset("qtm1d_fig1a_lambda40"));
  const auto r40 = run_scenario(c40.scenario, quiet_run());
  const auto& d = r40.record.detection;
  const auto c20 = load_run_config(preset("qtm1d_fig1a_lambda20"));
  const auto r20 = run_scenario(c20.scenario, quiet_run());
  const bool strength_ok = d.echo && d.peak_strength >= kEcho1dLo && d.peak_strength <= kEcho1dHi;
  const bool time_ok = rel(d.peak_time, kEchoTimeLambda40) <= kEchoTimeRel;
  const bool below_ok = r20.echo_excess() < kBelowThresholdExcess;
  return {strength_ok && time_ok && below_ok,
          fmt::format("lambda=40 peak {:.4f} in [{}, {}] {}; t={:.4f} vs {} +-{:.0f}% (off {:.1f}%) {}; "
                      "lambda=20 excess {:.4f} vs < {} {}",
                      d.peak_strength, kEcho1dLo, kEcho1dHi, strength_ok ? "ok" : "out", d.peak_time,
                      kEchoTimeLambda40, 100 * kEchoTimeRel, 100 * rel(d.peak_time, kEchoTimeLambda40),
                      time_ok ? "ok" : "out", r20.echo_excess(), kBelowThresholdExcess, below_ok ? "ok" : "out")};
}

Outcome threshold_check() {
  auto base = load_run_config(preset("qtm1d_fig1a_lambda40"));
  auto search_for = [&](double k, double hi) {
    Scenario s = base.scenario;
    s.packet.k = k;
    ThresholdSearch search;
    search.lambda_lo = 0.0;
    search.lambda_hi = hi;
    search.echo_threshold = base.echo_threshold;
    return find_lambda_min_numerical(s, search).lambda_min;
  };
  const double k4 = search_for(4.0, 80.0);
  const double k8 = search_for(8.0, 160.0);
  const double factor = k4 / kLambdaMinSigma1K4;
  const double ratio = k8 / k4;
  const bool ok = factor >= kThresholdLo && factor <= kThresholdHi && ratio >= kRatioLo && ratio <= kRatioHi;
  return {ok, fmt::format("numerical lambda_min(k=4) {:.3f} = {:.3f} x {} vs [{}, {}]; "
                          "k=8 {:.3f}, ratio {:.3f} vs [{}, {}]",
                          k4, factor, kLambdaMinSigma1K4, kThresholdLo, kThresholdHi, k8, ratio, kRatioLo, kRatioHi)};
}

Outcome echo_2d_check() {
  const auto c = load_run_config(preset("qtm2d_fig3a"));
  const double estimate = 2.0 * pi * (std::numbers::e * std::sqrt(pi) / 2.0) * (6.0 + 4.0) * 4.0 * 4.0;
  const auto r = run_scenario(c.scenario, quiet_run());
  const auto& d = r.record.detection;
  return {d.echo && d.peak_strength >= kEcho2dFloor,
          fmt::format("peak {:.4f} at t={:.4f} vs >= {} (lambda={} = {:.3f} x threshold estimate); "
                      "target {} {}",
                      d.peak_strength, d.peak_time, kEcho2dFloor, c.scenario.pulse.lambda,
                      c.scenario.pulse.lambda / estimate, kEcho2dTarget,
                      d.peak_strength >= kEcho2dTarget ? "reached" : "not reached")};
}

Outcome echo_time_check() {
  auto base = load_run_config(preset("qtm1d_fig1a_lambda40"));
  bool ok = true;
  std::string parts;
  for (double lambda : {40.0, 60.0, 100.0}) {
    Scenario s = base.scenario;
    s.pulse.lambda = lambda;
    const auto r = run_scenario(s, quiet_run());
    const double expected = lambda / (lambda - kLambdaMinSigma1K4);
    const double off = rel(r.record.detection.peak_time, expected);
    const bool this_ok = r.record.detection.echo && off <= kEchoTimeRel;
    ok = ok && this_ok;
    parts += fmt::format(" lambda={}: t={:.4f} vs {:.4f} ({:.1f}% {})", lambda, r.record.detection.peak_time, expected,
                         100 * off, this_ok ? "ok" : "out");
  }
  return {ok, fmt::format("tolerance {:.0f}%;{}", 100 * kEchoTimeRel, parts)};
}

Outcome phase_check() {
  bool ok = true;
  std::string parts;
  for (double lambda : {30.0, 40.0, 50.0}) {
    const auto c = phase_comparison(1.0, 4.0, lambda);
    const auto& mid = c.samples[c.samples.size() / 2];
    const double expected = lambda / std::sqrt(2.0 * pi);
    const double err = std::abs(mid.phi_qtm - expected);
    ok = ok && mid.xi == 0.0 && err < kPhaseTol && mid.phi_ideal == 0.0;
    parts += fmt::format(" {:.6f} vs {:.6f} (err {:.2g});", mid.phi_qtm, expected, err);
  }
  return {ok, fmt::format("phi_qtm(0) within {:.0e}:{}", kPhaseTol, parts)};
}

Outcome convergence_check() {
  const auto c = load_run_config(preset("qtm1d_fig1a_lambda40"));
  const auto r = run_scenario(c.scenario, quiet_run());
  const double n0 = norm(r.initial);
  double drift = 0.0;
  for (const auto& s : r.record.samples) drift = std::max(drift, std::abs(s.norm - n0));
  const auto study = strang_refinement(1.0, 4.0, 40.0, 0.01);
  const auto d = pulse_to_kick_distances(1.0, 4.0, 40.0, {0.008, 0.004, 0.002, 0.001});
  bool monotone = true;
  for (std::size_t i = 1; i < d.size(); ++i) monotone = monotone && d[i] < d[i - 1];
  return {drift < kNormDriftTol && study.min_order() >= kStrangOrder && monotone,
          fmt::format("norm drift {:.3g} vs {:.0e}; Strang order {:.3f} vs >= {}; pulse-to-kick {:.4f} {:.4f} {:.4f} "
                      "{:.4f} {}",
                      drift, kNormDriftTol, study.min_order(), kStrangOrder, d[0], d[1], d[2], d[3],
                      monotone ? "monotone" : "not monotone")};
}

Outcome units_check() {
  const auto lab = load_lab_config(preset("lithium7"));
  const auto& ctx = lab.context;
  const double sigma = units::to_dimensionless(ctx, units::Quantity::length, 10e-6);
  const double k = units::to_dimensionless(ctx, units::Quantity::velocity, 2e-3);
  const double a10 = units::scattering_length(ctx, 10.0) * 1e9;
  const double a200 = units::scattering_length(ctx, 200.0) * 1e9;
  const bool ok = rel(sigma, 1.05) <= kUnitsRel && rel(k, 2.1) <= kUnitsRel && rel(a10, 5.3) <= kScatteringRel &&
                  rel(a200, 105.0) <= kScatteringRel;
  return {ok, fmt::format("sigma {:.4f} vs 1.05 +-1%; k {:.4f} vs 2.1 +-1%; a_s {:.3f} nm vs 5.3 +-2%; "
                          "{:.2f} nm vs 105 +-2%",
                          sigma, k, a10, a200)};
}

std::string csv_bytes(const SweepResult& result, const fs::path& path) {
  write_sweep_csv(path, result, std::vector<std::string>{"determinism"});
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome sweep_determinism_check() {
  auto plan = load_sweep_config(preset("sweep_smoke")).plan();
  const fs::path dir = fs::temp_directory_path() / "qtm_acceptance";
  fs::create_directories(dir);
  plan.workers = 1;
  const std::string one = csv_bytes(run_sweep(plan), dir / "workers1.csv");
  plan.workers = 8;
  const std::string eight = csv_bytes(run_sweep(plan), dir / "workers8.csv");
  return {one == eight && !one.empty(),
          fmt::format("{} bytes (workers=1) vs {} bytes (workers=8), {}", one.size(), eight.size(),
                      one == eight ? "identical" : "different")};
}

struct Criterion {
  std::string name;
  std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"kick_identity", kick_identity_check},
      {"current_jump_law", current_jump_check},
      {"free_evolution_oracle", free_oracle_check},
      {"ring_oracle", ring_check},
      {"echo_1d", echo_1d_check},
      {"threshold_1d", threshold_check},
      {"echo_2d", echo_2d_check},
      {"echo_time_law", echo_time_check},
      {"phase_comparison", phase_check},
      {"convergence_conservation", convergence_check},
      {"units", units_check},
      {"sweep_determinism", sweep_determinism_check},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  set_warning_handler([](std::string_view) {});
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << fmt::format("{} {}: {} [{:.1f} s]", o.passed ? "PASS" : "FAIL", c.name, o.detail, seconds)
              << std::endl;
    if (!o.passed) ++failures;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
