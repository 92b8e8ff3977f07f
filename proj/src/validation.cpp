#include "qtm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "qtm/mirror.hpp"
#include "qtm/oracle.hpp"
#include "qtm/simulation.hpp"
#include "qtm/spectral.hpp"

namespace qtm {

FreeEvolver spectral_free_evolver() {
  return [](const WaveFunction& psi, double duration) {
    Propagator propagator(psi.grid);
    return propagator.free_segment(psi, duration, 1.0);
  };
}

FreeEvolver corrupted_kinetic_sign_evolver() {
  return [](const WaveFunction& psi, double duration) {
    const Grid& grid = *psi.grid;
    SpectralTransform transform(grid);
    const RealField k2 = laplacian_symbol(grid);
    WaveFunction out = psi;
    transform.forward(out.amplitudes, out.amplitudes);
    for (std::size_t i = 0; i < k2.size(); ++i) out.amplitudes[i] *= std::polar(1.0, -0.5 * k2[i] * duration);
    transform.inverse(out.amplitudes, out.amplitudes);
    out.time += duration;
    return out;
  };
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ValidationReport::format() const {
  std::string out;
  for (const auto& c : checks)
    out += fmt::format("{} {:<28} measured={:<12.4g} tolerance={:<10.3g} {}\n", c.passed ? "PASS" : "FAIL", c.name,
                       c.measured, c.tolerance, c.detail);
  out += fmt::format("{} of {} checks passed\n",
                     std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.passed; }),
                     checks.size());
  return out;
}

double RefinementStudy::min_order() const {
  return orders.empty() ? 0.0 : *std::min_element(orders.begin(), orders.end());
}

namespace {

WaveFunction pulsed_state(Propagator& propagator, const WaveFunction& psi0, const PulseProfile& pulse, double dt_pulse,
                          double t_end) {
  EvolutionPlan plan;
  plan.t_end = t_end;
  plan.dt = 1e-3 * t_end;
  plan.dt_pulse = dt_pulse;
  plan.sample_stride = 1u << 20;
  return propagator.evolve(psi0, pulse, plan);
}

GridPtr validation_grid_1d() { return make_grid(1, {-40.0, 40.0}, 4096); }

}  // namespace

RefinementStudy strang_refinement(double sigma, double k, double lambda, double width) {
  const auto grid = validation_grid_1d();
  const auto psi0 = gaussian_1d({sigma, k, 0.0}, grid);
  Propagator propagator(grid);
  const auto pulse = PulseProfile::gaussian(lambda, width, 1.0);
  const double t_end = pulse.window_end();
  const auto reference = pulsed_state(propagator, psi0, pulse, width / 800.0, t_end);

  RefinementStudy study;
  for (double divisions : {50.0, 100.0, 200.0}) {
    const double h = width / divisions;
    study.steps.push_back(h);
    study.errors.push_back(l2_distance(pulsed_state(propagator, psi0, pulse, h, t_end), reference));
  }
  for (std::size_t i = 1; i < study.errors.size(); ++i)
    study.orders.push_back(std::log2(study.errors[i - 1] / study.errors[i]));
  return study;
}

std::vector<double> pulse_to_kick_distances(double sigma, double k, double lambda, const std::vector<double>& widths) {
  const auto grid = validation_grid_1d();
  const auto psi0 = gaussian_1d({sigma, k, 0.0}, grid);
  Propagator propagator(grid);
  const double widest = *std::max_element(widths.begin(), widths.end());
  const double t_end = 1.0 + 6.0 * widest;
  const auto kicked = pulsed_state(propagator, psi0, PulseProfile::instantaneous(lambda, 1.0), widest / 50.0, t_end);
  std::vector<double> out;
  for (double w : widths)
    out.push_back(l2_distance(pulsed_state(propagator, psi0, PulseProfile::gaussian(lambda, w, 1.0), w / 50.0, t_end),
                              kicked));
  return out;
}

double current_jump_error(const WaveFunction& psi, double lambda) {
  SpectralTransform transform(*psi.grid);
  const auto before = current(psi, transform);
  const auto after = current(apply_kick(psi, lambda), transform);
  const auto expected = current_jump(psi, lambda, transform);
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t d = 0; d < expected.size(); ++d)
    for (std::size_t i = 0; i < expected[d].size(); ++i) {
      const double jump = after[d][i] - before[d][i];
      diff += (jump - expected[d][i]) * (jump - expected[d][i]);
      ref += expected[d][i] * expected[d][i];
    }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

KickIdentity kick_identity(const WaveFunction& psi, double lambda) {
  const auto kicked = apply_kick(psi, lambda);
  KickIdentity out;
  for (std::size_t i = 0; i < psi.amplitudes.size(); ++i)
    out.max_density_change =
        std::max(out.max_density_change, std::abs(abs2(kicked.amplitudes[i]) - abs2(psi.amplitudes[i])));
  out.norm_drift = std::abs(norm(kicked) - norm(psi));
  return out;
}

WaveFunction random_state(const GridPtr& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  WaveFunction psi{grid, ComplexField(grid->size()), 0.0};
  for (auto& a : psi.amplitudes) a = {gauss(rng), gauss(rng)};
  normalize(psi);
  return psi;
}

ValidationReport run_validation(const ValidationOptions& options) {
  ValidationReport report;
  auto add = [&](std::string name, double measured, double tolerance, bool passed, std::string detail = {}) {
    report.checks.push_back({std::move(name), passed, measured, tolerance, std::move(detail)});
  };
  auto guarded_evolve = [&](const WaveFunction& psi, double duration, std::string& failure) -> std::optional<WaveFunction> {
    try {
      return options.free_evolver(psi, duration);
    } catch (const std::exception& e) {
      failure = e.what();
      return std::nullopt;
    }
  };

  {
    const auto grid = validation_grid_1d();
    double worst = 0.0;
    std::string where;
    std::string failure;
    for (double sigma : {0.5, 1.0, 2.0})
      for (double k : {0.0, 4.0, 8.0})
        for (double t : {0.5, 1.0}) {
          const PacketSpec1D spec{sigma, k, 0.0};
          const auto evolved = guarded_evolve(gaussian_1d(spec, grid), t, failure);
          const double err = evolved ? l2_distance(*evolved, oracle::gaussian_free_1d(spec, t, grid)) : INFINITY;
          if (!(err <= worst)) {
            worst = err;
            where = fmt::format("worst at sigma={} k={} t={}", sigma, k, t);
          }
        }
    add("free_gaussian_oracle", worst, 1e-8, worst < 1e-8, failure.empty() ? where : failure);
  }

  {
    const auto grid = validation_grid_1d();
    const double q = 2.0 * std::numbers::pi / grid->extent().length() * 25.0;
    const std::vector<double> qs{q};
    std::string failure;
    const auto evolved = guarded_evolve(oracle::plane_wave_free(qs, 0.0, grid), 1.0, failure);
    const double err = evolved ? l2_distance(*evolved, oracle::plane_wave_free(qs, 1.0, grid)) : INFINITY;
    add("plane_wave_phase", err, 1e-10, err < 1e-10, failure);
  }

  {
    const auto grid = validation_grid_1d();
    const auto psi = gaussian_1d({1.0, 4.0, 0.0}, grid);
    std::string failure;
    const auto a = guarded_evolve(psi, 0.3, failure);
    const auto ab = a ? guarded_evolve(*a, 0.7, failure) : std::nullopt;
    const auto direct = guarded_evolve(psi, 1.0, failure);
    const double err = ab && direct ? l2_distance(*ab, *direct) : INFINITY;
    add("free_semigroup", err, 1e-12, err < 1e-12, failure);
  }

  {
    double worst_density = 0.0;
    double worst_norm = 0.0;
    const std::vector<GridPtr> grids{make_grid(1, {-20.0, 20.0}, 1024), make_grid(2, {-10.0, 10.0}, 64)};
    unsigned seed = 1;
    for (const auto& grid : grids)
      for (double lambda : {1.0, 40.0, 4843.0}) {
        const auto id = kick_identity(random_state(grid, seed++), lambda);
        worst_density = std::max(worst_density, id.max_density_change);
        worst_norm = std::max(worst_norm, id.norm_drift);
      }
    add("kick_density_exact", worst_density, 0.0, worst_density == 0.0);
    add("kick_norm_exact", worst_norm, 0.0, worst_norm == 0.0);
  }

  {
    const auto grid = make_grid(1, {-40.0, 40.0}, 8192);
    const auto psi = oracle::gaussian_free_1d({1.0, 4.0, 0.0}, 1.0, grid);
    double worst = 0.0;
    for (double lambda : {20.0, 40.0, 200.0}) worst = std::max(worst, current_jump_error(psi, lambda));
    add("current_jump_law", worst, 1e-8, worst < 1e-8, "lambda in {20, 40, 200}");
  }

  {
    Scenario s;
    s.pulse = PulseProfile::gaussian(40.0, 0.001);
    s.plan = EvolutionPlan::defaults_for(s.pulse, 2.0);
    RunOptions quiet;
    quiet.warn_outside_regime = false;
    const auto run = run_scenario(s, quiet);
    const double n0 = norm(run.initial);
    double drift = 0.0;
    for (const auto& sample : run.record.samples) drift = std::max(drift, std::abs(sample.norm - n0));
    add("norm_drift_full_run", drift, 1e-9, drift < 1e-9, "1d sigma=1 k=4 lambda=40 to t=2");
  }

  {
    const auto study = strang_refinement(1.0, 4.0, 40.0, 0.01);
    add("strang_order", study.min_order(), 1.9, study.min_order() >= 1.9,
        fmt::format("errors {:.3e} {:.3e} {:.3e}", study.errors[0], study.errors[1], study.errors[2]));
  }

  {
    const auto d = pulse_to_kick_distances(1.0, 4.0, 40.0, {0.008, 0.004, 0.002, 0.001});
    const bool monotone = std::is_sorted(d.rbegin(), d.rend(), std::less_equal<>());
    add("pulse_to_kick_monotone", d.back(), 0.0, monotone && d.back() < d.front(),
        fmt::format("distances {:.3e} {:.3e} {:.3e} {:.3e}", d[0], d[1], d[2], d[3]));
  }
  return report;
}

}  // namespace qtm
