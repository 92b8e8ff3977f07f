#include "qtm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace qtm {

const char* to_string(Geometry g) { return g == Geometry::line ? "1d" : "2d-ring"; }

Geometry parse_geometry(std::string_view text) {
  if (text == "1d" || text == "line") return Geometry::line;
  if (text == "2d-ring" || text == "2d" || text == "ring") return Geometry::ring;
  throw InvalidArgument(fmt::format("unknown geometry '{}' (expected 1d or 2d-ring)", text));
}

double Scenario::lambda_min(bool warn_outside_regime) const {
  return geometry == Geometry::line ? lambda_min_1d(packet.sigma, packet.k, warn_outside_regime)
                                    : lambda_min_2d(ring.R, ring.sigma, ring.k, warn_outside_regime);
}

KickPrediction Scenario::prediction(bool warn_outside_regime) const {
  return geometry == Geometry::line ? predict_1d(packet.sigma, packet.k, pulse.lambda, warn_outside_regime)
                                    : predict_ring(ring.R, ring.sigma, ring.k, pulse.lambda, warn_outside_regime);
}

GridDemand GridDemand::of(const Scenario& s) {
  GridDemand d;
  d.geometry = s.geometry;
  d.sigma_min = d.sigma_max = s.sigma();
  d.k_max = s.k();
  d.R_max = s.geometry == Geometry::ring ? s.ring.R : 0.0;
  d.momentum = s.k() + s.k() * s.pulse.lambda / s.lambda_min(false);
  d.t0 = s.pulse.t0;
  d.t_end = s.plan.t_end;
  return d;
}

void GridDemand::merge(const GridDemand& other) {
  if (other.geometry != geometry) throw InvalidArgument("cannot merge grid demands of different geometry");
  sigma_min = std::min(sigma_min, other.sigma_min);
  sigma_max = std::max(sigma_max, other.sigma_max);
  k_max = std::max(k_max, other.k_max);
  R_max = std::max(R_max, other.R_max);
  momentum = std::max(momentum, other.momentum);
  t0 = std::min(t0, other.t0);
  t_end = std::max(t_end, other.t_end);
}

GridDesign design_grid(const GridDemand& d) {
  if (!(d.sigma_min > 0.0) || !(d.momentum > 0.0)) throw InvalidArgument("design_grid: degenerate demand");
  const double dx_max = std::min(d.sigma_min / 8.0, std::numbers::pi / (4.0 * d.momentum));
  const double v = 2.5 * d.momentum + 4.0 / d.sigma_min;

  GridDesign out;
  out.momentum = d.momentum;
  out.tail_velocity = v;
  Extent extent;
  if (d.geometry == Geometry::line) {
    extent = {-v * (d.t_end - d.t0) - 8.0 * d.sigma_max, v * d.t_end + 8.0 * d.sigma_max};
  } else {
    const double half = d.R_max + v * d.t_end + 8.0 * d.sigma_max;
    extent = {-half, half};
  }
  const auto cells = static_cast<std::size_t>(std::ceil(extent.length() / dx_max));
  const std::size_t points = std::max<std::size_t>(16, next_power_of_two(cells));
  out.grid = make_grid(d.geometry == Geometry::line ? 1 : 2, extent, points);
  out.formula = fmt::format(
      "auto: p=max(k+k*lambda/lambda_min)={:.6g}; dx<=min(sigma_min/8, pi/(4p))={:.6g}; "
      "v=2.5p+4/sigma_min={:.6g}; extent=[{:.6g},{:.6g}); points={}",
      d.momentum, dx_max, v, extent.lo, extent.hi, points);
  return out;
}

GridDesign resolve_grid(const Scenario& scenario) {
  if (scenario.grid.automatic) return design_grid(GridDemand::of(scenario));
  GridDesign out;
  out.grid = make_grid(scenario.dim(), scenario.grid.extent, scenario.grid.points);
  out.formula = fmt::format("explicit: extent=[{:.6g},{:.6g}); points={}", scenario.grid.extent.lo,
                            scenario.grid.extent.hi, scenario.grid.points);
  return out;
}

WaveFunction initial_state(const Scenario& scenario, const GridPtr& grid) {
  return scenario.geometry == Geometry::line ? gaussian_1d(scenario.packet, grid)
                                             : gaussian_ring_2d(scenario.ring, grid);
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunResult result;
  if (options.grid) {
    result.grid.grid = options.grid;
    result.grid.formula = "shared";
  } else {
    result.grid = resolve_grid(scenario);
  }
  const auto& grid = result.grid.grid;
  if (grid->dim() != scenario.dim()) throw InvalidArgument("run_scenario: grid dimension does not match geometry");

  result.initial = initial_state(scenario, grid);
  Propagator propagator(grid);
  EchoRecorder recorder(result.initial);

  EvolutionObserver observer;
  observer.on_sample = [&](const WaveFunction& psi) { recorder(psi); };
  observer.on_pulse_end = [&](const WaveFunction& psi) { result.post_pulse = psi; };
  result.final_state = propagator.evolve(result.initial, scenario.pulse, scenario.plan, observer);
  if (scenario.pulse.lambda == 0.0)
    result.post_pulse = propagator.free_segment(result.initial, scenario.pulse.t0 - result.initial.time,
                                                scenario.plan.boundary_tolerance);

  result.record.samples = recorder.take();
  result.record.detection = detect_echo(result.record.samples, scenario.pulse);
  result.record.prediction = scenario.prediction(options.warn_outside_regime);

  const auto free_at_peak =
      propagator.free_segment(result.initial, result.record.detection.peak_time - result.initial.time,
                              scenario.plan.boundary_tolerance);
  result.baseline_at_peak = norm_correlation(result.initial, free_at_peak);
  result.reversed_fraction = reversed_fraction(result.post_pulse, propagator.transform());
  return result;
}

ThresholdResult find_lambda_min_numerical(const Scenario& scenario, const ThresholdSearch& search) {
  if (!(search.lambda_lo >= 0.0) || !(search.lambda_hi > search.lambda_lo))
    throw InvalidArgument("find_lambda_min_numerical: need 0 <= lambda_lo < lambda_hi");
  if (!(search.relative_tolerance > 0.0)) throw InvalidArgument("relative tolerance must be positive");

  ThresholdResult result;
  Scenario top = scenario;
  top.pulse.lambda = search.lambda_hi;
  result.grid = resolve_grid(top);

  RunOptions options;
  options.warn_outside_regime = false;
  options.grid = result.grid.grid;
  auto excess = [&](double lambda) {
    Scenario s = scenario;
    s.pulse.lambda = lambda;
    const double value = run_scenario(s, options).echo_excess();
    result.evaluations.emplace_back(lambda, value);
    return value;
  };

  double lo = search.lambda_lo;
  double hi = search.lambda_hi;
  if (!(excess(hi) > search.echo_threshold))
    throw NumericalError(fmt::format("no echo at the top of the bracket (lambda={}): threshold not bracketed", hi));
  if (excess(lo) > search.echo_threshold)
    throw NumericalError(fmt::format("echo already present at the bottom of the bracket (lambda={})", lo));
  while ((hi - lo) > search.relative_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > search.echo_threshold)
      hi = mid;
    else
      lo = mid;
  }
  result.lambda_min = hi;
  result.lambda_below = lo;
  return result;
}

}  // namespace qtm
