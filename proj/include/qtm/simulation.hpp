#pragma once

#include <string>
#include <vector>

#include "qtm/echo.hpp"

namespace qtm {

enum class Geometry { line, ring };

const char* to_string(Geometry g);
Geometry parse_geometry(std::string_view text);

/// Explicit lattice, or automatic sizing from the physical parameters.
struct GridSpec {
  bool automatic = true;
  std::size_t points = 0;
  Extent extent{};
};

/// Everything needed for one kicked-packet run.
struct Scenario {
  Geometry geometry = Geometry::line;
  PacketSpec1D packet{1.0, 4.0, 0.0};
  PacketSpecRing ring{6.0, 2.0, 4.0};
  PulseProfile pulse = PulseProfile::gaussian(40.0, 0.001);
  EvolutionPlan plan = EvolutionPlan::defaults_for(PulseProfile::gaussian(40.0, 0.001));
  GridSpec grid;

  int dim() const { return geometry == Geometry::line ? 1 : 2; }
  double sigma() const { return geometry == Geometry::line ? packet.sigma : ring.sigma; }
  double k() const { return geometry == Geometry::line ? packet.k : ring.k; }

  /// Threshold estimate for the packet (1D or ring formula).
  double lambda_min(bool warn_outside_regime = true) const;
  KickPrediction prediction(bool warn_outside_regime = true) const;
};

/// Worst-case physical demands a lattice has to satisfy; merge() several
/// scenarios to size one grid for a whole sweep.
struct GridDemand {
  Geometry geometry = Geometry::line;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double k_max = 0.0;
  double R_max = 0.0;
  double momentum = 0.0;  // max of k + k lambda / lambda_min
  double t0 = 1.0;
  double t_end = 4.0;

  static GridDemand of(const Scenario& s);
  void merge(const GridDemand& other);
};

/// Automatic lattice:
///   dx <= sigma_min / 8 and pi/dx >= 4 p, with p = max(k + k lambda/lambda_min);
///   tails are assumed to travel at most v = 2.5 p + 4/sigma_min, so the 1D
///   domain is [-v (t_end - t0) - 8 sigma_max, v t_end + 8 sigma_max) and the
///   2D half-width is R_max + v t_end + 8 sigma_max; points rounded up to a
///   power of two.
struct GridDesign {
  GridPtr grid;
  double momentum = 0.0;
  double tail_velocity = 0.0;
  std::string formula;  // human-readable record of the sizing
};

GridDesign design_grid(const GridDemand& demand);

/// Explicit grid when the scenario pins one, otherwise design_grid().
GridDesign resolve_grid(const Scenario& scenario);

WaveFunction initial_state(const Scenario& scenario, const GridPtr& grid);

struct RunResult {
  GridDesign grid;
  WaveFunction initial;
  WaveFunction post_pulse;  // state at the end of the pulse window (t0 for lambda = 0)
  WaveFunction final_state;
  EchoRecord record;
  double baseline_at_peak = 0.0;  // N of the unkicked packet at the peak time
  double reversed_fraction = 0.0;

  /// Peak strength above the free-dispersal baseline.
  double echo_excess() const { return record.detection.peak_strength - baseline_at_peak; }
};

struct RunOptions {
  bool warn_outside_regime = true;
  /// Overrides automatic sizing (used by sweeps and threshold searches to
  /// keep one lattice for every run).
  GridPtr grid;
};

/// Runs the scenario, records N(t) and detects the echo.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Bisection settings for the numerical threshold search.
struct ThresholdSearch {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double echo_threshold = 0.2;  // required peak excess over the lambda = 0 baseline
  double relative_tolerance = 0.02;
};

struct ThresholdResult {
  double lambda_min = 0.0;  // smallest bracketed lambda with an echo
  double lambda_below = 0.0;  // largest evaluated lambda without one
  std::vector<std::pair<double, double>> evaluations;  // (lambda, echo excess)
  GridDesign grid;
};

/// Smallest lambda whose run yields an echo excess above the threshold, by
/// bisection in [lambda_lo, lambda_hi]. Throws NumericalError when the
/// bracket does not straddle the threshold.
ThresholdResult find_lambda_min_numerical(const Scenario& scenario, const ThresholdSearch& search);

}  // namespace qtm
