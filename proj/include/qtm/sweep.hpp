#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qtm/simulation.hpp"

namespace qtm {

enum class SweepParam { lambda, sigma, k, R };

const char* to_string(SweepParam p);
SweepParam parse_sweep_param(std::string_view text);

/// Evenly spaced axis values min + i (max - min) / (count - 1).
struct SweepAxis {
  SweepParam param = SweepParam::lambda;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 2;

  double value(std::size_t i) const;
};

struct SweepPlan {
  Scenario base;  // fixed parameters, pulse template and evolution plan
  SweepAxis axis1;
  SweepAxis axis2;
  std::size_t workers = 1;
  double echo_threshold = 0.2;

  /// Throws InvalidArgument: counts >= 2, distinct axes, min <= max,
  /// R only for the ring geometry, positive sigma/k and lambda >= 0.
  void validate() const;

  /// Base scenario with the (i, j) axis values substituted.
  Scenario cell_scenario(std::size_t i, std::size_t j) const;
};

struct SweepCell {
  std::size_t i = 0;
  std::size_t j = 0;
  double value1 = 0.0;
  double value2 = 0.0;
  double peak_strength = 0.0;
  double peak_time = 0.0;
  double reversed_fraction = 0.0;
  double baseline = 0.0;  // lambda = 0 norm correlation at peak_time
  bool ok = false;
  std::string failure;

  double echo_excess() const { return peak_strength - baseline; }
};

/// Analytic threshold overlay. With lambda swept, points are
/// (other axis value, lambda_min); with lambda fixed, points trace the
/// iso-line lambda_min(axis1, axis2) = lambda.
struct OverlayCurve {
  std::string x_name;
  std::string y_name;
  std::vector<std::pair<double, double>> points;
};

OverlayCurve analytic_overlay(const SweepPlan& plan);

struct SweepResult {
  SweepPlan plan;
  GridDesign grid;
  std::vector<SweepCell> cells;  // row-major, axis1 outer
  OverlayCurve overlay;
  std::size_t failures = 0;

  const SweepCell& at(std::size_t i, std::size_t j) const { return cells[i * plan.axis2.count + j]; }
};

/// Lattice shared by every cell, sized for the worst-case cell unless the
/// base scenario pins an explicit grid.
GridDesign sweep_grid(const SweepPlan& plan);

/// Estimated peak working-set size in bytes for `workers` concurrent cells.
std::size_t sweep_memory_estimate(const Grid& grid, std::size_t workers);

/// Runs every cell. Cells are statically partitioned into contiguous
/// blocks, one per worker, and results are stored by index, so the output
/// does not depend on the worker count. Per-cell failures are recorded;
/// throws NumericalError if more than 10% of cells fail.
SweepResult run_sweep(const SweepPlan& plan);

/// Comment header, then axis1,axis2,peak_strength,peak_time,reversed_fraction.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result,
                     std::span<const std::string> header_lines = {});
void write_overlay_csv(const std::filesystem::path& path, const OverlayCurve& overlay,
                       std::span<const std::string> header_lines = {});

}  // namespace qtm
