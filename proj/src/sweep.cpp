#include "qtm/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <unistd.h>

#include <fmt/format.h>

namespace qtm {

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::lambda:
      return "lambda";
    case SweepParam::sigma:
      return "sigma";
    case SweepParam::k:
      return "k";
    case SweepParam::R:
      return "R";
  }
  return "?";
}

SweepParam parse_sweep_param(std::string_view text) {
  if (text == "lambda") return SweepParam::lambda;
  if (text == "sigma") return SweepParam::sigma;
  if (text == "k") return SweepParam::k;
  if (text == "R") return SweepParam::R;
  throw InvalidArgument(fmt::format("unknown sweep parameter '{}' (expected lambda, sigma, k or R)", text));
}

double SweepAxis::value(std::size_t i) const {
  if (count < 2) return min;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

namespace {

void set_param(Scenario& s, SweepParam p, double value) {
  switch (p) {
    case SweepParam::lambda:
      s.pulse.lambda = value;
      break;
    case SweepParam::sigma:
      s.packet.sigma = value;
      s.ring.sigma = value;
      break;
    case SweepParam::k:
      s.packet.k = value;
      s.ring.k = value;
      break;
    case SweepParam::R:
      s.ring.R = value;
      break;
  }
}

double get_param(const Scenario& s, SweepParam p) {
  switch (p) {
    case SweepParam::lambda:
      return s.pulse.lambda;
    case SweepParam::sigma:
      return s.sigma();
    case SweepParam::k:
      return s.k();
    case SweepParam::R:
      return s.ring.R;
  }
  return 0.0;
}

}  // namespace

void SweepPlan::validate() const {
  for (const auto* axis : {&axis1, &axis2}) {
    if (axis->count < 2) throw InvalidArgument(fmt::format("sweep axis {} needs count >= 2", to_string(axis->param)));
    if (!std::isfinite(axis->min) || !std::isfinite(axis->max) || axis->max < axis->min)
      throw InvalidArgument(fmt::format("sweep axis {} has an invalid range", to_string(axis->param)));
    if (axis->param == SweepParam::R && base.geometry != Geometry::ring)
      throw InvalidArgument("sweep axis R requires the 2d-ring geometry");
    if (axis->param == SweepParam::lambda ? axis->min < 0.0 : !(axis->min > 0.0))
      throw InvalidArgument(fmt::format("sweep axis {} has a non-physical minimum", to_string(axis->param)));
  }
  if (axis1.param == axis2.param) throw InvalidArgument("sweep axes must be distinct");
  if (workers == 0) throw InvalidArgument("sweep needs at least one worker");
  if (!(echo_threshold > 0.0)) throw InvalidArgument("echo threshold must be positive");
  base.plan.validate(base.pulse);
}

Scenario SweepPlan::cell_scenario(std::size_t i, std::size_t j) const {
  Scenario s = base;
  set_param(s, axis1.param, axis1.value(i));
  set_param(s, axis2.param, axis2.value(j));
  return s;
}

OverlayCurve analytic_overlay(const SweepPlan& plan) {
  constexpr std::size_t kSamples = 101;
  OverlayCurve curve;
  auto lambda_min_at = [&](SweepParam pa, double a, SweepParam pb, double b) {
    Scenario s = plan.base;
    set_param(s, pa, a);
    set_param(s, pb, b);
    return s.lambda_min(false);
  };

  const bool lambda_first = plan.axis1.param == SweepParam::lambda;
  const bool lambda_second = plan.axis2.param == SweepParam::lambda;
  if (lambda_first || lambda_second) {
    const SweepAxis& other = lambda_first ? plan.axis2 : plan.axis1;
    curve.x_name = to_string(other.param);
    curve.y_name = "lambda_min";
    for (std::size_t i = 0; i < kSamples; ++i) {
      const double x = other.min + (other.max - other.min) * static_cast<double>(i) / (kSamples - 1);
      Scenario s = plan.base;
      set_param(s, other.param, x);
      curve.points.emplace_back(x, s.lambda_min(false));
    }
    return curve;
  }

  // lambda fixed: trace lambda_min(a, b) = lambda, scanning b for sign changes.
  const double lambda = plan.base.pulse.lambda;
  if (!(lambda > 0.0)) throw InvalidArgument("analytic overlay: lambda is not swept and the fixed lambda is zero");
  curve.x_name = to_string(plan.axis1.param);
  curve.y_name = to_string(plan.axis2.param);
  constexpr std::size_t kScan = 2001;
  const auto& a_axis = plan.axis1;
  const auto& b_axis = plan.axis2;
  for (std::size_t i = 0; i < kSamples; ++i) {
    const double a = a_axis.min + (a_axis.max - a_axis.min) * static_cast<double>(i) / (kSamples - 1);
    auto f = [&](double b) { return lambda_min_at(a_axis.param, a, b_axis.param, b) - lambda; };
    double b_prev = b_axis.min;
    double f_prev = f(b_prev);
    for (std::size_t s = 1; s < kScan; ++s) {
      const double b = b_axis.min + (b_axis.max - b_axis.min) * static_cast<double>(s) / (kScan - 1);
      const double fb = f(b);
      if ((f_prev < 0.0) != (fb < 0.0)) {
        double lo = b_prev;
        double hi = b;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((f(mid) < 0.0) == (f_prev < 0.0) ? lo : hi) = mid;
        }
        curve.points.emplace_back(a, 0.5 * (lo + hi));
      }
      b_prev = b;
      f_prev = fb;
    }
  }
  return curve;
}

GridDesign sweep_grid(const SweepPlan& plan) {
  if (!plan.base.grid.automatic) return resolve_grid(plan.base);
  GridDemand demand = GridDemand::of(plan.cell_scenario(0, 0));
  for (std::size_t i = 0; i < plan.axis1.count; ++i)
    for (std::size_t j = 0; j < plan.axis2.count; ++j) demand.merge(GridDemand::of(plan.cell_scenario(i, j)));
  return design_grid(demand);
}

std::size_t sweep_memory_estimate(const Grid& grid, std::size_t workers) {
  // Propagator buffers, state copies and observable fields: about 16 complex
  // fields per concurrent cell.
  return workers * grid.size() * sizeof(cplx) * 16;
}

namespace {
std::size_t physical_memory_bytes() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page_size = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page_size <= 0) return 0;
  return static_cast<std::size_t>(pages) * static_cast<std::size_t>(page_size);
}
}  // namespace

SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  SweepResult result;
  result.plan = plan;
  result.grid = sweep_grid(plan);
  result.overlay = analytic_overlay(plan);

  const std::size_t total = plan.axis1.count * plan.axis2.count;
  const std::size_t workers = std::min(plan.workers, total);
  const std::size_t needed = sweep_memory_estimate(*result.grid.grid, workers);
  const std::size_t available = physical_memory_bytes();
  if (available > 0 && needed > available / 2)
    throw InvalidArgument(fmt::format("sweep needs ~{} MiB for {} workers on a {}-point grid, more than half of "
                                      "physical memory; reduce workers or grid size",
                                      needed >> 20, workers, result.grid.grid->size()));

  result.cells.resize(total);
  auto run_block = [&](std::size_t begin, std::size_t end) {
    RunOptions options;
    options.warn_outside_regime = false;
    options.grid = result.grid.grid;
    for (std::size_t c = begin; c < end; ++c) {
      SweepCell& cell = result.cells[c];
      cell.i = c / plan.axis2.count;
      cell.j = c % plan.axis2.count;
      const Scenario s = plan.cell_scenario(cell.i, cell.j);
      cell.value1 = get_param(s, plan.axis1.param);
      cell.value2 = get_param(s, plan.axis2.param);
      try {
        const RunResult run = run_scenario(s, options);
        cell.peak_strength = run.record.detection.peak_strength;
        cell.peak_time = run.record.detection.peak_time;
        cell.reversed_fraction = run.reversed_fraction;
        cell.baseline = run.baseline_at_peak;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.failure = e.what();
      }
    }
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * total / workers;
      const std::size_t end = (w + 1) * total / workers;
      threads.emplace_back(run_block, begin, end);
    }
  }

  result.failures = static_cast<std::size_t>(
      std::count_if(result.cells.begin(), result.cells.end(), [](const SweepCell& c) { return !c.ok; }));
  if (10 * result.failures > total) {
    const auto first = std::find_if(result.cells.begin(), result.cells.end(), [](const auto& c) { return !c.ok; });
    throw NumericalError(fmt::format("sweep failed: {} of {} cells failed (first: {})", result.failures, total,
                                     first->failure));
  }
  return result;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result,
                     std::span<const std::string> header_lines) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << "# grid=" << result.grid.formula << '\n';
  for (const auto& cell : result.cells)
    if (!cell.ok) out << fmt::format("# failed_cell={},{}: {}\n", cell.i, cell.j, cell.failure);
  out << fmt::format("# axis1={} axis2={}\n", to_string(result.plan.axis1.param),
                     to_string(result.plan.axis2.param));
  out << "axis1,axis2,peak_strength,peak_time,reversed_fraction\n";
  for (const auto& cell : result.cells) {
    if (cell.ok)
      out << fmt::format("{:.10g},{:.10g},{:.17g},{:.17g},{:.17g}\n", cell.value1, cell.value2, cell.peak_strength,
                         cell.peak_time, cell.reversed_fraction);
    else
      out << fmt::format("{:.10g},{:.10g},nan,nan,nan\n", cell.value1, cell.value2);
  }
}

void write_overlay_csv(const std::filesystem::path& path, const OverlayCurve& overlay,
                       std::span<const std::string> header_lines) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << overlay.x_name << ',' << overlay.y_name << '\n';
  for (const auto& [x, y] : overlay.points) out << fmt::format("{:.10g},{:.17g}\n", x, y);
}

}  // namespace qtm
