#include <charconv>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "qtm/config.hpp"
#include "qtm/error.hpp"
#include "qtm/mirror.hpp"
#include "qtm/propagator.hpp"
#include "qtm/simulation.hpp"
#include "qtm/sweep.hpp"
#include "qtm/units.hpp"
#include "qtm/validation.hpp"

namespace fs = std::filesystem;
using namespace qtm;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kBoundary = 2, kInternal = 3 };

struct Common {
  std::string config;
  std::string out;
  bool quiet = false;
};

fs::path output_dir(const Common& common, const std::string& configured) {
  fs::path dir;
  if (!common.out.empty())
    dir = common.out;
  else if (!configured.empty())
    dir = configured;
  else if (const char* env = std::getenv("QTM_OUT"); env && *env)
    dir = env;
  else
    dir = "qtm_out";
  fs::create_directories(dir);
  return dir;
}

std::string time_tag(double t) { return fmt::format("{:.6f}", t); }

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  if (text.find_first_not_of(" \t") == std::string::npos) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string item = text.substr(pos, comma - pos);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v))
      throw ConfigError(fmt::format("--lambdas: '{}' is not a number", item));
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

void say(const Common& common, const std::string& line) {
  if (!common.quiet) std::cout << line << '\n';
}

int cmd_run(const Common& common) {
  const RunConfig config = load_run_config(common.config);
  if (common.quiet) set_warning_handler([](std::string_view) {});
  const std::string text = dump(config);
  const std::string hash = config_hash(text);
  const auto header = artifact_header(text);
  const fs::path dir = output_dir(common, config.output_dir);
  const Scenario& s = config.scenario;

  const RunResult run = run_scenario(s);
  const fs::path echo_path = dir / fmt::format("{}_{}_echo.csv", config.name, hash);
  auto echo_header = header;
  echo_header.push_back(fmt::format("grid={}", run.grid.formula));
  write_echo_csv(echo_path, run.record.samples, echo_header);

  Propagator propagator(run.grid.grid);
  const auto& det = run.record.detection;
  std::vector<std::string> written{echo_path.string()};
  for (const auto& request : config.snapshots) {
    const double t = request.at_peak ? det.peak_time : request.time;
    const WaveFunction& from = t <= s.pulse.window_start() ? run.initial : run.post_pulse;
    const WaveFunction psi = propagator.free_segment(from, t - from.time, s.plan.boundary_tolerance);
    const std::string stem =
        fmt::format("{}_{}_snap_{}t{}", config.name, hash, request.at_peak ? "peak_" : "", time_tag(t));
    write_snapshot(dir / (stem + ".qtmw"), psi);
    write_snapshot_csv(dir / (stem + ".csv"), psi, echo_header);
    written.push_back((dir / (stem + ".qtmw")).string());
    written.push_back((dir / (stem + ".csv")).string());
  }

  const auto& pred = run.record.prediction;
  const std::string predicted =
      pred.t_echo ? fmt::format("{:.4f}", *pred.t_echo) : std::string("none (lambda <= lambda_min)");
  std::cout << fmt::format(
      "{}: {} peak N={:.4f} at t={:.4f} (baseline {:.4f}); predicted lambda_min={:.4g} t_echo={}; "
      "reversed_fraction={:.4g}\n",
      config.name, det.echo ? "echo" : "no echo", det.peak_strength, det.peak_time, run.baseline_at_peak,
      pred.lambda_min, predicted, run.reversed_fraction);
  for (const auto& p : det.secondary)
    say(common, fmt::format("  secondary peak N={:.4f} at t={:.4f}", p.strength, p.time));
  say(common, fmt::format("  grid: {}", run.grid.formula));
  for (const auto& f : written) say(common, fmt::format("  wrote {}", f));
  return kOk;
}

int cmd_sweep(const Common& common, std::size_t workers) {
  SweepConfig config = load_sweep_config(common.config);
  if (workers > 0) config.workers = workers;
  set_warning_handler([](std::string_view) {});
  const std::string text = dump(config);
  const std::string hash = config_hash(text);
  const fs::path dir = output_dir(common, config.run.output_dir);

  const SweepResult result = run_sweep(config.plan());
  const auto header = artifact_header(text);
  const fs::path sweep_path = dir / fmt::format("{}_{}_sweep.csv", config.run.name, hash);
  const fs::path overlay_path = dir / fmt::format("{}_{}_overlay.csv", config.run.name, hash);
  write_sweep_csv(sweep_path, result, header);
  write_overlay_csv(overlay_path, result.overlay, header);

  std::cout << fmt::format("{}: {} cells ({} failed) on {}\n", config.run.name, result.cells.size(), result.failures,
                           result.grid.formula);
  say(common, fmt::format("  wrote {}", sweep_path.string()));
  say(common, fmt::format("  wrote {}", overlay_path.string()));
  return kOk;
}

int cmd_phases(const Common& common, double sigma, double k, const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw ConfigError("phases: the lambda list is empty");
  if (!(sigma > 0.0)) throw ConfigError("phases: sigma must be positive");
  std::vector<PhaseComparison> curves;
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0)) throw ConfigError("phases: lambda must be non-negative");
    curves.push_back(phase_comparison(sigma, k, lambda));
  }
  const std::string text = fmt::format("[phases]\nsigma = {}\nk = {}\nlambdas = {}\n", sigma, k,
                                       fmt::join(lambdas, ", "));
  const fs::path dir = output_dir(common, "");
  const fs::path path = dir / fmt::format("phases_{}.csv", config_hash(text));
  write_phase_csv(path, curves, artifact_header(text));
  for (const auto& c : curves) {
    const auto center = std::min_element(c.samples.begin(), c.samples.end(),
                                         [](const auto& a, const auto& b) { return std::abs(a.xi) < std::abs(b.xi); });
    std::cout << fmt::format("lambda={:g}: phi_qtm({:g})={:.6f} shift={:.6f}\n", c.lambda, center->xi, center->phi_qtm,
                             c.shift);
  }
  say(common, fmt::format("  wrote {}", path.string()));
  return kOk;
}

int cmd_validate(const std::string& fault) {
  ValidationOptions options;
  if (fault == "kinetic-sign")
    options.free_evolver = corrupted_kinetic_sign_evolver();
  else if (!fault.empty())
    throw ConfigError(fmt::format("unknown fault '{}' (expected kinetic-sign)", fault));
  set_warning_handler([](std::string_view) {});
  const auto report = run_validation(options);
  std::cout << report.format();
  return report.passed() ? kOk : kInternal;
}

int cmd_units(const Common& common, const std::vector<double>& lambdas) {
  LabConfig config = load_lab_config(common.config);
  if (!lambdas.empty()) config.lambdas = lambdas;
  std::cout << units::conversion_table(config.context, config.lambdas);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear quantum time mirror simulator"};
  app.set_version_flag("--version", code_version());
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", common.config, "configuration file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (default: [output] dir, $QTM_OUT, ./qtm_out)");
    sub->add_flag("--quiet", common.quiet, "print only the summary line");
  };

  auto* run = app.add_subcommand("run", "single kicked-packet run");
  add_common(run, true);

  std::size_t workers = 0;
  auto* sweep = app.add_subcommand("sweep", "two-parameter sweep of the echo peak");
  add_common(sweep, true);
  sweep->add_option("--workers", workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);

  double sigma = 1.0;
  double k = 4.0;
  std::string lambdas;
  auto* phases = app.add_subcommand("phases", "kick phase vs ideal time-reversal phase");
  add_common(phases, false);
  phases->add_option("--sigma", sigma, "initial width")->default_val(1.0);
  phases->add_option("--k", k, "initial momentum")->default_val(4.0);
  phases->add_option("--lambdas", lambdas, "comma-separated kick strengths")->required();

  std::string fault;
  auto* validate = app.add_subcommand("validate", "oracle and invariant suite");
  validate->add_option("--inject-fault", fault, "deliberately break a component (kinetic-sign)");

  std::string unit_lambdas;
  auto* units_cmd = app.add_subcommand("units", "laboratory unit conversion table");
  add_common(units_cmd, true);
  units_cmd->add_option("--lambdas", unit_lambdas, "comma-separated kick strengths for the scattering-length column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(common);
    if (*sweep) return cmd_sweep(common, workers);
    if (*phases) return cmd_phases(common, sigma, k, parse_lambda_list(lambdas));
    if (*validate) return cmd_validate(fault);
    if (*units_cmd) return cmd_units(common, parse_lambda_list(unit_lambdas));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const BoundaryContamination& e) {
    std::cerr << "boundary guard: " << e.what() << '\n';
    return kBoundary;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
