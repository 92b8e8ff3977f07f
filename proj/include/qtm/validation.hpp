#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qtm/wavefunction.hpp"

namespace qtm {

/// Free evolution of psi by `duration`.
using FreeEvolver = std::function<WaveFunction(const WaveFunction&, double)>;

/// Exact spectral free evolution (the production path, boundary guard off
/// so that extended states such as plane waves can be checked).
FreeEvolver spectral_free_evolver();

/// Free evolution with the kinetic phase sign flipped; for fault injection.
FreeEvolver corrupted_kinetic_sign_evolver();

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationOptions {
  FreeEvolver free_evolver = spectral_free_evolver();
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  std::string format() const;
};

/// Step sizes and errors of a pulse-integrator refinement study.
struct RefinementStudy {
  std::vector<double> steps;
  std::vector<double> errors;  // L2 distance to the finest reference
  std::vector<double> orders;  // log2 of successive error ratios

  double min_order() const;
};

/// Refines dt_pulse (width/50, /100, /200) against a width/800 reference for
/// a Gaussian pulse on a 1D packet.
RefinementStudy strang_refinement(double sigma, double k, double lambda, double width);

/// L2 distance between Gaussian-pulse and instantaneous-kick states just
/// after the window, for each pulse width.
std::vector<double> pulse_to_kick_distances(double sigma, double k, double lambda, const std::vector<double>& widths);

/// Relative L2 error of current(kick(psi)) - current(psi) against -lambda rho grad rho.
double current_jump_error(const WaveFunction& psi, double lambda);

/// Largest |rho_after - rho_before| and |norm_after - norm_before| under the kick.
struct KickIdentity {
  double max_density_change = 0.0;
  double norm_drift = 0.0;
};
KickIdentity kick_identity(const WaveFunction& psi, double lambda);

/// Deterministic pseudo-random normalized state on the grid.
WaveFunction random_state(const GridPtr& grid, unsigned seed);

/// Oracle and invariant suite.
ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace qtm
