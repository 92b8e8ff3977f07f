#pragma once

#include <functional>

#include "qtm/spectral.hpp"
#include "qtm/wavefunction.hpp"

namespace qtm {

/// Time envelope lambda * f(t - t0) of the nonlinear term.
struct PulseProfile {
  enum class Kind { instantaneous, gaussian };

  Kind kind = Kind::gaussian;
  double lambda = 0.0;
  double t0 = 1.0;
  double width = 0.001;  // Gaussian standard deviation; unused for instantaneous kicks

  static PulseProfile instantaneous(double lambda, double t0 = 1.0) {
    return {Kind::instantaneous, lambda, t0, 0.0};
  }
  static PulseProfile gaussian(double lambda, double width, double t0 = 1.0) {
    return {Kind::gaussian, lambda, t0, width};
  }

  /// Throws InvalidArgument unless lambda >= 0 and, for Gaussian pulses,
  /// 0 < width <= 0.01 t0.
  void validate() const;

  /// Normalized envelope f(zeta) = exp(-zeta^2 / 2 width^2) / (sqrt(2 pi) width).
  double envelope(double zeta) const;

  /// Integral of f from -inf to zeta.
  double cumulative(double zeta) const;

  /// Interval over which the pulse is resolved with fine steps
  /// (t0 +- 5 width; a single instant for kicks).
  double window_start() const;
  double window_end() const;
};

const char* to_string(PulseProfile::Kind kind);

struct EvolutionPlan {
  double t_end = 4.0;
  double dt = 0.004;           // base step, equals the observable sampling interval at stride 1
  double dt_pulse = 2e-5;      // step inside the pulse window
  std::size_t sample_stride = 1;
  double boundary_tolerance = 1e-8;  // max density fraction allowed in the 5-point edge strips

  /// dt = 1e-3 t_end and dt_pulse = width / 50.
  static EvolutionPlan defaults_for(const PulseProfile& pulse, double t_end = 4.0);

  /// Throws InvalidArgument when steps are inconsistent with the pulse or the
  /// pulse window does not lie inside [0, t_end].
  void validate(const PulseProfile& pulse) const;

  double sample_interval() const { return dt * static_cast<double>(sample_stride); }
};

/// Callbacks fired during evolve(). `on_sample` receives the state at every
/// sampling time (and at t_end); `on_pulse_end` receives the state right
/// after the pulse window.
struct EvolutionObserver {
  std::function<void(const WaveFunction&)> on_sample;
  std::function<void(const WaveFunction&)> on_pulse_end;
};

/// Split-step spectral integrator for the kicked free Schroedinger equation.
///
/// Free segments are exact in Fourier space. The pulse window is integrated
/// with symmetric Strang splitting; since the nonlinear sub-step conserves
/// |psi| pointwise, its phase uses the exact integral of the envelope over the
/// sub-step. The first and last sub-steps absorb the envelope tails outside
/// the window, so the total imprinted phase is lambda |psi|^2 exactly.
class Propagator {
 public:
  explicit Propagator(GridPtr grid);

  const Grid& grid() const { return *grid_; }
  SpectralTransform& transform() { return transform_; }

  /// Exact free evolution over `duration`; checks the boundary guard.
  WaveFunction free_segment(const WaveFunction& psi, double duration,
                            double boundary_tolerance = 1e-8);

  /// Evolves from psi.time to plan.t_end.
  WaveFunction evolve(const WaveFunction& psi, const PulseProfile& pulse, const EvolutionPlan& plan,
                      const EvolutionObserver& observer = {});

  /// Fraction of the density within 5 grid points of the domain edge.
  double boundary_fraction(const WaveFunction& psi) const;

 private:
  void check_boundary(const WaveFunction& psi, double tolerance) const;
  void apply_free_phase(ComplexField& spectrum, double duration) const;

  GridPtr grid_;
  SpectralTransform transform_;
  RealField half_k2_;  // |k|^2 / 2
};

}  // namespace qtm
