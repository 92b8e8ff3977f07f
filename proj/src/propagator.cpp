#include "qtm/propagator.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qtm/mirror.hpp"

namespace qtm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::size_t kEdgePoints = 5;
}  // namespace

// --- PulseProfile --------------------------------------------------------------

void PulseProfile::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument(fmt::format("pulse lambda must be finite and >= 0, got {}", lambda));
  if (!std::isfinite(t0)) throw InvalidArgument("pulse t0 must be finite");
  if (kind == Kind::gaussian) {
    if (!(width > 0.0)) throw InvalidArgument("gaussian pulse width must be positive");
    if (width > 0.01 * t0 * (1.0 + 1e-12))
      throw InvalidArgument(fmt::format("gaussian pulse width {} exceeds 0.01 t0 = {}", width, 0.01 * t0));
  }
}

double PulseProfile::envelope(double zeta) const {
  if (kind == Kind::instantaneous) return zeta == 0.0 ? INFINITY : 0.0;
  return std::exp(-zeta * zeta / (2.0 * width * width)) / (std::sqrt(2.0 * kPi) * width);
}

double PulseProfile::cumulative(double zeta) const {
  if (kind == Kind::instantaneous) return zeta >= 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-zeta / (std::sqrt(2.0) * width));
}

double PulseProfile::window_start() const { return kind == Kind::gaussian ? t0 - 5.0 * width : t0; }
double PulseProfile::window_end() const { return kind == Kind::gaussian ? t0 + 5.0 * width : t0; }

const char* to_string(PulseProfile::Kind kind) {
  return kind == PulseProfile::Kind::gaussian ? "gaussian" : "instantaneous";
}

// --- EvolutionPlan -------------------------------------------------------------

EvolutionPlan EvolutionPlan::defaults_for(const PulseProfile& pulse, double t_end) {
  EvolutionPlan plan;
  plan.t_end = t_end;
  plan.dt = 1e-3 * t_end;
  plan.dt_pulse = pulse.kind == PulseProfile::Kind::gaussian ? pulse.width / 50.0 : plan.dt;
  return plan;
}

void EvolutionPlan::validate(const PulseProfile& pulse) const {
  pulse.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (dt > 1e-3 * t_end * (1.0 + 1e-9))
    throw InvalidArgument(fmt::format("dt={} exceeds 1e-3 t_end = {}", dt, 1e-3 * t_end));
  if (sample_stride == 0) throw InvalidArgument("sample_stride must be >= 1");
  if (!(boundary_tolerance > 0.0)) throw InvalidArgument("boundary_tolerance must be positive");
  if (pulse.kind == PulseProfile::Kind::gaussian) {
    if (!(dt_pulse > 0.0)) throw InvalidArgument("dt_pulse must be positive");
    if (dt_pulse > pulse.width / 50.0 * (1.0 + 1e-9))
      throw InvalidArgument(fmt::format("dt_pulse={} exceeds width/50 = {}", dt_pulse, pulse.width / 50.0));
  }
  if (pulse.window_start() < 0.0 || pulse.window_end() > t_end)
    throw InvalidArgument(fmt::format("pulse window [{}, {}] is not inside [0, t_end={}]", pulse.window_start(),
                                      pulse.window_end(), t_end));
}

// --- Propagator ----------------------------------------------------------------

Propagator::Propagator(GridPtr grid) : grid_(std::move(grid)), transform_(*grid_) {
  half_k2_ = laplacian_symbol(*grid_);
  for (auto& v : half_k2_) v *= -0.5;
}

void Propagator::apply_free_phase(ComplexField& spectrum, double duration) const {
  if (duration == 0.0) return;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double phase = -half_k2_[i] * duration;
    spectrum[i] *= cplx{std::cos(phase), std::sin(phase)};
  }
}

double Propagator::boundary_fraction(const WaveFunction& psi) const {
  const auto& g = *grid_;
  const std::size_t n = g.points();
  auto edge = [&](std::size_t i) { return i < kEdgePoints || i >= n - kEdgePoints; };
  double total = 0.0;
  double near = 0.0;
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double rho = abs2(psi.amplitudes[i]);
      total += rho;
      if (edge(i)) near += rho;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double rho = abs2(psi.amplitudes[i * n + j]);
        total += rho;
        if (edge(i) || edge(j)) near += rho;
      }
  }
  return total > 0.0 ? near / total : 0.0;
}

void Propagator::check_boundary(const WaveFunction& psi, double tolerance) const {
  const double fraction = boundary_fraction(psi);
  if (fraction > tolerance) throw BoundaryContamination(psi.time, fraction);
}

WaveFunction Propagator::free_segment(const WaveFunction& psi, double duration, double boundary_tolerance) {
  if (!psi.grid || !(*psi.grid == *grid_)) throw InvalidArgument("free_segment: grid mismatch");
  WaveFunction out(psi.grid, ComplexField(psi.size()), psi.time + duration);
  if (duration == 0.0) {
    out.amplitudes = psi.amplitudes;
    return out;
  }
  transform_.forward(psi.amplitudes, out.amplitudes);
  apply_free_phase(out.amplitudes, duration);
  transform_.inverse(out.amplitudes, out.amplitudes);
  check_boundary(out, boundary_tolerance);
  return out;
}

WaveFunction Propagator::evolve(const WaveFunction& psi, const PulseProfile& pulse, const EvolutionPlan& plan,
                                const EvolutionObserver& observer) {
  if (!psi.grid || !(*psi.grid == *grid_)) throw InvalidArgument("evolve: grid mismatch");
  plan.validate(pulse);
  const double t_start = psi.time;
  const bool has_pulse = pulse.lambda > 0.0;
  if (has_pulse && t_start > pulse.window_start())
    throw InvalidArgument(fmt::format("evolve: start time {} is after the pulse window start {}", t_start,
                                      pulse.window_start()));
  if (t_start > plan.t_end) throw InvalidArgument("evolve: start time is after t_end");

  const double h = plan.sample_interval();
  const double eps = 1e-9 * h;
  std::size_t next_sample = 0;
  auto sample_time = [&](std::size_t i) { return t_start + static_cast<double>(i) * h; };

  // Spectrum of the state at time spectrum_time.
  ComplexField spectrum(psi.size());
  transform_.forward(psi.amplitudes, spectrum);
  double spectrum_time = t_start;
  ComplexField scratch(psi.size());

  auto state_at = [&](double t) {
    scratch = spectrum;
    apply_free_phase(scratch, t - spectrum_time);
    WaveFunction out(grid_, ComplexField(psi.size()), t);
    transform_.inverse(scratch, out.amplitudes);
    return out;
  };
  auto emit = [&](const WaveFunction& state) {
    check_boundary(state, plan.boundary_tolerance);
    if (observer.on_sample) observer.on_sample(state);
  };
  // Emits every pending sample up to `limit` from the free spectrum.
  auto emit_free_until = [&](double limit) {
    while (sample_time(next_sample) <= limit + eps) {
      emit(state_at(sample_time(next_sample)));
      ++next_sample;
    }
  };
  auto advance_spectrum = [&](double t) {
    apply_free_phase(spectrum, t - spectrum_time);
    spectrum_time = t;
  };

  if (has_pulse) {
    const double w0 = pulse.window_start();
    const double w1 = pulse.window_end();
    // A sample exactly at an instantaneous kick is reported pre-kick.
    if (pulse.kind == PulseProfile::Kind::instantaneous)
      emit_free_until(w0);
    else
      emit_free_until(w0 - 2.0 * eps);
    advance_spectrum(w0);

    WaveFunction current_state(grid_, ComplexField(psi.size()), w0);
    if (pulse.kind == PulseProfile::Kind::instantaneous) {
      transform_.inverse(spectrum, current_state.amplitudes);
      apply_kick_inplace(current_state, pulse.lambda);
      transform_.forward(current_state.amplitudes, spectrum);
    } else {
      const auto steps = static_cast<std::size_t>(std::ceil((w1 - w0) / plan.dt_pulse - 1e-9));
      const double hp = (w1 - w0) / static_cast<double>(steps);
      ComplexField half_kinetic(psi.size());
      for (std::size_t i = 0; i < half_kinetic.size(); ++i) {
        const double phase = -half_k2_[i] * 0.5 * hp;
        half_kinetic[i] = {std::cos(phase), std::sin(phase)};
      }
      RealField phase(psi.size());
      for (std::size_t s = 0; s < steps; ++s) {
        const double ta = w0 + static_cast<double>(s) * hp;
        const double tb = s + 1 == steps ? w1 : w0 + static_cast<double>(s + 1) * hp;
        const double fa = s == 0 ? 0.0 : pulse.cumulative(ta - pulse.t0);
        const double fb = s + 1 == steps ? 1.0 : pulse.cumulative(tb - pulse.t0);
        const double weight = pulse.lambda * (fb - fa);

        for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= half_kinetic[i];
        transform_.inverse(spectrum, current_state.amplitudes);
        for (std::size_t i = 0; i < phase.size(); ++i) phase[i] = weight * abs2(current_state.amplitudes[i]);
        imprint_phase(current_state.amplitudes, phase);
        transform_.forward(current_state.amplitudes, spectrum);
        for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= half_kinetic[i];
        spectrum_time = tb;

        // Samples falling inside the window are reported at the step end.
        if (sample_time(next_sample) <= tb + eps) {
          WaveFunction at_step = state_at(tb);
          while (sample_time(next_sample) <= tb + eps) ++next_sample;
          emit(at_step);
        }
      }
    }
    WaveFunction after = state_at(w1);
    check_boundary(after, plan.boundary_tolerance);
    if (observer.on_pulse_end) observer.on_pulse_end(after);
  }

  emit_free_until(plan.t_end);
  WaveFunction final_state = state_at(plan.t_end);
  // The last sample may fall short of t_end when t_end is not a multiple of the interval.
  if (sample_time(next_sample - 1) < plan.t_end - eps)
    emit(final_state);
  else
    check_boundary(final_state, plan.boundary_tolerance);
  return final_state;
}

}  // namespace qtm
