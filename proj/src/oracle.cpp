#include "qtm/oracle.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace qtm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

void require_same_grid(const WaveFunction& a, const WaveFunction& b) {
  if (!a.grid || !b.grid || !(*a.grid == *b.grid)) throw InvalidArgument("wave functions live on different grids");
}
}  // namespace

namespace oracle {

WaveFunction gaussian_free_1d(const PacketSpec1D& spec, double t, const GridPtr& grid) {
  if (!grid || grid->dim() != 1) throw InvalidArgument("gaussian_free_1d needs a 1D grid");
  if (!(spec.sigma > 0.0)) throw InvalidArgument("gaussian_free_1d: sigma must be positive");
  const double s2 = spec.sigma * spec.sigma;
  const cplx spread = 1.0 + kI * t / s2;
  const cplx prefactor = std::pow(kPi * s2, -0.25) / std::sqrt(spread);
  const auto x = grid->coords();
  ComplexField amps(grid->size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double u = x[i] - spec.x0;
    const cplx exponent = (-u * u / (2.0 * s2) + kI * spec.k * u - kI * spec.k * spec.k * t / 2.0) / spread;
    amps[i] = prefactor * std::exp(exponent);
  }
  return WaveFunction(grid, std::move(amps), t);
}

RingAsymptoticRegime ring_regime(const PacketSpecRing& spec, double t) {
  return {t / (spec.sigma * spec.sigma), spec.k * spec.R, spec.sigma / spec.R};
}

WaveFunction ring_free_2d(const PacketSpecRing& spec, double t, const GridPtr& grid) {
  if (!grid || grid->dim() != 2) throw InvalidArgument("ring_free_2d needs a 2D grid");
  if (!(spec.R > 0.0) || !(spec.sigma > 0.0) || !(spec.k > 0.0))
    throw InvalidArgument("ring_free_2d: R, sigma and k must be positive");
  const auto regime = ring_regime(spec, t);
  if (!regime.valid())
    warn(fmt::format("ring_free_2d: outside the asymptotic regime (eps={:.3g}, sigma/R={:.3g}, kR={:.3g})",
                     regime.epsilon, regime.sigma_over_R, regime.k_times_R));

  const double r_t = spec.R + spec.k * t;
  const double prefactor = std::sqrt(1.0 / (2.0 * std::pow(kPi, 1.5) * spec.sigma * r_t));
  const double global_phase = -spec.k * spec.k * t / 2.0;
  const std::size_t n = grid->points();
  const auto x = grid->coords();
  ComplexField amps(grid->size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = std::hypot(x[i], x[j]);
      const double u = r - r_t;
      amps[i * n + j] =
          prefactor * std::exp(cplx{-u * u / (2.0 * spec.sigma * spec.sigma), spec.k * r + global_phase});
    }
  return WaveFunction(grid, std::move(amps), t);
}

WaveFunction plane_wave_free(std::span<const double> q, double t, const GridPtr& grid) {
  if (!grid) throw InvalidArgument("plane_wave_free: null grid");
  if (q.size() != static_cast<std::size_t>(grid->dim()))
    throw InvalidArgument("plane_wave_free: q needs one component per axis");
  const double dk = 2.0 * kPi / grid->extent().length();
  double q2 = 0.0;
  for (double qa : q) {
    const double m = qa / dk;
    if (std::abs(m - std::round(m)) > 1e-9 || std::abs(qa) > grid->nyquist())
      throw InvalidArgument(fmt::format("plane_wave_free: q={} is not on the wavenumber lattice", qa));
    q2 += qa * qa;
  }
  const auto x = grid->coords();
  const std::size_t n = grid->points();
  ComplexField amps(grid->size());
  if (grid->dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) amps[i] = std::exp(kI * (q[0] * x[i] - q2 * t / 2.0));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        amps[i * n + j] = std::exp(kI * (q[0] * x[i] + q[1] * x[j] - q2 * t / 2.0));
  }
  return WaveFunction(grid, std::move(amps), t);
}

}  // namespace oracle

cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a, b);
  cplx sum{};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return sum * a.grid->cell_volume();
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += abs2(a.amplitudes[i] - b.amplitudes[i]);
  return std::sqrt(sum * a.grid->cell_volume());
}

double l2_distance_phase_aligned(const WaveFunction& a, const WaveFunction& b) {
  const cplx overlap = inner_product(b, a);
  const cplx rotation = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += abs2(a.amplitudes[i] - rotation * b.amplitudes[i]);
  return std::sqrt(sum * a.grid->cell_volume());
}

}  // namespace qtm
