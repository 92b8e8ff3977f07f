#pragma once

#include <span>

#include "qtm/wavefunction.hpp"

namespace qtm {

/// Closed-form free-evolution references.
namespace oracle {

/// Exact free evolution of the 1D Gaussian packet, including its global
/// phase (the t = 0 value coincides with gaussian_1d up to lattice
/// renormalization).
WaveFunction gaussian_free_1d(const PacketSpec1D& spec, double t, const GridPtr& grid);

/// Validity parameters of the asymptotic ring solution.
struct RingAsymptoticRegime {
  double epsilon;       // t / sigma^2
  double k_times_R;     // kR
  double sigma_over_R;  // sigma / R

  /// epsilon < 0.1, sigma/R < 1/3 and kR > 10.
  bool valid() const { return epsilon < 0.1 && sigma_over_R < 1.0 / 3.0 && k_times_R > 10.0; }
};

RingAsymptoticRegime ring_regime(const PacketSpecRing& spec, double t);

/// Asymptotic freely evolved Gaussian ring,
///   sqrt(1/(2 pi^{3/2} sigma r_t)) exp(-(r - r_t)^2/2sigma^2 + ikr - ik^2 t/2),
/// with r_t = R + kt, in the same gauge as gaussian_ring_2d. Warns outside
/// the validity regime. Not renormalized.
WaveFunction ring_free_2d(const PacketSpecRing& spec, double t, const GridPtr& grid);

/// exp(i q.x - i|q|^2 t/2) with unit modulus. `q` has one entry per axis and
/// must lie on the wavenumber lattice.
WaveFunction plane_wave_free(std::span<const double> q, double t, const GridPtr& grid);

}  // namespace oracle

/// ||a - b|| in the lattice L2 norm.
double l2_distance(const WaveFunction& a, const WaveFunction& b);

/// min over theta of ||a - e^{i theta} b||: the L2 distance with the global
/// phase aligned.
double l2_distance_phase_aligned(const WaveFunction& a, const WaveFunction& b);

/// <a|b> on the lattice.
cplx inner_product(const WaveFunction& a, const WaveFunction& b);

}  // namespace qtm
