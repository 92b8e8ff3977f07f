#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qtm/grid.hpp"

namespace qtm {

class SpectralTransform;

/// Complex amplitude field on a grid, in the rescaled units where the
/// equation of motion reads i dpsi/dt = -lap(psi)/2 + lambda f(t-1)|psi|^2 psi.
struct WaveFunction {
  GridPtr grid;
  ComplexField amplitudes;
  double time = 0.0;

  WaveFunction() = default;
  WaveFunction(GridPtr g, ComplexField amps, double t = 0.0)
      : grid(std::move(g)), amplitudes(std::move(amps)), time(t) {}

  std::size_t size() const { return amplitudes.size(); }
};

/// 1D Gaussian packet: width sigma, mean momentum k, centered at x0.
struct PacketSpec1D {
  double sigma = 1.0;
  double k = 0.0;
  double x0 = 0.0;
};

/// 2D Gaussian ring of radius R and radial width sigma centered at the
/// origin, moving radially outward with momentum k.
struct PacketSpecRing {
  double R = 6.0;
  double sigma = 2.0;
  double k = 4.0;
};

/// (pi sigma^2)^{-1/4} exp(-(x-x0)^2/2sigma^2 + ik(x-x0)), renormalized on
/// the grid. Throws InvalidArgument if x0 +- 6 sigma leaves the domain.
WaveFunction gaussian_1d(const PacketSpec1D& spec, const GridPtr& grid);

/// sqrt(1/(2 pi^{3/2} R sigma)) exp(-(r-R)^2/2sigma^2 + ikr), renormalized on
/// the grid. Warns when R < 3 sigma; throws if R + 6 sigma leaves the domain.
WaveFunction gaussian_ring_2d(const PacketSpecRing& spec, const GridPtr& grid);

/// Lattice norm of the unnormalized ring profile (exactly 1 only for R >> sigma).
double ring_prefactor_norm(const PacketSpecRing& spec, const Grid& grid);

RealField density(const WaveFunction& psi);

/// Probability current Im(psi* grad psi), one real component per axis.
std::vector<RealField> current(const WaveFunction& psi, SpectralTransform& transform);
std::vector<RealField> current(const WaveFunction& psi);

/// sqrt(sum |psi|^2 dx^D).
double norm(const WaveFunction& psi);

/// Rescales in place to unit norm. Throws on a zero field.
void normalize(WaveFunction& psi);

/// <-i grad>, one value per axis.
std::vector<double> mean_momentum(const WaveFunction& psi, SpectralTransform& transform);

/// Lattice site of maximal density, returned as coordinates (one per axis).
std::vector<double> peak_density_position(const WaveFunction& psi);

/// Throws InvalidArgument if any amplitude is NaN or infinite.
void require_finite(const WaveFunction& psi);

/// Binary snapshot: "QTMW", u32 dim, u32 n per axis, f64 (lo, hi) per axis,
/// f64 time, then interleaved (re, im) f64 in storage order. Little-endian.
void write_snapshot(const std::filesystem::path& path, const WaveFunction& psi);
WaveFunction read_snapshot(const std::filesystem::path& path);

/// CSV snapshot: optional '#' header lines, then x[,y],re,im,rho rows.
void write_snapshot_csv(const std::filesystem::path& path, const WaveFunction& psi,
                        std::span<const std::string> header_lines = {});

}  // namespace qtm
