#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qtm/error.hpp"

namespace qtm {

using cplx = std::complex<double>;
using ComplexField = std::vector<cplx>;
using RealField = std::vector<double>;

/// |z|^2 as re*re + im*im (std::norm may go through hypot).
inline double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

/// Half-open interval [lo, hi) of one axis.
struct Extent {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool operator==(const Extent&) const = default;
};

/// Uniform periodic lattice in one or two dimensions.
///
/// Two-dimensional grids are square: both axes share the same extent and the
/// same number of points. Fields on a 2D grid are stored row-major with the x
/// axis outermost, i.e. value(ix, iy) lives at index ix * n + iy.
class Grid {
 public:
  Grid(int dim, Extent extent, std::size_t points);

  int dim() const { return dim_; }
  const Extent& extent() const { return extent_; }
  std::size_t points() const { return n_; }
  double dx() const { return dx_; }

  /// Total number of lattice sites (n or n*n).
  std::size_t size() const { return dim_ == 1 ? n_ : n_ * n_; }

  /// Volume element dx^dim.
  double cell_volume() const { return dim_ == 1 ? dx_ : dx_ * dx_; }

  double nyquist() const;

  /// Axis coordinates x_i = lo + i*dx (shared by both axes in 2D).
  std::span<const double> coords() const { return coords_; }

  /// Angular wavenumbers in standard DFT order: 2*pi*fftfreq(n, dx).
  std::span<const double> wavenumbers() const { return wavenumbers_; }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ && extent_ == other.extent_;
  }

 private:
  int dim_;
  Extent extent_;
  std::size_t n_;
  double dx_;
  std::vector<double> coords_;
  std::vector<double> wavenumbers_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validated grid construction. Throws InvalidArgument on a bad dimension,
/// non-power-of-two (or < 16) point count, or an empty/non-finite extent.
GridPtr make_grid(int dim, Extent extent, std::size_t points);

bool is_power_of_two(std::size_t n);

/// Smallest power of two >= n.
std::size_t next_power_of_two(std::size_t n);

/// Per-site multiplier -|k|^2 in DFT order; ifft(symbol * fft(psi)) = lap(psi).
RealField laplacian_symbol(const Grid& grid);

/// Per-axis first-derivative multipliers i*k_j with the Nyquist mode zeroed.
/// Entry [axis] has grid.size() values in DFT order.
std::vector<ComplexField> gradient_symbols(const Grid& grid);

class SpectralTransform;

/// Spectral gradient of a complex field: one component per axis.
std::vector<ComplexField> gradient(std::span<const cplx> field, const Grid& grid,
                                   SpectralTransform& transform);

/// Spectral gradient of a real field.
std::vector<RealField> gradient(std::span<const double> field, const Grid& grid,
                                SpectralTransform& transform);

}  // namespace qtm
