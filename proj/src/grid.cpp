#include "qtm/grid.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qtm/spectral.hpp"

namespace qtm {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Grid::Grid(int dim, Extent extent, std::size_t points)
    : dim_(dim), extent_(extent), n_(points), dx_(extent.length() / static_cast<double>(points)) {
  coords_.resize(n_);
  wavenumbers_.resize(n_);
  const double dk = 2.0 * std::numbers::pi / extent.length();
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    coords_[i] = extent.lo + static_cast<double>(i) * dx_;
    auto m = static_cast<std::ptrdiff_t>(i);
    if (m >= half) m -= static_cast<std::ptrdiff_t>(n_);
    wavenumbers_[i] = dk * static_cast<double>(m);
  }
}

double Grid::nyquist() const { return std::numbers::pi / dx_; }

GridPtr make_grid(int dim, Extent extent, std::size_t points) {
  if (dim != 1 && dim != 2) throw InvalidArgument(fmt::format("grid dimension must be 1 or 2, got {}", dim));
  if (!std::isfinite(extent.lo) || !std::isfinite(extent.hi))
    throw InvalidArgument("grid extent must be finite");
  if (!(extent.hi > extent.lo))
    throw InvalidArgument(fmt::format("grid extent [{}, {}) is empty or reversed", extent.lo, extent.hi));
  if (!is_power_of_two(points) || points < 16)
    throw InvalidArgument(fmt::format("grid points must be a power of two >= 16, got {}", points));
  return std::make_shared<const Grid>(dim, extent, points);
}

RealField laplacian_symbol(const Grid& grid) {
  const auto k = grid.wavenumbers();
  const std::size_t n = grid.points();
  RealField symbol(grid.size());
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) symbol[i] = -k[i] * k[i];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) symbol[i * n + j] = -(k[i] * k[i] + k[j] * k[j]);
  }
  return symbol;
}

std::vector<ComplexField> gradient_symbols(const Grid& grid) {
  const auto k = grid.wavenumbers();
  const std::size_t n = grid.points();
  // The Nyquist mode has no well-defined sign; zero it so real fields stay real.
  auto ik = [&](std::size_t i) { return i == n / 2 ? cplx{} : cplx{0.0, k[i]}; };

  std::vector<ComplexField> symbols(static_cast<std::size_t>(grid.dim()), ComplexField(grid.size()));
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) symbols[0][i] = ik(i);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        symbols[0][i * n + j] = ik(i);
        symbols[1][i * n + j] = ik(j);
      }
  }
  return symbols;
}

std::vector<ComplexField> gradient(std::span<const cplx> field, const Grid& grid,
                                   SpectralTransform& transform) {
  if (field.size() != grid.size()) throw InvalidArgument("gradient: field size does not match grid");
  ComplexField spectrum(grid.size());
  transform.forward(field, spectrum);

  const auto symbols = gradient_symbols(grid);
  std::vector<ComplexField> result;
  result.reserve(symbols.size());
  for (const auto& symbol : symbols) {
    ComplexField component(grid.size());
    for (std::size_t i = 0; i < component.size(); ++i) component[i] = symbol[i] * spectrum[i];
    transform.inverse(component, component);
    result.push_back(std::move(component));
  }
  return result;
}

std::vector<RealField> gradient(std::span<const double> field, const Grid& grid,
                                SpectralTransform& transform) {
  ComplexField complex_field(field.begin(), field.end());
  auto complex_grad = gradient(std::span<const cplx>(complex_field), grid, transform);
  std::vector<RealField> result;
  result.reserve(complex_grad.size());
  for (const auto& component : complex_grad) {
    RealField real(component.size());
    for (std::size_t i = 0; i < real.size(); ++i) real[i] = component[i].real();
    result.push_back(std::move(real));
  }
  return result;
}

}  // namespace qtm
