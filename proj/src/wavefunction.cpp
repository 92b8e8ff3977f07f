#include "qtm/wavefunction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "qtm/spectral.hpp"

namespace qtm {

namespace {

constexpr double kPi = std::numbers::pi;

void require_grid(const WaveFunction& psi) {
  if (!psi.grid) throw InvalidArgument("wave function has no grid");
  if (psi.amplitudes.size() != psi.grid->size())
    throw InvalidArgument("wave function size does not match its grid");
}

}  // namespace

WaveFunction gaussian_1d(const PacketSpec1D& spec, const GridPtr& grid) {
  if (!grid || grid->dim() != 1) throw InvalidArgument("gaussian_1d needs a 1D grid");
  if (!(spec.sigma > 0.0)) throw InvalidArgument("gaussian_1d: sigma must be positive");
  const auto& ext = grid->extent();
  if (spec.x0 - 6.0 * spec.sigma < ext.lo || spec.x0 + 6.0 * spec.sigma > ext.hi)
    throw InvalidArgument(fmt::format("gaussian_1d: packet x0={} sigma={} does not fit in [{}, {})",
                                      spec.x0, spec.sigma, ext.lo, ext.hi));

  const double prefactor = std::pow(kPi * spec.sigma * spec.sigma, -0.25);
  ComplexField amps(grid->size());
  const auto x = grid->coords();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double u = x[i] - spec.x0;
    amps[i] = prefactor * std::exp(cplx{-u * u / (2.0 * spec.sigma * spec.sigma), spec.k * u});
  }
  WaveFunction psi(grid, std::move(amps), 0.0);
  normalize(psi);
  return psi;
}

namespace {

ComplexField ring_profile(const PacketSpecRing& spec, const Grid& grid) {
  const std::size_t n = grid.points();
  const auto x = grid.coords();
  const double prefactor = std::sqrt(1.0 / (2.0 * std::pow(kPi, 1.5) * spec.R * spec.sigma));
  ComplexField amps(grid.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = std::hypot(x[i], x[j]);
      const double u = r - spec.R;
      amps[i * n + j] = prefactor * std::exp(cplx{-u * u / (2.0 * spec.sigma * spec.sigma), spec.k * r});
    }
  return amps;
}

void check_ring(const PacketSpecRing& spec, const GridPtr& grid) {
  if (!grid || grid->dim() != 2) throw InvalidArgument("gaussian ring needs a 2D grid");
  if (!(spec.R > 0.0) || !(spec.sigma > 0.0) || !(spec.k > 0.0))
    throw InvalidArgument("gaussian ring: R, sigma and k must be positive");
  const auto& ext = grid->extent();
  const double radius = std::min(-ext.lo, ext.hi);
  if (spec.R + 6.0 * spec.sigma > radius)
    throw InvalidArgument(fmt::format("gaussian ring: R + 6 sigma = {} exceeds domain radius {}",
                                      spec.R + 6.0 * spec.sigma, radius));
}

}  // namespace

WaveFunction gaussian_ring_2d(const PacketSpecRing& spec, const GridPtr& grid) {
  check_ring(spec, grid);
  if (spec.R < 3.0 * spec.sigma)
    warn(fmt::format("gaussian ring: R={} < 3 sigma={}; the ring normalization is not accurate",
                     spec.R, 3.0 * spec.sigma));
  WaveFunction psi(grid, ring_profile(spec, *grid), 0.0);
  normalize(psi);
  return psi;
}

double ring_prefactor_norm(const PacketSpecRing& spec, const Grid& grid) {
  const auto amps = ring_profile(spec, grid);
  double sum = 0.0;
  for (const auto& a : amps) sum += abs2(a);
  return std::sqrt(sum * grid.cell_volume());
}

RealField density(const WaveFunction& psi) {
  require_grid(psi);
  RealField rho(psi.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = abs2(psi.amplitudes[i]);
  return rho;
}

std::vector<RealField> current(const WaveFunction& psi, SpectralTransform& transform) {
  require_grid(psi);
  const auto grad = gradient(std::span<const cplx>(psi.amplitudes), *psi.grid, transform);
  std::vector<RealField> j;
  j.reserve(grad.size());
  for (const auto& component : grad) {
    RealField c(psi.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (std::conj(psi.amplitudes[i]) * component[i]).imag();
    j.push_back(std::move(c));
  }
  return j;
}

std::vector<RealField> current(const WaveFunction& psi) {
  require_grid(psi);
  SpectralTransform transform(*psi.grid);
  return current(psi, transform);
}

double norm(const WaveFunction& psi) {
  require_grid(psi);
  double sum = 0.0;
  for (const auto& a : psi.amplitudes) sum += abs2(a);
  return std::sqrt(sum * psi.grid->cell_volume());
}

void normalize(WaveFunction& psi) {
  const double nrm = norm(psi);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw InvalidArgument("cannot normalize a zero or non-finite field");
  for (auto& a : psi.amplitudes) a /= nrm;
}

std::vector<double> mean_momentum(const WaveFunction& psi, SpectralTransform& transform) {
  const auto j = current(psi, transform);
  const double dv = psi.grid->cell_volume();
  std::vector<double> p;
  for (const auto& component : j) {
    double sum = 0.0;
    for (double v : component) sum += v;
    p.push_back(sum * dv);
  }
  return p;
}

std::vector<double> peak_density_position(const WaveFunction& psi) {
  require_grid(psi);
  std::size_t best = 0;
  double best_rho = -1.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = abs2(psi.amplitudes[i]);
    if (rho > best_rho) {
      best_rho = rho;
      best = i;
    }
  }
  const auto x = psi.grid->coords();
  if (psi.grid->dim() == 1) return {x[best]};
  const std::size_t n = psi.grid->points();
  return {x[best / n], x[best % n]};
}

void require_finite(const WaveFunction& psi) {
  for (const auto& a : psi.amplitudes)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw InvalidArgument("wave function contains NaN or Inf");
}

// --- snapshot I/O -------------------------------------------------------------

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error("snapshot file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'Q', 'T', 'M', 'W'};

}  // namespace

void write_snapshot(const std::filesystem::path& path, const WaveFunction& psi) {
  require_grid(psi);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  const auto& g = *psi.grid;
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.points()));
  for (int a = 0; a < g.dim(); ++a) {
    put_le<double>(out, g.extent().lo);
    put_le<double>(out, g.extent().hi);
  }
  put_le<double>(out, psi.time);
  for (const auto& a : psi.amplitudes) {
    put_le<double>(out, a.real());
    put_le<double>(out, a.imag());
  }
  if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

WaveFunction read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(fmt::format("{} is not a QTMW snapshot", path.string()));
  const auto dim = static_cast<int>(get_le<std::uint32_t>(in));
  if (dim != 1 && dim != 2) throw Error("snapshot has invalid dimension");
  std::vector<std::uint32_t> points(static_cast<std::size_t>(dim));
  for (auto& p : points) p = get_le<std::uint32_t>(in);
  std::vector<Extent> extents(static_cast<std::size_t>(dim));
  for (auto& e : extents) {
    e.lo = get_le<double>(in);
    e.hi = get_le<double>(in);
  }
  if (dim == 2 && (points[0] != points[1] || !(extents[0] == extents[1])))
    throw Error("snapshot describes a non-square 2D grid");
  auto grid = make_grid(dim, extents[0], points[0]);
  const double time = get_le<double>(in);
  ComplexField amps(grid->size());
  for (auto& a : amps) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    a = {re, im};
  }
  return WaveFunction(std::move(grid), std::move(amps), time);
}

void write_snapshot_csv(const std::filesystem::path& path, const WaveFunction& psi,
                        std::span<const std::string> header_lines) {
  require_grid(psi);
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  for (const auto& line : header_lines) out << "# " << line << '\n';
  const auto& g = *psi.grid;
  const auto x = g.coords();
  const std::size_t n = g.points();
  if (g.dim() == 1) {
    out << "x,re,im,rho\n";
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = psi.amplitudes[i];
      out << fmt::format("{:.10g},{:.17g},{:.17g},{:.17g}\n", x[i], a.real(), a.imag(), abs2(a));
    }
  } else {
    out << "x,y,re,im,rho\n";
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto a = psi.amplitudes[i * n + j];
        out << fmt::format("{:.10g},{:.10g},{:.17g},{:.17g},{:.17g}\n", x[i], x[j], a.real(), a.imag(),
                           abs2(a));
      }
  }
}

}  // namespace qtm
