#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <doctest.h>

#include "qtm/spectral.hpp"
#include "qtm/wavefunction.hpp"

using namespace qtm;
using std::numbers::pi;

namespace {

double ring_norm_closed_form(double R, double sigma) {
  return std::sqrt(sigma * std::exp(-R * R / (sigma * sigma)) / (2.0 * std::sqrt(pi) * R) +
                   0.5 * (1.0 + std::erf(R / sigma)));
}

std::size_t index_of(const Grid& g, double x) {
  return static_cast<std::size_t>(std::lround((x - g.extent().lo) / g.dx()));
}

}  // namespace

TEST_CASE("1d gaussian packet") {
  const auto g = make_grid(1, {-20.0, 20.0}, 2048);
  SpectralTransform t(*g);

  const auto psi = gaussian_1d({1.0, 4.0, 0.0}, g);
  CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(density(psi)[index_of(*g, 0.0)] == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-9));
  CHECK(peak_density_position(psi)[0] == 0.0);
  CHECK(mean_momentum(psi, t)[0] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(std::abs(mean_momentum(gaussian_1d({1.0, 0.0, 0.0}, g), t)[0]) < 1e-6);
  require_finite(psi);

  CHECK_THROWS_AS(gaussian_1d({1.0, 4.0, 16.0}, g), InvalidArgument);
  CHECK_THROWS_AS(gaussian_1d({0.0, 4.0, 0.0}, g), InvalidArgument);
}

TEST_CASE("gaussian ring") {
  const auto g = make_grid(2, {-24.0, 24.0}, 512);

  SUBCASE("normalized") {
    const auto psi = gaussian_ring_2d({6.0, 2.0, 4.0}, g);
    CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("analytic prefactor norm") {
    const PacketSpecRing spec{6.0, 2.0, 4.0};
    const double lattice = ring_prefactor_norm(spec, *g);
    CHECK(lattice == doctest::Approx(ring_norm_closed_form(6.0, 2.0)).epsilon(1e-6));
    CHECK(std::abs(lattice - 1.0) < 0.05);
  }
  SUBCASE("radial peak at R") {
    const auto psi = gaussian_ring_2d({6.0, 0.5, 4.0}, g);
    const auto p = peak_density_position(psi);
    CHECK(std::abs(std::hypot(p[0], p[1]) - 6.0) <= g->dx());
  }
  SUBCASE("does not fit") { CHECK_THROWS_AS(gaussian_ring_2d({20.0, 2.0, 4.0}, g), InvalidArgument); }
}

TEST_CASE("current") {
  const double L = 16.0;
  const auto g = make_grid(1, {0.0, L}, 256);
  const auto x = g->coords();

  SUBCASE("plane wave") {
    const double q = 2.0 * pi / L * 3.0;
    WaveFunction psi(g, ComplexField(g->size()));
    for (std::size_t i = 0; i < psi.size(); ++i) psi.amplitudes[i] = std::polar(1.0 / std::sqrt(L), q * x[i]);
    const auto j = current(psi);
    for (double v : j[0]) CHECK(v == doctest::Approx(q / L).epsilon(1e-10));
  }
  SUBCASE("real field") {
    WaveFunction psi(g, ComplexField(g->size()));
    for (std::size_t i = 0; i < psi.size(); ++i) psi.amplitudes[i] = std::exp(-(x[i] - 8.0) * (x[i] - 8.0));
    const auto j = current(psi);
    for (double v : j[0]) CHECK(std::abs(v) < 1e-14);
  }
}

TEST_CASE("normalize and finiteness") {
  const auto g = make_grid(1, {-4.0, 4.0}, 64);
  WaveFunction zero(g, ComplexField(g->size()));
  CHECK_THROWS(normalize(zero));
  WaveFunction bad(g, ComplexField(g->size(), 1.0));
  bad.amplitudes[3] = {NAN, 0.0};
  CHECK_THROWS_AS(require_finite(bad), InvalidArgument);
}

TEST_CASE("snapshot round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "qtm_test_snapshot";
  std::filesystem::create_directories(dir);
  for (int dim : {1, 2}) {
    const auto g = make_grid(dim, {-3.0, 5.0}, 32);
    WaveFunction psi(g, ComplexField(g->size()), 1.25);
    for (std::size_t i = 0; i < psi.size(); ++i) psi.amplitudes[i] = {std::sin(0.1 * i), 1.0 / (i + 1.0)};
    const auto path = dir / ("psi" + std::to_string(dim) + ".qtmw");
    write_snapshot(path, psi);
    const auto back = read_snapshot(path);
    CHECK(*back.grid == *g);
    CHECK(back.time == 1.25);
    CHECK(back.amplitudes == psi.amplitudes);
  }
  std::ofstream(dir / "junk.qtmw") << "nope";
  CHECK_THROWS(read_snapshot(dir / "junk.qtmw"));
}
