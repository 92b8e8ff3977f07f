#include <cmath>
#include <numbers>

#include <doctest.h>

#include "qtm/grid.hpp"
#include "qtm/spectral.hpp"

using namespace qtm;
using std::numbers::pi;

namespace {

ComplexField apply_symbol(const Grid& grid, std::span<const cplx> field, std::span<const double> symbol) {
  SpectralTransform t(grid);
  ComplexField out(field.begin(), field.end());
  t.forward(out, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= symbol[i];
  t.inverse(out, out);
  return out;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid spacing") {
  CHECK(make_grid(1, {-20.0, 44.0}, 4096)->dx() == 0.015625);
  const auto g2 = make_grid(2, {-24.0, 24.0}, 512);
  CHECK(g2->dx() == 0.09375);
  CHECK(g2->size() == 512u * 512u);
  CHECK(g2->cell_volume() == 0.09375 * 0.09375);
}

TEST_CASE("grid rejects bad input") {
  CHECK_THROWS_AS(make_grid(1, {0.0, 1.0}, 5), InvalidArgument);
  CHECK_THROWS_AS(make_grid(1, {0.0, 1.0}, 8), InvalidArgument);
  CHECK_THROWS_AS(make_grid(3, {0.0, 1.0}, 64), InvalidArgument);
  CHECK_THROWS_AS(make_grid(1, {1.0, 1.0}, 64), InvalidArgument);
  CHECK_THROWS_AS(make_grid(1, {0.0, INFINITY}, 64), InvalidArgument);
}

TEST_CASE("wavenumbers follow the DFT layout") {
  const auto g = make_grid(1, {-8.0, 8.0}, 64);
  const auto k = g->wavenumbers();
  const double dk = 2.0 * pi / 16.0;
  CHECK(k[0] == 0.0);
  CHECK(k[1] == doctest::Approx(dk));
  CHECK(k[32] == doctest::Approx(-pi / g->dx()));
  CHECK(k[63] == doctest::Approx(-dk));
  double sum = 0.0;
  for (double v : k) sum += v;
  CHECK(sum == doctest::Approx(-pi / g->dx()));
  CHECK(g->dx() * 64 == g->extent().length());
}

TEST_CASE("power of two helpers") {
  CHECK(is_power_of_two(1024));
  CHECK_FALSE(is_power_of_two(1000));
  CHECK(next_power_of_two(1000) == 1024);
  CHECK(next_power_of_two(1024) == 1024);
}

TEST_CASE("transform round trip") {
  const auto g = make_grid(2, {-5.0, 5.0}, 32);
  ComplexField f(g->size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = {std::sin(0.37 * i), std::cos(1.3 * i * i)};
  SpectralTransform t(*g);
  ComplexField back(f.size());
  t.forward(f, back);
  t.inverse(back, back);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += abs2(back[i] - f[i]);
    den += abs2(f[i]);
  }
  CHECK(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("laplacian") {
  const auto g = make_grid(1, {-20.0, 20.0}, 1024);
  const auto x = g->coords();
  const auto symbol = laplacian_symbol(*g);

  SUBCASE("plane wave eigenfunction") {
    const double q = 2.0 * pi / 40.0 * 7.0;
    ComplexField f(g->size()), expected(g->size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = std::polar(1.0, q * x[i]);
      expected[i] = -q * q * f[i];
    }
    CHECK(max_abs_diff(apply_symbol(*g, f, symbol), expected) < 1e-10);
  }
  SUBCASE("constant") {
    ComplexField f(g->size(), cplx(2.5, -1.0));
    CHECK(max_abs_diff(apply_symbol(*g, f, symbol), ComplexField(g->size())) < 1e-12);
  }
  SUBCASE("gaussian") {
    ComplexField f(g->size()), expected(g->size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double e = std::exp(-x[i] * x[i] / 2.0);
      f[i] = e;
      expected[i] = (x[i] * x[i] - 1.0) * e;
    }
    CHECK(max_abs_diff(apply_symbol(*g, f, symbol), expected) < 1e-10);
  }
  SUBCASE("2d separable") {
    const auto g2 = make_grid(2, {-10.0, 10.0}, 128);
    const auto c = g2->coords();
    const double q = 2.0 * pi / 20.0 * 3.0;
    ComplexField f(g2->size()), expected(g2->size());
    for (std::size_t ix = 0; ix < 128; ++ix)
      for (std::size_t iy = 0; iy < 128; ++iy) {
        const double e = std::exp(-c[iy] * c[iy] / 2.0);
        f[ix * 128 + iy] = std::polar(e, q * c[ix]);
        expected[ix * 128 + iy] = (c[iy] * c[iy] - 1.0 - q * q) * f[ix * 128 + iy];
      }
    CHECK(max_abs_diff(apply_symbol(*g2, f, laplacian_symbol(*g2)), expected) < 1e-10);
  }
}

TEST_CASE("gradient") {
  const double L = 10.0;
  const auto g = make_grid(1, {0.0, L}, 256);
  const auto x = g->coords();
  SpectralTransform t(*g);

  SUBCASE("plane wave") {
    const double q = 2.0 * pi / L * 5.0;
    ComplexField f(g->size()), expected(g->size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = std::polar(1.0, q * x[i]);
      expected[i] = cplx(0.0, q) * f[i];
    }
    CHECK(max_abs_diff(gradient(std::span<const cplx>(f), *g, t)[0], expected) < 1e-11);
  }
  SUBCASE("constant") {
    const RealField f(g->size(), 3.0);
    const auto d = gradient(std::span<const double>(f), *g, t)[0];
    for (double v : d) CHECK(std::abs(v) < 1e-12);
  }
  SUBCASE("sine") {
    RealField f(g->size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(2.0 * pi * x[i] / L);
    const auto d = gradient(std::span<const double>(f), *g, t)[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      worst = std::max(worst, std::abs(d[i] - 2.0 * pi / L * std::cos(2.0 * pi * x[i] / L)));
    CHECK(worst < 1e-10);
  }
}
