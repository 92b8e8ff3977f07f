#include "qtm/mirror.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "qtm/spectral.hpp"

namespace qtm {

namespace {

constexpr double kPi = std::numbers::pi;

double step_ulps(double x, int steps) {
  if (steps == 0) return x;
  if (x != 0.0 && std::isfinite(x)) {
    const auto bits = std::bit_cast<std::int64_t>(x);
    const std::int64_t sign = bits & std::numeric_limits<std::int64_t>::min();
    const std::int64_t magnitude = (bits & std::numeric_limits<std::int64_t>::max()) + (x > 0.0 ? steps : -steps);
    if (magnitude > 0) return std::bit_cast<double>(sign | magnitude);
  }
  const double toward = steps > 0 ? INFINITY : -INFINITY;
  for (int i = 0; i < std::abs(steps); ++i) x = std::nextafter(x, toward);
  return x;
}

// Rotation by -phase, rounded so that abs2 of the result equals abs2(a)
// bit for bit: step one component by a few ulps and solve for the other.
// Offsets are tried with unit stride first, then coarsely: next to a power of
// two the parity of fl(y^2) can stay fixed over ~1e5 ulps.
constexpr std::array<std::array<int, 2>, 2> kSolvePasses{{{1, 4096}, {1024, 1024}}};

// Accepted deviation from the exact rotation, relative to |a|.
constexpr double kRoundingTolerance = 1e-9;

bool close_to(cplx z, cplx ideal, double target) {
  return std::abs(z - ideal) <= kRoundingTolerance * std::sqrt(target);
}

cplx rotate_keep_norm(cplx a, double phase) {
  const double target = abs2(a);
  const double c = std::cos(phase);
  const double s = -std::sin(phase);
  const cplx ideal{a.real() * c - a.imag() * s, a.real() * s + a.imag() * c};
  if (abs2(ideal) == target) return ideal;

  for (const auto& [stride, count] : kSolvePasses)
    for (int r = 0; r <= count; ++r)
      for (int sign : {1, -1}) {
        if (r == 0 && sign < 0) continue;
        for (int swap = 0; swap < 2; ++swap) {
          const double x = step_ulps(swap ? ideal.imag() : ideal.real(), sign * r * stride);
          const double rest = target - x * x;
          if (rest < 0.0) continue;
          const double y0 = std::copysign(std::sqrt(rest), swap ? ideal.real() : ideal.imag());
          for (int d = -2; d <= 2; ++d) {
            const double y = step_ulps(y0, d);
            const cplx z = swap ? cplx{y, x} : cplx{x, y};
            if (abs2(z) == target && close_to(z, ideal, target)) return z;
          }
        }
      }

  return ideal;
}

}  // namespace

double kick_constant() { return std::numbers::e * std::sqrt(kPi) / 2.0; }

void imprint_phase(std::span<cplx> amplitudes, std::span<const double> phase) {
  if (amplitudes.size() != phase.size()) throw InvalidArgument("imprint_phase: size mismatch");
  for (std::size_t i = 0; i < amplitudes.size(); ++i) amplitudes[i] = rotate_keep_norm(amplitudes[i], phase[i]);
}

void apply_kick_inplace(WaveFunction& psi, double lambda) {
  if (lambda == 0.0) return;
  for (auto& a : psi.amplitudes) a = rotate_keep_norm(a, lambda * abs2(a));
}

WaveFunction apply_kick(const WaveFunction& psi, double lambda) {
  WaveFunction out = psi;
  apply_kick_inplace(out, lambda);
  return out;
}

std::vector<RealField> current_jump(const WaveFunction& psi_minus, double lambda,
                                    SpectralTransform& transform) {
  const auto rho = density(psi_minus);
  auto grad = gradient(std::span<const double>(rho), *psi_minus.grid, transform);
  for (auto& component : grad)
    for (std::size_t i = 0; i < component.size(); ++i) component[i] *= -lambda * rho[i];
  return grad;
}

double lambda_min_1d(double sigma, double k, bool warn_outside_regime) {
  if (!(sigma > 0.0) || !(k > 0.0)) throw InvalidArgument("lambda_min_1d: sigma and k must be positive");
  const double sigma1 = std::sqrt(sigma * sigma + 1.0 / (sigma * sigma));
  if (warn_outside_regime && k * sigma * sigma * sigma1 < 3.0)
    warn(fmt::format("lambda_min_1d: k={} is not large against 1/(sigma^2 sigma_1)={:.3g}; estimate is rough",
                     k, 1.0 / (sigma * sigma * sigma1)));
  return kick_constant() * k * (sigma * sigma + 1.0 / (sigma * sigma));
}

double lambda_min_2d(double R, double sigma, double k, bool warn_outside_regime) {
  if (!(R > 0.0) || !(sigma > 0.0) || !(k > 0.0))
    throw InvalidArgument("lambda_min_2d: R, sigma and k must be positive");
  if (warn_outside_regime && (sigma < 3.0 || sigma > R / 3.0 || k * R < 10.0))
    warn(fmt::format("lambda_min_2d: (R={}, sigma={}, k={}) is outside 1 << sigma << R, kR >> 1", R, sigma, k));
  return 2.0 * kPi * kick_constant() * (R + k) * k * sigma * sigma;
}

std::optional<double> echo_time(double lambda, double lambda_min) {
  if (!(lambda > lambda_min)) return std::nullopt;
  return lambda / (lambda - lambda_min);
}

KickPrediction predict_1d(double sigma, double k, double lambda, bool warn_outside_regime) {
  KickPrediction p;
  p.lambda = lambda;
  p.lambda_min = lambda_min_1d(sigma, k, warn_outside_regime);
  p.t_echo = echo_time(lambda, p.lambda_min);
  return p;
}

KickPrediction predict_ring(double R, double sigma, double k, double lambda, bool warn_outside_regime) {
  KickPrediction p;
  p.lambda = lambda;
  p.lambda_min = lambda_min_2d(R, sigma, k, warn_outside_regime);
  p.t_echo = echo_time(lambda, p.lambda_min);
  return p;
}

double reversed_fraction(const WaveFunction& psi_plus, SpectralTransform& transform) {
  const auto j = current(psi_plus, transform);
  const auto rho = density(psi_plus);
  const auto& g = *psi_plus.grid;
  double sum = 0.0;
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < rho.size(); ++i)
      if (j[0][i] < 0.0) sum += rho[i];
  } else {
    const auto x = g.coords();
    const std::size_t n = g.points();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t i = a * n + b;
        if (j[0][i] * x[a] + j[1][i] * x[b] < 0.0) sum += rho[i];
      }
  }
  return std::clamp(sum * g.cell_volume(), 0.0, 1.0);
}

double reversed_fraction(const WaveFunction& psi_plus) {
  SpectralTransform transform(*psi_plus.grid);
  return reversed_fraction(psi_plus, transform);
}

PhaseComparison phase_comparison(double sigma, double k, double lambda, double xi_min, double xi_max,
                                 std::size_t count) {
  if (!(sigma > 0.0)) throw InvalidArgument("phase_comparison: sigma must be positive");
  if (lambda < 0.0) throw InvalidArgument("phase_comparison: lambda must be non-negative");
  if (count < 2 || !(xi_max > xi_min)) throw InvalidArgument("phase_comparison: bad xi sampling");

  const double sigma1 = std::sqrt(sigma * sigma + 1.0 / (sigma * sigma));
  PhaseComparison out{sigma, k, lambda, 0.0, {}};
  out.samples.reserve(count);

  double weighted_diff = 0.0;
  double weight = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double xi = xi_min + (xi_max - xi_min) * static_cast<double>(i) / static_cast<double>(count - 1);
    const double u = xi / sigma1;
    const double phi_qtm = lambda / (std::sqrt(kPi) * sigma1) * std::exp(-u * u);
    const double v = xi / (sigma1 * sigma);
    const double phi_ideal = v * v + 2.0 * k * xi;
    const double rho = std::exp(-u * u) / (std::sqrt(kPi) * sigma1);
    weighted_diff += rho * (phi_qtm - phi_ideal);
    weight += rho;
    out.samples.push_back({xi, phi_qtm, phi_ideal, phi_ideal});
  }
  out.shift = weighted_diff / weight;
  for (auto& s : out.samples) s.phi_ideal_shifted = s.phi_ideal + out.shift;
  return out;
}

PhaseComparison phase_comparison(double sigma, double k, double lambda) {
  const double sigma1 = std::sqrt(sigma * sigma + 1.0 / (sigma * sigma));
  return phase_comparison(sigma, k, lambda, -3.0 * sigma1, 3.0 * sigma1, 241);
}

void write_phase_csv(const std::filesystem::path& path, std::span<const PhaseComparison> curves,
                     std::span<const std::string> header_lines) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  for (const auto& line : header_lines) out << "# " << line << '\n';
  for (const auto& c : curves)
    out << fmt::format("# lambda={:.10g} sigma={:.10g} k={:.10g} shift={:.17g}\n", c.lambda, c.sigma, c.k,
                       c.shift);
  out << "lambda,xi,phi_qtm,phi_ideal_shifted\n";
  for (const auto& c : curves)
    for (const auto& s : c.samples)
      out << fmt::format("{:.10g},{:.17g},{:.17g},{:.17g}\n", c.lambda, s.xi, s.phi_qtm, s.phi_ideal_shifted);
}

}  // namespace qtm
