#include "qtm/echo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace qtm {

NormCorrelation::NormCorrelation(const WaveFunction& reference)
    : grid_(reference.grid), reference_density_(density(reference)) {
  double sum = 0.0;
  for (double r : reference_density_) sum += r * r;
  reference_l2_ = std::sqrt(sum);
}

double NormCorrelation::operator()(const WaveFunction& psi) const {
  if (!psi.grid || !(*psi.grid == *grid_)) throw InvalidArgument("norm_correlation: grid mismatch");
  double overlap = 0.0;
  double self = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = abs2(psi.amplitudes[i]);
    overlap += reference_density_[i] * rho;
    self += rho * rho;
  }
  const double denom = reference_l2_ * std::sqrt(self);
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(overlap / denom, 0.0, 1.0);
}

double norm_correlation(const WaveFunction& reference, const WaveFunction& psi) {
  return NormCorrelation(reference)(psi);
}

double echo_search_start(const PulseProfile& pulse) {
  return pulse.kind == PulseProfile::Kind::gaussian ? pulse.t0 + 10.0 * pulse.width : pulse.t0 + 0.05;
}

EchoDetection detect_echo(std::span<const EchoSample> samples, const PulseProfile& pulse) {
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].t > samples[i - 1].t)) throw NumericalError("detect_echo: sample times must increase");

  const double start = echo_search_start(pulse);
  const auto first = std::find_if(samples.begin(), samples.end(), [&](const auto& s) { return s.t > start; });
  const std::span<const EchoSample> window(first, samples.end());
  if (window.size() < 3)
    throw NumericalError(fmt::format("detect_echo: only {} samples after t={}", window.size(), start));

  std::size_t best = 0;
  for (std::size_t i = 1; i < window.size(); ++i)
    if (window[i].norm_corr > window[best].norm_corr) best = i;

  EchoDetection result;
  result.peak_strength = window[best].norm_corr;
  result.peak_time = window[best].t;
  result.echo = best > 0 && best + 1 < window.size();

  for (std::size_t i = 1; i + 1 < window.size(); ++i) {
    if (i == best) continue;
    const double v = window[i].norm_corr;
    if (v > window[i - 1].norm_corr && v >= window[i + 1].norm_corr && v >= 0.5 * result.peak_strength)
      result.secondary.push_back({window[i].t, v});
  }
  return result;
}

void EchoRecorder::operator()(const WaveFunction& psi) {
  samples_.push_back({psi.time, correlation_(psi), norm(psi), peak_density_position(psi)});
}

void write_echo_csv(const std::filesystem::path& path, std::span<const EchoSample> samples,
                    std::span<const std::string> header_lines) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  for (const auto& line : header_lines) out << "# " << line << '\n';
  const bool two_d = !samples.empty() && samples.front().peak_position.size() == 2;
  out << (two_d ? "t,norm_corr,norm,peak_x,peak_y\n" : "t,norm_corr,norm,peak_x\n");
  for (const auto& s : samples) {
    out << fmt::format("{:.10g},{:.17g},{:.17g}", s.t, s.norm_corr, s.norm);
    for (double p : s.peak_position) out << fmt::format(",{:.10g}", p);
    out << '\n';
  }
}

}  // namespace qtm
