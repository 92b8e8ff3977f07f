#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtm/mirror.hpp"
#include "qtm/propagator.hpp"

namespace qtm {

/// Density-overlap fidelity
///   N = sum rho_ref rho / sqrt(sum rho_ref^2 sum rho^2),
/// clamped to [0, 1]. Throws InvalidArgument on a grid mismatch.
double norm_correlation(const WaveFunction& reference, const WaveFunction& psi);

/// Norm correlation against a fixed reference, with the reference density
/// and its L2 norm cached.
class NormCorrelation {
 public:
  explicit NormCorrelation(const WaveFunction& reference);
  double operator()(const WaveFunction& psi) const;

 private:
  GridPtr grid_;
  RealField reference_density_;
  double reference_l2_ = 0.0;
};

/// One row of a run's observable stream.
struct EchoSample {
  double t;
  double norm_corr;
  double norm;
  std::vector<double> peak_position;  // coordinates of max density
};

/// Local maximum of N(t).
struct EchoPeak {
  double time;
  double strength;
};

struct EchoDetection {
  double peak_strength = 0.0;
  double peak_time = 0.0;
  bool echo = false;                // global max after the guard is an interior local max
  std::vector<EchoPeak> secondary;  // other local maxima >= half the main peak
};

struct EchoRecord {
  std::vector<EchoSample> samples;
  EchoDetection detection;
  KickPrediction prediction;
};

/// Start of the peak-search window: t0 + 10 width for Gaussian pulses,
/// t0 + 0.05 for instantaneous kicks.
double echo_search_start(const PulseProfile& pulse);

/// Global max of N(t) over the search window. Throws NumericalError when
/// fewer than three samples lie in the window or times are not increasing.
EchoDetection detect_echo(std::span<const EchoSample> samples, const PulseProfile& pulse);

/// Observer sink that records (t, N, norm, peak position) for every sample.
class EchoRecorder {
 public:
  explicit EchoRecorder(const WaveFunction& reference) : correlation_(reference) {}

  void operator()(const WaveFunction& psi);
  const std::vector<EchoSample>& samples() const { return samples_; }
  std::vector<EchoSample> take() { return std::move(samples_); }

 private:
  NormCorrelation correlation_;
  std::vector<EchoSample> samples_;
};

/// Writes header comment lines, then t,norm_corr,norm,peak_x[,peak_y].
void write_echo_csv(const std::filesystem::path& path, std::span<const EchoSample> samples,
                    std::span<const std::string> header_lines = {});

}  // namespace qtm
