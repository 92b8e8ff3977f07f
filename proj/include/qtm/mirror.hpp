#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtm/wavefunction.hpp"

namespace qtm {

/// e*sqrt(pi)/2, the constant in both threshold estimates.
double kick_constant();

/// Threshold estimate and echo-time prediction for one kick strength.
struct KickPrediction {
  double lambda = 0.0;
  double lambda_min = 0.0;
  std::optional<double> t_echo;  // empty when lambda <= lambda_min
  double constant = kick_constant();
};

/// Instantaneous nonlinear kick psi -> psi exp(-i lambda |psi|^2).
///
/// The result is rounded so that |psi_+|^2 == |psi_-|^2 holds bit-for-bit at
/// every site (the phase is perturbed by at most a few ulps to achieve this).
WaveFunction apply_kick(const WaveFunction& psi, double lambda);
void apply_kick_inplace(WaveFunction& psi, double lambda);

/// Multiplies every amplitude by exp(-i phase[i]) while keeping |psi|^2
/// bit-identical. Shared by the instantaneous kick and the pulsed step.
void imprint_phase(std::span<cplx> amplitudes, std::span<const double> phase);

/// Analytic current change -lambda rho grad(rho) caused by a kick.
std::vector<RealField> current_jump(const WaveFunction& psi_minus, double lambda,
                                    SpectralTransform& transform);

/// C k (sigma^2 + 1/sigma^2). Warns unless k sigma^2 sigma_1 >= 3.
double lambda_min_1d(double sigma, double k, bool warn_outside_regime = true);

/// 2 pi C (R + k) k sigma^2. Warns outside 1 << sigma << R, kR >> 1.
double lambda_min_2d(double R, double sigma, double k, bool warn_outside_regime = true);

/// lambda / (lambda - lambda_min), or empty when no echo is expected.
std::optional<double> echo_time(double lambda, double lambda_min);

KickPrediction predict_1d(double sigma, double k, double lambda, bool warn_outside_regime = true);
KickPrediction predict_ring(double R, double sigma, double k, double lambda,
                            bool warn_outside_regime = true);

/// Probability weight moving backward after the kick: sum of rho over sites
/// with j < 0 (1D) or j.r_hat < 0 (2D, origin-centred).
double reversed_fraction(const WaveFunction& psi_plus, SpectralTransform& transform);
double reversed_fraction(const WaveFunction& psi_plus);

/// reversed_fraction above this value counts as "echo expected".
inline constexpr double kReversedFractionThreshold = 0.01;

struct PhaseSample {
  double xi;
  double phi_qtm;
  double phi_ideal;
  double phi_ideal_shifted;
};

/// Kick-imprinted phase vs the phase of ideal time reversal (complex
/// conjugation) for the freely evolved 1D Gaussian at t = 1. `shift` is the
/// constant added to phi_ideal that minimizes the rho-weighted L2 distance.
struct PhaseComparison {
  double sigma;
  double k;
  double lambda;
  double shift;
  std::vector<PhaseSample> samples;
};

PhaseComparison phase_comparison(double sigma, double k, double lambda, double xi_min, double xi_max,
                                 std::size_t count);

/// Default xi window [-3 sigma_1, 3 sigma_1] with 241 samples.
PhaseComparison phase_comparison(double sigma, double k, double lambda);

void write_phase_csv(const std::filesystem::path& path, std::span<const PhaseComparison> curves,
                     std::span<const std::string> header_lines = {});

}  // namespace qtm
