#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qtm::units {

// CODATA 2018.
inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg

/// Laboratory context for converting between rescaled and SI quantities.
/// The length unit sqrt(hbar t0 / m) is always derived, never stored.
struct LabContext {
  double mass = 0.0;       // kg
  double t0 = 0.0;         // s, time of the kick
  std::optional<double> transverse_length;  // a_perp, m
  std::optional<double> atom_number;        // N
  std::optional<double> kick_duration;      // Delta t, s

  /// 7Li (7.016 u) with the given reference time.
  static LabContext lithium7(double t0);

  double length_unit() const;    // m
  double velocity_unit() const;  // m/s
  double time_unit() const { return t0; }

  /// Throws InvalidArgument unless mass and t0 (and any set optional field)
  /// are positive and finite.
  void validate() const;
};

enum class Quantity { length, velocity, time };

double to_dimensionless(const LabContext& ctx, Quantity q, double si_value);
double to_dimensional(const LabContext& ctx, Quantity q, double value);

/// Scattering length needed for a dimensionless kick strength lambda in a
/// quasi-1D trap: a_s = lambda a_perp^2 sqrt(m t0 / hbar) / (2 N Delta t).
/// Throws InvalidArgument if a_perp, N or Delta t is missing.
double scattering_length(const LabContext& ctx, double lambda);

/// Human-readable conversion table (units and the a_s column for each lambda).
std::string conversion_table(const LabContext& ctx, const std::vector<double>& lambdas);

}  // namespace qtm::units
