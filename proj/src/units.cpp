#include "qtm/units.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qtm/error.hpp"

namespace qtm::units {

LabContext LabContext::lithium7(double t0) {
  LabContext ctx;
  ctx.mass = 7.016 * kAtomicMassUnit;
  ctx.t0 = t0;
  return ctx;
}

void LabContext::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(mass)) throw InvalidArgument("lab context: mass must be positive");
  if (!positive(t0)) throw InvalidArgument("lab context: t0 must be positive");
  if (transverse_length && !positive(*transverse_length))
    throw InvalidArgument("lab context: a_perp must be positive");
  if (atom_number && !positive(*atom_number)) throw InvalidArgument("lab context: N must be positive");
  if (kick_duration && !positive(*kick_duration))
    throw InvalidArgument("lab context: kick duration must be positive");
}

double LabContext::length_unit() const { return std::sqrt(kHbar * t0 / mass); }

double LabContext::velocity_unit() const { return length_unit() / t0; }

namespace {
double unit_of(const LabContext& ctx, Quantity q) {
  ctx.validate();
  switch (q) {
    case Quantity::length:
      return ctx.length_unit();
    case Quantity::velocity:
      return ctx.velocity_unit();
    case Quantity::time:
      return ctx.time_unit();
  }
  throw InvalidArgument("unknown quantity");
}
}  // namespace

double to_dimensionless(const LabContext& ctx, Quantity q, double si_value) { return si_value / unit_of(ctx, q); }

double to_dimensional(const LabContext& ctx, Quantity q, double value) { return value * unit_of(ctx, q); }

double scattering_length(const LabContext& ctx, double lambda) {
  ctx.validate();
  if (!ctx.transverse_length || !ctx.atom_number || !ctx.kick_duration)
    throw InvalidArgument("scattering_length needs a_perp, N and the kick duration in the lab context");
  const double a_perp = *ctx.transverse_length;
  return lambda * a_perp * a_perp * std::sqrt(ctx.mass * ctx.t0 / kHbar) /
         (2.0 * *ctx.atom_number * *ctx.kick_duration);
}

std::string conversion_table(const LabContext& ctx, const std::vector<double>& lambdas) {
  ctx.validate();
  std::string out;
  out += fmt::format("mass            {:.6e} kg\n", ctx.mass);
  out += fmt::format("t0              {:.6e} s\n", ctx.t0);
  out += fmt::format("length unit     {:.6e} m\n", ctx.length_unit());
  out += fmt::format("velocity unit   {:.6e} m/s\n", ctx.velocity_unit());
  for (double um : {10.0, 50.0})
    out += fmt::format("width {:>4g} um   sigma = {:.4f}\n", um,
                       to_dimensionless(ctx, Quantity::length, um * 1e-6));
  for (double mms : {2.0, 10.0})
    out += fmt::format("speed {:>4g} mm/s k     = {:.4f}\n", mms,
                       to_dimensionless(ctx, Quantity::velocity, mms * 1e-3));
  if (!lambdas.empty()) {
    out += "lambda,a_s_nm\n";
    for (double lambda : lambdas)
      out += fmt::format("{:g},{:.4f}\n", lambda, scattering_length(ctx, lambda) * 1e9);
  }
  return out;
}

}  // namespace qtm::units
