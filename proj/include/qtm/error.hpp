#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qtm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Configuration file could not be parsed or failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Density reached the periodic boundary; a wrapped-around tail would
/// corrupt the echo measurement.
class BoundaryContamination : public Error {
 public:
  BoundaryContamination(double time, double fraction);

  double time() const { return time_; }
  double fraction() const { return fraction_; }

 private:
  double time_;
  double fraction_;
};

/// A numerical procedure could not produce a result (e.g. no bracket).
class NumericalError : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Route non-fatal diagnostics (validity-regime warnings etc). The default
/// handler prints to stderr. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace qtm
