#include "qtm/error.hpp"

#include <iostream>
#include <mutex>

#include <fmt/format.h>

namespace qtm {

BoundaryContamination::BoundaryContamination(double time, double fraction)
    : Error(fmt::format("boundary contamination at t={:.6g}: {:.3e} of the density lies "
                        "within 5 points of the domain edge",
                        time, fraction)),
      time_(time),
      fraction_(fraction) {}

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler_slot() {
  static WarningHandler h = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  auto previous = std::move(handler_slot());
  handler_slot() = std::move(handler);
  return previous;
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler_slot()) handler_slot()(message);
}

}  // namespace qtm
