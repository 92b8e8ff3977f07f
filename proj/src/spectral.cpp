#include "qtm/spectral.hpp"

#include <algorithm>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace qtm {

namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

SpectralTransform::SpectralTransform(const Grid& grid) : size_(grid.size()) {
  std::lock_guard lock(planner_mutex());
  buffer_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * size_));
  if (!buffer_) throw std::bad_alloc();
  const int n = static_cast<int>(grid.points());
  if (grid.dim() == 1) {
    forward_plan_ = fftw_plan_dft_1d(n, as_fftw(buffer_), as_fftw(buffer_), FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_1d(n, as_fftw(buffer_), as_fftw(buffer_), FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    forward_plan_ = fftw_plan_dft_2d(n, n, as_fftw(buffer_), as_fftw(buffer_), FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_2d(n, n, as_fftw(buffer_), as_fftw(buffer_), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!forward_plan_ || !inverse_plan_) {
    release();
    throw Error("FFTW planning failed");
  }
}

SpectralTransform::~SpectralTransform() { release(); }

SpectralTransform::SpectralTransform(SpectralTransform&& other) noexcept
    : size_(std::exchange(other.size_, 0)),
      buffer_(std::exchange(other.buffer_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

SpectralTransform& SpectralTransform::operator=(SpectralTransform&& other) noexcept {
  if (this != &other) {
    release();
    size_ = std::exchange(other.size_, 0);
    buffer_ = std::exchange(other.buffer_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void SpectralTransform::release() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  if (buffer_) fftw_free(buffer_);
  forward_plan_ = inverse_plan_ = nullptr;
  buffer_ = nullptr;
}

void SpectralTransform::forward(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != size_ || out.size() != size_) throw InvalidArgument("transform size mismatch");
  std::copy(in.begin(), in.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::copy(buffer_, buffer_ + size_, out.begin());
}

void SpectralTransform::inverse(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != size_ || out.size() != size_) throw InvalidArgument("transform size mismatch");
  std::copy(in.begin(), in.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = buffer_[i] * scale;
}

}  // namespace qtm
