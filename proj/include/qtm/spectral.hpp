#pragma once

#include <span>

#include "qtm/grid.hpp"

namespace qtm {

/// FFTW-backed forward/inverse DFT on a grid.
///
/// Each instance owns its plans and aligned work buffers, so one transform
/// must not be used from two threads at once. Plans are built with
/// FFTW_ESTIMATE, which makes results bit-reproducible across runs.
class SpectralTransform {
 public:
  explicit SpectralTransform(const Grid& grid);
  ~SpectralTransform();

  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;
  SpectralTransform(SpectralTransform&&) noexcept;
  SpectralTransform& operator=(SpectralTransform&&) noexcept;

  std::size_t size() const { return size_; }

  /// Unnormalized forward transform. `in` and `out` may alias.
  void forward(std::span<const cplx> in, std::span<cplx> out);

  /// Inverse transform including the 1/N factor. `in` and `out` may alias.
  void inverse(std::span<const cplx> in, std::span<cplx> out);

 private:
  void release();

  std::size_t size_ = 0;
  cplx* buffer_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace qtm
