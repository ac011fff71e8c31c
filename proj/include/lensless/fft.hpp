#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "lensless/grid.hpp"

namespace lensless {

namespace detail {

// Owning SIMD-aligned array from fftw_malloc.
template <typename T>
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t n);
  ~AlignedBuffer();
  AlignedBuffer(AlignedBuffer&& other) noexcept;
  AlignedBuffer& operator=(AlignedBuffer&& other) noexcept;
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;

  T* data() noexcept { return data_; }
  const T* data() const noexcept { return data_; }
  std::size_t size() const noexcept { return size_; }
  std::span<T> span() noexcept { return {data_, size_}; }

 private:
  T* data_ = nullptr;
  std::size_t size_ = 0;
};

}  // namespace detail

/// Real-to-complex 2-D DFT on a fixed grid (FFTW backend).
///
/// Plans are shared process-wide and created with FFTW_ESTIMATE, so results
/// are reproducible run to run. An instance owns its scratch buffers: share
/// plans freely, but give each thread its own RealFft2d.
class RealFft2d {
 public:
  explicit RealFft2d(const ImageGrid& grid);

  const ImageGrid& grid() const noexcept { return grid_; }
  /// height * (width / 2 + 1)
  std::size_t spectrum_size() const noexcept { return spectrum_size_; }

  /// Unnormalized forward transform.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Inverse transform including the 1/N factor.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  ImageGrid grid_;
  std::size_t spectrum_size_;
  detail::AlignedBuffer<double> real_;
  detail::AlignedBuffer<std::complex<double>> spec_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// In-place complex 2-D DFT. `inverse` applies the 1/N factor.
void complex_fft2d(const ImageGrid& grid, std::span<std::complex<double>> data, bool inverse);

}  // namespace lensless
