#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lensless/fft.hpp"
#include "lensless/grid.hpp"
#include "lensless/optics.hpp"
#include "lensless/random.hpp"

namespace lensless {

/// BSNR value meaning "no noise" (sigma = 0).
inline constexpr double kNoiselessBsnr = std::numeric_limits<double>::infinity();

/// Composite operator  y = R * sum_i S_{Omega_i} (h_i (*) x).
struct AcquisitionModel {
  ImageGrid grid;
  std::vector<Kernel> kernels;
  IndexPartition partition;
  CenteredWindow window;

  std::size_t pattern_count() const noexcept { return kernels.size(); }
  std::size_t observed_count() const noexcept { return window.observed_count(); }
  /// Throws std::invalid_argument if the pieces are inconsistent.
  void validate() const;
};

struct NoiseModel {
  double sigma = 0.0;
  double bsnr_target_db = kNoiselessBsnr;
  std::uint64_t seed = 0;
};

struct AcquisitionRecord {
  std::vector<double> y;
  AcquisitionModel model;
  NoiseModel noise;
  std::vector<double> y_clean;
};

/// Circular convolution; the kernel's center pixel is the zero-shift tap.
RasterImage convolve(const RasterImage& x, const Kernel& h);
/// Convolution with the spatially reversed kernel (adjoint of convolve).
RasterImage correlate(const RasterImage& x, const Kernel& h);

std::vector<double> forward(const RasterImage& x, const AcquisitionModel& model);
RasterImage adjoint(std::span<const double> v, const AcquisitionModel& model);

/// sigma = ||y_clean|| / (sqrt(M) * 10^(bsnr/20)); bsnr = +inf gives sigma = 0.
NoiseModel calibrate_noise(std::span<const double> y_clean, double bsnr_db);

AcquisitionRecord acquire(const RasterImage& x, const AcquisitionModel& model, double bsnr_db,
                          RandomStream stream);

/// Frequency response of a centered kernel on the r2c half spectrum.
std::vector<std::complex<double>> kernel_spectrum(const Kernel& h, RealFft2d& fft);

/// Precomputed acquisition operator. Holds the kernel spectra and FFT scratch,
/// so one instance belongs to one thread at a time.
class AcquisitionOperator {
 public:
  explicit AcquisitionOperator(const AcquisitionModel& model);

  const ImageGrid& grid() const noexcept { return grid_; }
  std::size_t observed_count() const noexcept { return window_pixels_.size(); }
  std::size_t window_side() const noexcept { return window_side_; }

  std::vector<double> forward(const RasterImage& x);
  RasterImage adjoint(std::span<const double> v);
  /// A^T A x without materializing the observation vector.
  RasterImage normal(const RasterImage& x);

  /// Per-bin sum_i |h_i|^2 / P on the r2c half spectrum.
  const std::vector<double>& mean_power_transfer() const noexcept { return mean_power_; }
  /// Root-mean-square singular value, sqrt(trace(A^T A) / N).
  double operator_gain() const noexcept { return gain_; }
  RealFft2d& fft() noexcept { return fft_; }

 private:
  // Per-pattern blurred images restricted to the window and partition.
  void masked_blurs(std::span<const std::complex<double>> x_hat);
  RasterImage back_project();

  ImageGrid grid_;
  std::size_t window_side_;
  std::size_t patterns_;
  RealFft2d fft_;
  std::vector<std::vector<std::complex<double>>> spectra_;
  std::vector<double> mean_power_;
  double gain_ = 0.0;
  std::vector<std::size_t> window_pixels_;
  std::vector<std::uint32_t> labels_;
  // scratch
  std::vector<std::complex<double>> spec_a_, spec_b_, spec_acc_;
  std::vector<double> real_a_;
  std::vector<std::vector<double>> masked_;
};

}  // namespace lensless
