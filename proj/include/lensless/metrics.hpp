#pragma once

#include <limits>

#include "lensless/forward_model.hpp"
#include "lensless/grid.hpp"

namespace lensless {

/// Returned by the SNR functions when the error is exactly zero.
inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

struct SnrReport {
  double full_fov_db = 0.0;
  double window_db = 0.0;
  double realized_bsnr_db = 0.0;
};

/// 20 log10(||estimate|| / ||truth - estimate||). The estimate's norm is the
/// numerator, not the truth's.
double snr_db(std::span<const double> estimate, std::span<const double> truth);
double snr(const RasterImage& estimate, const RasterImage& truth);
/// SNR over the observation window only.
double window_snr(const RasterImage& estimate, const RasterImage& truth, const CenteredWindow& window);
/// 20 log10(||y_clean|| / ||y - y_clean||).
double realized_bsnr(const AcquisitionRecord& record);

SnrReport evaluate(const RasterImage& estimate, const RasterImage& truth, const AcquisitionRecord& record);

}  // namespace lensless
