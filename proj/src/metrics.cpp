#include "lensless/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace lensless {

double snr_db(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("snr: size mismatch");
  double err = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double e = truth[i] - estimate[i];
    err += e * e;
  }
  if (err == 0.0) return kInfiniteSnr;
  return 20.0 * std::log10(norm2(estimate) / std::sqrt(err));
}

double snr(const RasterImage& estimate, const RasterImage& truth) {
  if (!(estimate.grid() == truth.grid())) throw std::invalid_argument("snr: grid mismatch");
  return snr_db(estimate.values(), truth.values());
}

double window_snr(const RasterImage& estimate, const RasterImage& truth, const CenteredWindow& window) {
  if (!(estimate.grid() == truth.grid())) throw std::invalid_argument("window_snr: grid mismatch");
  return snr_db(restrict_to_window(estimate, window), restrict_to_window(truth, window));
}

double realized_bsnr(const AcquisitionRecord& record) {
  if (record.y_clean.empty() || record.y_clean.size() != record.y.size()) {
    throw std::invalid_argument("realized_bsnr: record lacks noiseless observations");
  }
  double noise = 0.0;
  for (std::size_t i = 0; i < record.y.size(); ++i) {
    const double e = record.y[i] - record.y_clean[i];
    noise += e * e;
  }
  if (noise == 0.0) return kInfiniteSnr;
  return 20.0 * std::log10(norm2(record.y_clean) / std::sqrt(noise));
}

SnrReport evaluate(const RasterImage& estimate, const RasterImage& truth, const AcquisitionRecord& record) {
  return {snr(estimate, truth), window_snr(estimate, truth, record.model.window), realized_bsnr(record)};
}

}  // namespace lensless
