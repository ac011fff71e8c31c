#include "lensless/forward_model.hpp"

#include <cmath>
#include <stdexcept>

namespace lensless {

void AcquisitionModel::validate() const {
  if (kernels.empty()) throw std::invalid_argument("AcquisitionModel: no kernels");
  if (kernels.size() != partition.pattern_count()) {
    throw std::invalid_argument("AcquisitionModel: kernel count differs from partition P");
  }
  if (partition.pixel_count() != grid.size()) {
    throw std::invalid_argument("AcquisitionModel: partition does not cover the grid");
  }
  for (const auto& k : kernels) {
    if (!(k.grid() == grid)) throw std::invalid_argument("AcquisitionModel: kernel grid mismatch");
  }
  if (!(window.grid() == grid)) throw std::invalid_argument("AcquisitionModel: window grid mismatch");
}

std::vector<std::complex<double>> kernel_spectrum(const Kernel& h, RealFft2d& fft) {
  const auto& grid = h.grid();
  const auto rows = grid.height();
  const auto cols = grid.width();
  // Move the center tap to index 0 before transforming.
  std::vector<double> shifted(grid.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      shifted[grid.index((r + rows - rows / 2) % rows, (c + cols - cols / 2) % cols)] =
          h.image().at(r, c);
    }
  }
  std::vector<std::complex<double>> spec(fft.spectrum_size());
  fft.forward(shifted, spec);
  return spec;
}

namespace {

RasterImage filter(const RasterImage& x, const Kernel& h, bool conjugate) {
  if (!(x.grid() == h.grid())) throw std::invalid_argument("convolve: grid mismatch");
  RealFft2d fft(x.grid());
  const auto kh = kernel_spectrum(h, fft);
  std::vector<std::complex<double>> xh(fft.spectrum_size());
  fft.forward(x.values(), xh);
  for (std::size_t i = 0; i < xh.size(); ++i) xh[i] *= conjugate ? std::conj(kh[i]) : kh[i];
  RasterImage out(x.grid());
  fft.inverse(xh, out.values());
  return out;
}

}  // namespace

RasterImage convolve(const RasterImage& x, const Kernel& h) { return filter(x, h, false); }
RasterImage correlate(const RasterImage& x, const Kernel& h) { return filter(x, h, true); }

AcquisitionOperator::AcquisitionOperator(const AcquisitionModel& model)
    : grid_(model.grid),
      window_side_(model.window.side()),
      patterns_(model.kernels.size()),
      fft_(model.grid) {
  model.validate();
  spectra_.reserve(patterns_);
  for (const auto& k : model.kernels) spectra_.push_back(kernel_spectrum(k, fft_));
  mean_power_.assign(fft_.spectrum_size(), 0.0);
  for (const auto& s : spectra_) {
    for (std::size_t i = 0; i < s.size(); ++i) mean_power_[i] += std::norm(s[i]) / static_cast<double>(patterns_);
  }
  window_pixels_.resize(model.window.observed_count());
  for (std::size_t k = 0; k < window_pixels_.size(); ++k) window_pixels_[k] = model.window.pixel_index(k);
  labels_.assign(model.partition.labels().begin(), model.partition.labels().end());

  // Row k of A is a shifted copy of h_{label(k)}, so trace(A^T A) = sum_k ||h_label(k)||^2.
  std::vector<double> energy(patterns_);
  for (std::size_t p = 0; p < patterns_; ++p) energy[p] = dot(model.kernels[p].image().values(), model.kernels[p].image().values());
  double trace = 0.0;
  for (auto pix : window_pixels_) trace += energy[labels_[pix]];
  gain_ = std::sqrt(trace / static_cast<double>(grid_.size()));

  spec_a_.resize(fft_.spectrum_size());
  spec_b_.resize(fft_.spectrum_size());
  spec_acc_.resize(fft_.spectrum_size());
  real_a_.resize(grid_.size());
  masked_.assign(patterns_, std::vector<double>(grid_.size(), 0.0));
}

void AcquisitionOperator::masked_blurs(std::span<const std::complex<double>> x_hat) {
  for (std::size_t p = 0; p < patterns_; ++p) {
    const auto& s = spectra_[p];
    for (std::size_t i = 0; i < s.size(); ++i) spec_b_[i] = s[i] * x_hat[i];
    fft_.inverse(spec_b_, real_a_);
    auto& m = masked_[p];
    std::fill(m.begin(), m.end(), 0.0);
    for (auto j : window_pixels_) {
      if (labels_[j] == p) m[j] = real_a_[j];
    }
  }
}

RasterImage AcquisitionOperator::back_project() {
  std::fill(spec_acc_.begin(), spec_acc_.end(), std::complex<double>{});
  for (std::size_t p = 0; p < patterns_; ++p) {
    fft_.forward(masked_[p], spec_b_);
    const auto& s = spectra_[p];
    for (std::size_t i = 0; i < s.size(); ++i) spec_acc_[i] += std::conj(s[i]) * spec_b_[i];
  }
  RasterImage out(grid_);
  fft_.inverse(spec_acc_, out.values());
  return out;
}

std::vector<double> AcquisitionOperator::forward(const RasterImage& x) {
  if (!(x.grid() == grid_)) throw std::invalid_argument("forward: grid mismatch");
  fft_.forward(x.values(), spec_a_);
  std::vector<double> y(window_pixels_.size(), 0.0);
  for (std::size_t p = 0; p < patterns_; ++p) {
    const auto& s = spectra_[p];
    for (std::size_t i = 0; i < s.size(); ++i) spec_b_[i] = s[i] * spec_a_[i];
    fft_.inverse(spec_b_, real_a_);
    for (std::size_t k = 0; k < window_pixels_.size(); ++k) {
      const auto j = window_pixels_[k];
      if (labels_[j] == p) y[k] = real_a_[j];
    }
  }
  return y;
}

RasterImage AcquisitionOperator::adjoint(std::span<const double> v) {
  if (v.size() != window_pixels_.size()) throw std::invalid_argument("adjoint: length mismatch");
  for (auto& m : masked_) std::fill(m.begin(), m.end(), 0.0);
  for (std::size_t k = 0; k < window_pixels_.size(); ++k) {
    const auto j = window_pixels_[k];
    masked_[labels_[j]][j] = v[k];
  }
  return back_project();
}

RasterImage AcquisitionOperator::normal(const RasterImage& x) {
  if (!(x.grid() == grid_)) throw std::invalid_argument("normal: grid mismatch");
  fft_.forward(x.values(), spec_a_);
  masked_blurs(spec_a_);
  return back_project();
}

std::vector<double> forward(const RasterImage& x, const AcquisitionModel& model) {
  AcquisitionOperator op(model);
  return op.forward(x);
}

RasterImage adjoint(std::span<const double> v, const AcquisitionModel& model) {
  AcquisitionOperator op(model);
  return op.adjoint(v);
}

NoiseModel calibrate_noise(std::span<const double> y_clean, double bsnr_db) {
  const double energy = norm2(y_clean);
  if (y_clean.empty() || !(energy > 0.0)) {
    throw std::invalid_argument("calibrate_noise: observations have zero energy");
  }
  if (std::isnan(bsnr_db)) throw std::invalid_argument("calibrate_noise: BSNR is NaN");
  NoiseModel noise;
  noise.bsnr_target_db = bsnr_db;
  if (bsnr_db == kNoiselessBsnr) {
    noise.sigma = 0.0;
  } else {
    noise.sigma = energy / (std::sqrt(static_cast<double>(y_clean.size())) * std::pow(10.0, bsnr_db / 20.0));
  }
  return noise;
}

AcquisitionRecord acquire(const RasterImage& x, const AcquisitionModel& model, double bsnr_db,
                          RandomStream stream) {
  AcquisitionRecord record;
  record.model = model;
  record.y_clean = forward(x, model);
  record.noise = calibrate_noise(record.y_clean, bsnr_db);
  record.noise.seed = stream.seed();
  record.y = record.y_clean;
  if (record.noise.sigma > 0.0) {
    for (double& v : record.y) v += record.noise.sigma * stream.normal();
  }
  return record;
}

}  // namespace lensless
