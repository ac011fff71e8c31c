#include "lensless/optics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lensless/fft.hpp"

namespace lensless {

namespace {

// Signed DFT frequency of bin k on an n-point axis, in cycles per sample.
double frequency(std::size_t k, std::size_t n) {
  const double signed_k = k < (n + 1) / 2 ? static_cast<double>(k)
                                          : static_cast<double>(k) - static_cast<double>(n);
  return signed_k / static_cast<double>(n);
}

bool inside_pupil(const PupilModel& pupil, std::size_t row, std::size_t col) {
  const double fy = frequency(row, pupil.grid.height());
  const double fx = frequency(col, pupil.grid.width());
  return std::hypot(fx, fy) <= pupil.pupil_radius;
}

// |field|^2 moved so that the zero-shift sample lands on (height/2, width/2).
RasterImage centered_intensity(const ImageGrid& grid, std::span<const std::complex<double>> field) {
  RasterImage out(grid);
  const auto h = grid.height();
  const auto w = grid.width();
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const auto src_r = (r + h - h / 2) % h;
      const auto src_c = (c + w - w / 2) % w;
      out.at(r, c) = std::norm(field[grid.index(src_r, src_c)]);
    }
  }
  return out;
}

std::size_t mirror(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  auto m = i % period;
  if (m < 0) m += period;
  return m < static_cast<std::ptrdiff_t>(n) ? static_cast<std::size_t>(m)
                                            : static_cast<std::size_t>(period - 1 - m);
}

}  // namespace

void PupilModel::validate() const {
  if (!(pupil_radius > 0.0) || pupil_radius > 0.5) {
    throw std::invalid_argument("PupilModel: pupil_radius must lie in (0, 0.5]");
  }
}

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::kFocused ? "focused" : "speckle";
}

Kernel::Kernel(RasterImage intensity, KernelKind kind, std::optional<std::uint64_t> seed)
    : image_(std::move(intensity)), kind_(kind), seed_(seed) {
  double total = 0.0;
  for (double v : image_.values()) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("Kernel: values must be finite and >= 0");
    total += v;
  }
  if (!(total > 0.0)) throw std::invalid_argument("Kernel: all-zero intensity");
  for (double& v : image_.values()) v /= total;
}

Kernel::Kernel(Unscaled, RasterImage intensity, KernelKind kind, std::optional<std::uint64_t> seed)
    : image_(std::move(intensity)), kind_(kind), seed_(seed) {}

Kernel Kernel::restore(RasterImage intensity, KernelKind kind, std::optional<std::uint64_t> seed) {
  double total = 0.0;
  for (double v : intensity.values()) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("Kernel: values must be finite and >= 0");
    total += v;
  }
  if (!(std::abs(total - 1.0) <= 1e-9)) throw std::invalid_argument("Kernel: stored kernel does not sum to 1");
  return Kernel(Unscaled{}, std::move(intensity), kind, seed);
}

Kernel Kernel::delta(const ImageGrid& grid) {
  RasterImage img(grid);
  img.at(grid.height() / 2, grid.width() / 2) = 1.0;
  return Kernel(std::move(img), KernelKind::kFocused);
}

Kernel focused_psf(const PupilModel& pupil) {
  pupil.validate();
  const auto& grid = pupil.grid;
  std::vector<std::complex<double>> field(grid.size());
  for (std::size_t r = 0; r < grid.height(); ++r) {
    for (std::size_t c = 0; c < grid.width(); ++c) {
      if (inside_pupil(pupil, r, c)) field[grid.index(r, c)] = 1.0;
    }
  }
  complex_fft2d(grid, field, /*inverse=*/true);
  return Kernel(centered_intensity(grid, field), KernelKind::kFocused);
}

Kernel speckle_psf(const PupilModel& pupil, RandomStream stream) {
  pupil.validate();
  const auto& grid = pupil.grid;
  const auto seed = stream.seed();
  std::vector<std::complex<double>> field(grid.size());
  for (std::size_t r = 0; r < grid.height(); ++r) {
    for (std::size_t c = 0; c < grid.width(); ++c) {
      if (!inside_pupil(pupil, r, c)) continue;
      const double phase = 2.0 * std::numbers::pi * stream.uniform();
      field[grid.index(r, c)] = std::polar(1.0, phase);
    }
  }
  complex_fft2d(grid, field, /*inverse=*/true);
  return correct_vignetting(Kernel(centered_intensity(grid, field), KernelKind::kSpeckle, seed));
}

RasterImage gaussian_blur(const RasterImage& u, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be > 0");
  const auto& grid = u.grid();
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double t = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));
    taps[static_cast<std::size_t>(k + radius)] = t;
    total += t;
  }
  for (double& t : taps) t /= total;

  const auto h = grid.height();
  const auto w = grid.width();
  RasterImage rows(grid);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        acc += taps[static_cast<std::size_t>(k + radius)] *
               u.at(r, mirror(static_cast<std::ptrdiff_t>(c) + k, w));
      }
      rows.at(r, c) = acc;
    }
  }
  RasterImage out(grid);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        acc += taps[static_cast<std::size_t>(k + radius)] *
               rows.at(mirror(static_cast<std::ptrdiff_t>(r) + k, h), c);
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

Kernel correct_vignetting(const Kernel& k) {
  const auto& img = k.image();
  const double peak = *std::max_element(img.values().begin(), img.values().end());
  if (!(peak > 0.0)) throw std::invalid_argument("correct_vignetting: all-zero kernel");

  const auto envelope = gaussian_blur(img, static_cast<double>(img.grid().width()) / 4.0);
  const double env_max = *std::max_element(envelope.values().begin(), envelope.values().end());
  const double floor = 1e-6 * env_max;
  RasterImage out(img.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = img[i] / std::max(envelope[i], floor);
  return Kernel(std::move(out), k.kind(), k.seed());
}

}  // namespace lensless
