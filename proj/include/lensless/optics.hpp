#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "lensless/grid.hpp"
#include "lensless/random.hpp"

namespace lensless {

/// Circular, aberration-free pupil. `pupil_radius` is the cutoff of the
/// coherent transfer function in cycles per pixel (Nyquist = 0.5).
struct PupilModel {
  ImageGrid grid;
  double pupil_radius = 0.15;

  void validate() const;
};

enum class KernelKind : std::uint32_t { kFocused = 0, kSpeckle = 1 };

std::string_view to_string(KernelKind kind);

/// Illumination intensity pattern. Non-negative, sums to 1, stored centered:
/// pixel (height/2, width/2) is the zero-shift tap.
class Kernel {
 public:
  Kernel() = default;
  /// Normalizes `intensity` to unit sum. Throws on negative or all-zero input.
  Kernel(RasterImage intensity, KernelKind kind, std::optional<std::uint64_t> seed = std::nullopt);

  /// Takes an already normalized intensity as is (used when reading stored
  /// kernels). Throws unless it is non-negative and sums to 1 within 1e-9.
  static Kernel restore(RasterImage intensity, KernelKind kind, std::optional<std::uint64_t> seed = std::nullopt);
  /// Discrete delta at the grid center.
  static Kernel delta(const ImageGrid& grid);

  const RasterImage& image() const noexcept { return image_; }
  const ImageGrid& grid() const noexcept { return image_.grid(); }
  KernelKind kind() const noexcept { return kind_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

 private:
  struct Unscaled {};
  Kernel(Unscaled, RasterImage intensity, KernelKind kind, std::optional<std::uint64_t> seed);

  RasterImage image_;
  KernelKind kind_ = KernelKind::kFocused;
  std::optional<std::uint64_t> seed_;
};

Kernel focused_psf(const PupilModel& pupil);
Kernel speckle_psf(const PupilModel& pupil, RandomStream stream);

/// Divides by a Gaussian low-pass envelope (sigma = width / 4, symmetric
/// boundary, floored at 1e-6 of its maximum) and renormalizes.
Kernel correct_vignetting(const Kernel& k);

/// Separable Gaussian blur with half-sample symmetric boundary extension.
RasterImage gaussian_blur(const RasterImage& u, double sigma);

}  // namespace lensless
