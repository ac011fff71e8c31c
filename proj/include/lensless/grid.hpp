#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lensless/random.hpp"

namespace lensless {

/// Pixel grid. Pixels are linearized row-major, 0-based:
/// index = row * width + col. Every operator in the library uses this.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(std::size_t width, std::size_t height);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return width_ * height_; }

  std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * width_ + col; }

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  std::size_t width_ = 1;
  std::size_t height_ = 1;
};

/// Real-valued field on an ImageGrid.
class RasterImage {
 public:
  RasterImage() = default;
  explicit RasterImage(ImageGrid grid, double fill = 0.0);
  RasterImage(ImageGrid grid, std::vector<double> values);

  const ImageGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t row, std::size_t col) { return values_[grid_.index(row, col)]; }
  double at(std::size_t row, std::size_t col) const { return values_[grid_.index(row, col)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

 private:
  ImageGrid grid_;
  std::vector<double> values_ = std::vector<double>(1, 0.0);
};

/// Disjoint cover {Omega_1, ..., Omega_P} of the pixel indices, stored as a
/// per-pixel label in [0, P). The label representation makes disjointness and
/// coverage structural.
class IndexPartition {
 public:
  IndexPartition() = default;
  IndexPartition(std::size_t pattern_count, std::vector<std::uint32_t> labels, std::uint64_t seed);

  std::size_t pattern_count() const noexcept { return pattern_count_; }
  std::size_t pixel_count() const noexcept { return labels_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }

  /// Sorted pixel indices assigned to pattern `i`.
  std::vector<std::size_t> subset(std::size_t i) const;
  std::vector<std::vector<std::size_t>> subsets() const;

 private:
  std::size_t pattern_count_ = 1;
  std::vector<std::uint32_t> labels_;
  std::uint64_t seed_ = 0;
};

struct PixelCoord {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Square observation support of `side` x `side` pixels centered in the grid.
class CenteredWindow {
 public:
  CenteredWindow() = default;
  CenteredWindow(ImageGrid grid, std::size_t side, double requested_ratio);

  const ImageGrid& grid() const noexcept { return grid_; }
  std::size_t side() const noexcept { return side_; }
  std::size_t observed_count() const noexcept { return side_ * side_; }
  PixelCoord top_left() const noexcept { return top_left_; }
  double requested_ratio() const noexcept { return requested_ratio_; }
  /// M / N actually realized by the integer side length.
  double achieved_ratio() const noexcept;

  bool contains(std::size_t row, std::size_t col) const noexcept;
  /// Grid pixel index of the k-th observed sample (row-major inside the window).
  std::size_t pixel_index(std::size_t k) const noexcept;

 private:
  ImageGrid grid_;
  std::size_t side_ = 1;
  PixelCoord top_left_;
  double requested_ratio_ = 1.0;
};

/// Assigns every pixel independently and uniformly to one of P subsets.
IndexPartition make_partition(std::size_t pixel_count, std::size_t pattern_count, RandomStream stream);

/// side = round(sqrt(ratio) * width), clamped to [1, min(width, height)].
CenteredWindow centered_window(const ImageGrid& grid, double ratio);

RasterImage apply_mask(const RasterImage& u, std::span<const std::size_t> subset);

std::vector<double> restrict_to_window(const RasterImage& u, const CenteredWindow& window);
RasterImage embed(std::span<const double> v, const CenteredWindow& window);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace lensless
