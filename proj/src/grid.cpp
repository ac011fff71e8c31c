#include "lensless/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lensless {

ImageGrid::ImageGrid(std::size_t width, std::size_t height) : width_(width), height_(height) {
  if (width == 0 || height == 0) throw std::invalid_argument("ImageGrid: dimensions must be >= 1");
}

RasterImage::RasterImage(ImageGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

RasterImage::RasterImage(ImageGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("RasterImage: expected " + std::to_string(grid_.size()) +
                                " values, got " + std::to_string(values_.size()));
  }
}

IndexPartition::IndexPartition(std::size_t pattern_count, std::vector<std::uint32_t> labels,
                               std::uint64_t seed)
    : pattern_count_(pattern_count), labels_(std::move(labels)), seed_(seed) {
  if (pattern_count_ == 0) throw std::invalid_argument("IndexPartition: P must be >= 1");
  for (auto l : labels_) {
    if (l >= pattern_count_) throw std::invalid_argument("IndexPartition: label out of range");
  }
}

std::vector<std::size_t> IndexPartition::subset(std::size_t i) const {
  if (i >= pattern_count_) throw std::invalid_argument("IndexPartition::subset: index out of range");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    if (labels_[j] == i) out.push_back(j);
  }
  return out;
}

std::vector<std::vector<std::size_t>> IndexPartition::subsets() const {
  std::vector<std::vector<std::size_t>> out(pattern_count_);
  for (std::size_t j = 0; j < labels_.size(); ++j) out[labels_[j]].push_back(j);
  return out;
}

CenteredWindow::CenteredWindow(ImageGrid grid, std::size_t side, double requested_ratio)
    : grid_(grid), side_(side), requested_ratio_(requested_ratio) {
  if (side == 0 || side > grid.width() || side > grid.height()) {
    throw std::invalid_argument("CenteredWindow: side must be in [1, min(width, height)]");
  }
  top_left_ = {(grid.height() - side) / 2, (grid.width() - side) / 2};
}

double CenteredWindow::achieved_ratio() const noexcept {
  return static_cast<double>(observed_count()) / static_cast<double>(grid_.size());
}

bool CenteredWindow::contains(std::size_t row, std::size_t col) const noexcept {
  return row >= top_left_.row && row < top_left_.row + side_ && col >= top_left_.col &&
         col < top_left_.col + side_;
}

std::size_t CenteredWindow::pixel_index(std::size_t k) const noexcept {
  return grid_.index(top_left_.row + k / side_, top_left_.col + k % side_);
}

IndexPartition make_partition(std::size_t pixel_count, std::size_t pattern_count,
                              RandomStream stream) {
  if (pixel_count == 0) throw std::invalid_argument("make_partition: N must be >= 1");
  if (pattern_count == 0 || pattern_count > pixel_count) {
    throw std::invalid_argument("make_partition: P must satisfy 1 <= P <= N");
  }
  std::vector<std::uint32_t> labels(pixel_count, 0);
  if (pattern_count > 1) {
    for (auto& l : labels) l = static_cast<std::uint32_t>(stream.uniform_index(pattern_count));
  }
  return IndexPartition(pattern_count, std::move(labels), stream.seed());
}

CenteredWindow centered_window(const ImageGrid& grid, double ratio) {
  if (!(ratio > 0.0) || ratio > 1.0) {
    throw std::invalid_argument("centered_window: ratio must lie in (0, 1]");
  }
  const auto limit = std::min(grid.width(), grid.height());
  auto side = static_cast<std::size_t>(std::llround(std::sqrt(ratio) * static_cast<double>(grid.width())));
  side = std::clamp<std::size_t>(side, 1, limit);
  return CenteredWindow(grid, side, ratio);
}

RasterImage apply_mask(const RasterImage& u, std::span<const std::size_t> subset) {
  RasterImage out(u.grid());
  for (auto j : subset) {
    if (j >= u.size()) throw std::invalid_argument("apply_mask: index out of range");
    out[j] = u[j];
  }
  return out;
}

std::vector<double> restrict_to_window(const RasterImage& u, const CenteredWindow& window) {
  if (!(u.grid() == window.grid())) throw std::invalid_argument("restrict: grid mismatch");
  std::vector<double> out(window.observed_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = u[window.pixel_index(k)];
  return out;
}

RasterImage embed(std::span<const double> v, const CenteredWindow& window) {
  if (v.size() != window.observed_count()) throw std::invalid_argument("embed: length mismatch");
  RasterImage out(window.grid());
  for (std::size_t k = 0; k < v.size(); ++k) out[window.pixel_index(k)] = v[k];
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace lensless
