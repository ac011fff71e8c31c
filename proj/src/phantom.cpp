#include "lensless/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lensless {

RasterImage rescale_unit(const RasterImage& u) {
  const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
  const double span = *hi - *lo;
  RasterImage out(u.grid());
  if (span > 0.0) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = (u[i] - *lo) / span;
  }
  return out;
}

RasterImage make_phantom(const ImageGrid& grid, RandomStream stream) {
  const double w = static_cast<double>(grid.width());
  const double h = static_cast<double>(grid.height());
  const double scale = std::min(w, h);
  RasterImage img(grid);

  const auto blobs = 20 + stream.uniform_index(21);
  for (std::uint64_t b = 0; b < blobs; ++b) {
    const double cy = stream.uniform(0.0, h);
    const double cx = stream.uniform(0.0, w);
    const double a = stream.uniform(0.03, 0.14) * scale;
    const double e = stream.uniform(0.35, 1.0) * a;
    const double theta = stream.uniform(0.0, std::numbers::pi);
    const double amplitude = stream.uniform(0.2, 1.0);
    const double edge = stream.uniform(0.8, 2.0);  // transition width in pixels
    const double ct = std::cos(theta), st = std::sin(theta);
    for (std::size_t r = 0; r < grid.height(); ++r) {
      for (std::size_t c = 0; c < grid.width(); ++c) {
        const double dy = static_cast<double>(r) + 0.5 - cy;
        const double dx = static_cast<double>(c) + 0.5 - cx;
        const double u = (ct * dx + st * dy) / a;
        const double v = (-st * dx + ct * dy) / e;
        // signed distance to the boundary, approximately in pixels
        const double dist = (std::sqrt(u * u + v * v) - 1.0) * e;
        img.at(r, c) += amplitude / (1.0 + std::exp(dist / edge));
      }
    }
  }

  const auto filaments = 3 + stream.uniform_index(4);
  for (std::uint64_t f = 0; f < filaments; ++f) {
    const double y0 = stream.uniform(0.0, h);
    const double amp = stream.uniform(0.05, 0.2) * h;
    const double freq = stream.uniform(0.5, 2.0) * 2.0 * std::numbers::pi / w;
    const double phase = stream.uniform(0.0, 2.0 * std::numbers::pi);
    const double strength = stream.uniform(0.1, 0.25);
    const double width = stream.uniform(0.6, 1.2);
    for (std::size_t c = 0; c < grid.width(); ++c) {
      const double x = static_cast<double>(c) + 0.5;
      const double yc = y0 + amp * std::sin(freq * x + phase);
      for (std::size_t r = 0; r < grid.height(); ++r) {
        const double dy = static_cast<double>(r) + 0.5 - yc;
        img.at(r, c) += strength * std::exp(-0.5 * dy * dy / (width * width));
      }
    }
  }
  return rescale_unit(img);
}

}  // namespace lensless
