#include "lensless/tv.hpp"

#include <cmath>
#include <stdexcept>

namespace lensless {

GradientField gradient(const RasterImage& u) {
  const auto& grid = u.grid();
  const auto h = grid.height();
  const auto w = grid.width();
  GradientField g(grid);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const auto i = grid.index(r, c);
      if (c + 1 < w) g.gx[i] = u[i + 1] - u[i];
      if (r + 1 < h) g.gy[i] = u[i + w] - u[i];
    }
  }
  return g;
}

RasterImage divergence(const GradientField& g) {
  const auto& grid = g.grid;
  const auto h = grid.height();
  const auto w = grid.width();
  RasterImage out(grid);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const auto i = grid.index(r, c);
      double v = 0.0;
      if (c + 1 < w) v += g.gx[i];
      if (c > 0) v -= g.gx[i - 1];
      if (r + 1 < h) v += g.gy[i];
      if (r > 0) v -= g.gy[i - w];
      out[i] = v;
    }
  }
  return out;
}

double tv_norm(const RasterImage& u) {
  const auto g = gradient(u);
  double total = 0.0;
  for (std::size_t i = 0; i < g.gx.size(); ++i) total += std::hypot(g.gx[i], g.gy[i]);
  return total;
}

GradientField group_soft_threshold(const GradientField& g, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("group_soft_threshold: tau must be >= 0");
  GradientField out(g.grid);
  for (std::size_t i = 0; i < g.gx.size(); ++i) {
    const double m = std::hypot(g.gx[i], g.gy[i]);
    if (m > tau) {
      const double shrink = 1.0 - tau / m;
      out.gx[i] = shrink * g.gx[i];
      out.gy[i] = shrink * g.gy[i];
    }
  }
  return out;
}

double dot(const GradientField& a, const GradientField& b) {
  return dot(a.gx, b.gx) + dot(a.gy, b.gy);
}

double norm2(const GradientField& a) { return std::sqrt(dot(a, a)); }

}  // namespace lensless
