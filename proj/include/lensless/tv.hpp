#pragma once

#include <vector>

#include "lensless/grid.hpp"

namespace lensless {

/// Forward differences of an image. Neumann boundary: the last column of gx
/// and the last row of gy are zero.
struct GradientField {
  ImageGrid grid;
  std::vector<double> gx;
  std::vector<double> gy;

  GradientField() = default;
  explicit GradientField(const ImageGrid& g) : grid(g), gx(g.size(), 0.0), gy(g.size(), 0.0) {}
};

GradientField gradient(const RasterImage& u);
/// Exact negative adjoint of gradient: <gradient(u), g> = -<u, divergence(g)>.
RasterImage divergence(const GradientField& g);
/// Isotropic TV: sum over pixels of sqrt(gx^2 + gy^2).
double tv_norm(const RasterImage& u);
/// Per-pixel shrinkage of the gradient vector magnitude by tau.
GradientField group_soft_threshold(const GradientField& g, double tau);

double dot(const GradientField& a, const GradientField& b);
double norm2(const GradientField& a);

}  // namespace lensless
