#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "lensless/grid.hpp"

namespace lensless {

using ImageOperator = std::function<RasterImage(const RasterImage&)>;

struct CgOptions {
  double tol = 1e-6;
  int max_iters = 100;
  /// Probe <Au, v> = <u, Av> with random u, v before iterating.
  bool check_symmetry = false;
  std::uint64_t symmetry_seed = 0x5eed;
};

struct CgResult {
  RasterImage x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients for a self-adjoint positive semidefinite operator.
/// Stops when ||op(x) - b|| <= tol * ||b|| or after max_iters. An optional
/// preconditioner must itself be self-adjoint positive definite.
CgResult cg_solve(const ImageOperator& op, const RasterImage& b, const CgOptions& options,
                  std::optional<RasterImage> initial = std::nullopt,
                  const ImageOperator& preconditioner = {});

}  // namespace lensless
