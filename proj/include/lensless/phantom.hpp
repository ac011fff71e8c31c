#pragma once

#include "lensless/grid.hpp"
#include "lensless/random.hpp"

namespace lensless {

/// Synthetic tissue-like ground truth: 20-40 soft-edged elliptical blobs
/// plus a few faint filaments, rescaled to [0, 1]. Deterministic in the seed.
RasterImage make_phantom(const ImageGrid& grid, RandomStream stream);

/// Linear rescale to [0, 1]; a constant image maps to all zeros.
RasterImage rescale_unit(const RasterImage& u);

}  // namespace lensless
