#pragma once

#include <filesystem>

#include "lensless/grid.hpp"
#include "lensless/optics.hpp"

namespace lensless {

/// Writes a 16-bit binary PGM (P5). Values are mapped linearly from
/// [min, max] of the image to [0, 65535]; a constant image maps to 0.
void write_pgm(const std::filesystem::path& path, const RasterImage& image);

/// Reads P2 or P5 PGM (8- or 16-bit). Returned values are the raw samples
/// divided by maxval, i.e. in [0, 1].
RasterImage read_pgm(const std::filesystem::path& path);

/// Raw kernel grid: int32 width, int32 height, int32 kind (0 focused,
/// 1 speckle), then width*height float64, row-major. All little-endian.
void write_kernel_raw(const std::filesystem::path& path, const Kernel& kernel);
Kernel read_kernel_raw(const std::filesystem::path& path);

}  // namespace lensless
