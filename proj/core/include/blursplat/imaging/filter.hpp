#pragma once

#include "blursplat/imaging/image.hpp"

namespace blursplat::imaging {

enum class Border { Replicate };

/// out(x, y) = sum_ij k(i, j) * img(x + j - r, y + i - r), replicate borders.
Image convolve2d(const Image& img, const Kernel2D& kernel, Border border = Border::Replicate);

/// factor x factor block mean. Sizes that are not multiples of `factor` are
/// padded by replicating the last row/column.
Image downscale(const Image& img, int factor);

/// Response of the 4-neighbour Laplacian stencil on the grayscale image.
Image laplacian(const Image& img);

}  // namespace blursplat::imaging
