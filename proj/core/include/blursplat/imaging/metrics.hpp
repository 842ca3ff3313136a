#pragma once

#include <limits>

#include "blursplat/imaging/image.hpp"

namespace blursplat::imaging {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

/// Peak 1.0. Requires identical shape and color space.
double psnr(const Image& a, const Image& b);

/// Mean single-scale SSIM over the valid window positions, computed on
/// luminance with an 11x11 Gaussian window (sigma 1.5) and peak 1.0.
double ssim(const Image& a, const Image& b);

/// Population variance of laplacian(img).
double laplacian_variance(const Image& img);

}  // namespace blursplat::imaging
