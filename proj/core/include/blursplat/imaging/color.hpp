#pragma once

#include "blursplat/imaging/image.hpp"

namespace blursplat::imaging {

/// IEC 61966-2-1 decoding of a single sample.
double srgb_decode(double encoded);
/// IEC 61966-2-1 encoding of a single sample, clamped to [0, 1] first.
double srgb_encode(double linear);

/// Throws ContractError unless `img` is SrgbEncoded.
Image srgb_to_linear(const Image& img);
/// Clamps to [0, 1] before encoding. Throws ContractError unless `img` is Linear.
Image linear_to_srgb(const Image& img);

/// Luminance with Rec. 709 weights; single-channel images are returned as is.
Image to_grayscale(const Image& img);

}  // namespace blursplat::imaging
