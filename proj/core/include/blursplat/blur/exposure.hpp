#pragma once

#include "blursplat/imaging/image.hpp"

namespace blursplat::blur {

using imaging::Image;

struct ExposureParams {
  double a = 0.0;  // log gain
  double b = 0.0;  // offset
};

struct ExposureGradient {
  double a = 0.0;
  double b = 0.0;
};

/// exp(a) * img + b, unclamped.
Image apply_exposure(const Image& img, const ExposureParams& e);

/// Accumulates the input adjoint (if non-null) and returns the parameter
/// gradient, given the adjoint of apply_exposure's output.
ExposureGradient apply_exposure_backward(const Image& img, const ExposureParams& e,
                                         const Image& out_adjoint, Image* in_adjoint);

}  // namespace blursplat::blur
