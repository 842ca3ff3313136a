#include "blursplat/blur/exposure.hpp"

#include <cmath>

#include "blursplat/error.hpp"

namespace blursplat::blur {

Image apply_exposure(const Image& img, const ExposureParams& e) {
  Image out = Image::like(img);
  const double gain = std::exp(e.a);
  const auto in = img.data();
  auto o = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = gain * in[i] + e.b;
  return out;
}

ExposureGradient apply_exposure_backward(const Image& img, const ExposureParams& e,
                                         const Image& out_adjoint, Image* in_adjoint) {
  if (!img.same_shape(out_adjoint) || (in_adjoint != nullptr && !in_adjoint->same_shape(img)))
    throw ContractError("exposure adjoint shape mismatch");
  const double gain = std::exp(e.a);
  ExposureGradient g;
  const auto in = img.data();
  const auto go = out_adjoint.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    g.a += go[i] * gain * in[i];
    g.b += go[i];
  }
  if (in_adjoint != nullptr) {
    auto gi = in_adjoint->data();
    for (std::size_t i = 0; i < in.size(); ++i) gi[i] += gain * go[i];
  }
  return g;
}

}  // namespace blursplat::blur
