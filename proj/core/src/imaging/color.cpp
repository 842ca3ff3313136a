#include "blursplat/imaging/color.hpp"

#include <algorithm>
#include <cmath>

#include "blursplat/error.hpp"

namespace blursplat::imaging {

double srgb_decode(double encoded) {
  return encoded <= 0.04045 ? encoded / 12.92 : std::pow((encoded + 0.055) / 1.055, 2.4);
}

double srgb_encode(double linear) {
  const double v = std::clamp(linear, 0.0, 1.0);
  if (v == 1.0) return 1.0;
  return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

Image srgb_to_linear(const Image& img) {
  if (img.space() != ColorSpace::SrgbEncoded) {
    throw ContractError("srgb_to_linear expects an sRGB-encoded image");
  }
  Image out = Image::like(img);
  out.set_space(ColorSpace::Linear);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = srgb_decode(src[i]);
  return out;
}

Image linear_to_srgb(const Image& img) {
  if (img.space() != ColorSpace::Linear) {
    throw ContractError("linear_to_srgb expects a linear image");
  }
  Image out = Image::like(img);
  out.set_space(ColorSpace::SrgbEncoded);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = srgb_encode(src[i]);
  return out;
}

Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1, img.space());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = 0.2126 * img.at(x, y, 0) + 0.7152 * img.at(x, y, 1) + 0.0722 * img.at(x, y, 2);
    }
  }
  return out;
}

}  // namespace blursplat::imaging
