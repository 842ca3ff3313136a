#include "blursplat/imaging/filter.hpp"

#include <string>

#include "blursplat/error.hpp"
#include "blursplat/imaging/color.hpp"

namespace blursplat::imaging {

Image convolve2d(const Image& img, const Kernel2D& kernel, Border /*border*/) {
  if (kernel.size() % 2 == 0) throw ContractError("convolve2d requires an odd kernel size");
  const int r = kernel.radius();
  Image out = Image::like(img);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        double acc = 0.0;
        for (int i = 0; i < kernel.size(); ++i) {
          for (int j = 0; j < kernel.size(); ++j) {
            acc += kernel.at(i, j) * img.at_clamped(x + j - r, y + i - r, c);
          }
        }
        out.at(x, y, c) = acc;
      }
    }
  }
  return out;
}

Image downscale(const Image& img, int factor) {
  if (factor <= 0) throw ContractError("downscale factor must be >= 1, got " + std::to_string(factor));
  if (factor == 1) return img;
  const int w = (img.width() + factor - 1) / factor;
  const int h = (img.height() + factor - 1) / factor;
  Image out(w, h, img.channels(), img.space());
  const double inv = 1.0 / (static_cast<double>(factor) * factor);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        double acc = 0.0;
        for (int dy = 0; dy < factor; ++dy) {
          for (int dx = 0; dx < factor; ++dx) {
            acc += img.at_clamped(x * factor + dx, y * factor + dy, c);
          }
        }
        out.at(x, y, c) = acc * inv;
      }
    }
  }
  return out;
}

Image laplacian(const Image& img) {
  const Image gray = to_grayscale(img);
  Image out = Image::like(gray);
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      out.at(x, y) = gray.at_clamped(x, y - 1) + gray.at_clamped(x - 1, y) +
                     gray.at_clamped(x + 1, y) + gray.at_clamped(x, y + 1) -
                     4.0 * gray.at(x, y);
    }
  }
  return out;
}

}  // namespace blursplat::imaging
