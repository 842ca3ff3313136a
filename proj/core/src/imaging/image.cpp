#include "blursplat/imaging/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "blursplat/error.hpp"

namespace blursplat::imaging {

std::string_view to_string(ColorSpace space) {
  return space == ColorSpace::Linear ? "linear" : "srgb";
}

Image::Image(int width, int height, int channels, ColorSpace space, double fill)
    : width_(width), height_(height), channels_(channels), space_(space) {
  if (width < 0 || height < 0) throw ContractError("image dimensions must be non-negative");
  if (channels != 1 && channels != 3) {
    throw ContractError("image channels must be 1 or 3, got " + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image Image::like(const Image& other, double fill) {
  return Image(other.width_, other.height_, other.channels_, other.space_, fill);
}

double Image::at_clamped(int x, int y, int c) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y, c)];
}

void Image::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Kernel2D::Kernel2D(int size, double fill) : size_(size) {
  if (size <= 0 || size % 2 == 0) {
    throw ContractError("kernel size must be a positive odd integer, got " + std::to_string(size));
  }
  weights_.assign(static_cast<std::size_t>(size) * size, fill);
}

Kernel2D::Kernel2D(int size, std::vector<double> weights) : Kernel2D(size) {
  if (weights.size() != weights_.size()) throw ContractError("kernel weight count mismatch");
  weights_ = std::move(weights);
}

Kernel2D Kernel2D::identity(int size) {
  Kernel2D k(size);
  k.at(size / 2, size / 2) = 1.0;
  return k;
}

Kernel2D Kernel2D::box(int size) {
  return Kernel2D(size, 1.0 / (static_cast<double>(size) * size));
}

double Kernel2D::sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

bool Kernel2D::is_normalized(double tolerance) const { return std::abs(sum() - 1.0) <= tolerance; }

void Kernel2D::normalize() {
  const double s = sum();
  if (s == 0.0) throw ContractError("cannot normalize a zero-sum kernel");
  for (double& w : weights_) w /= s;
}

}  // namespace blursplat::imaging
