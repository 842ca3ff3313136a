#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace blursplat::imaging {

enum class ColorSpace { Linear, SrgbEncoded };

std::string_view to_string(ColorSpace space);

/// Row-major grid of double samples, interleaved by channel.
///
/// Linear images hold scene-referred radiance, SrgbEncoded images hold
/// display-encoded values in [0, 1]. The same type also carries adjoints
/// (which may be negative) during gradient evaluation, so sample ranges are
/// checked by the operations that care about them, not by the container.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, ColorSpace space = ColorSpace::Linear,
        double fill = 0.0);

  static Image like(const Image& other, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  ColorSpace space() const { return space_; }
  void set_space(ColorSpace space) { space_ = space; }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  double& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  /// Sample with replicate-border addressing.
  double at_clamped(int x, int y, int c = 0) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }
  bool same_size(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  void fill(double value);

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  ColorSpace space_ = ColorSpace::Linear;
  std::vector<double> data_;
};

/// Square, odd-sized weight grid used for correlation-style filtering.
class Kernel2D {
 public:
  Kernel2D() : Kernel2D(1) {}
  explicit Kernel2D(int size, double fill = 0.0);
  Kernel2D(int size, std::vector<double> weights);

  static Kernel2D identity(int size = 1);
  static Kernel2D box(int size);

  int size() const { return size_; }
  int radius() const { return size_ / 2; }
  double& at(int row, int col) { return weights_[static_cast<std::size_t>(row) * size_ + col]; }
  double at(int row, int col) const { return weights_[static_cast<std::size_t>(row) * size_ + col]; }
  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }

  double sum() const;
  bool is_normalized(double tolerance = 1e-9) const;
  void normalize();

 private:
  int size_;
  std::vector<double> weights_;
};

}  // namespace blursplat::imaging
