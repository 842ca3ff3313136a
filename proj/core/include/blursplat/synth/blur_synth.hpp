#pragma once

#include <vector>

#include "blursplat/imaging/image.hpp"

namespace blursplat::synth {

using imaging::Image;
using imaging::Kernel2D;

/// Dense sharp frames covering one exposure window.
struct FrameSequence {
  std::vector<Image> frames;
  std::vector<double> timestamps;  // seconds; may be left empty

  /// Throws ContractError on an empty sequence, mismatched shapes or
  /// non-increasing timestamps.
  void validate() const;
};

struct BenchmarkPair {
  Image blurred;  // SrgbEncoded
  Image sharp;    // SrgbEncoded, frames[mid_index]
  int n_averaged = 0;
  int mid_index = 0;
};

/// Averages SrgbEncoded frames in linear light and re-encodes the mean.
Image synthesize_motion_blur(const FrameSequence& seq);

/// Normalized disk PSF. Each weight is the exact area of the unit pixel that
/// lies inside the disk; the support half-width is ceil(radius).
Kernel2D defocus_kernel(double radius_px);

/// Area of the intersection of the disk |p| <= r with [x0, x1] x [y0, y1].
double disk_rect_overlap(double r, double x0, double x1, double y0, double y1);

/// Per-pixel gather blur with radius coc_gain * |d - focus| / d.
/// Operates in the image's own color space.
Image synthesize_defocus_blur(const Image& img, const Image& depth, double focus_depth,
                              double coc_gain);

/// Blurs the first n frames and picks frame floor(n / 2) as the target.
BenchmarkPair make_benchmark_pair(const FrameSequence& seq, int n);

}  // namespace blursplat::synth
