#include "blursplat/synth/blur_synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "blursplat/error.hpp"
#include "blursplat/imaging/color.hpp"

namespace blursplat::synth {

void FrameSequence::validate() const {
  if (frames.empty()) throw ContractError("frame sequence is empty");
  for (const Image& f : frames) {
    if (!f.same_shape(frames.front()) || f.space() != frames.front().space())
      throw ContractError("frame sequence has mismatched frames");
  }
  if (!timestamps.empty()) {
    if (timestamps.size() != frames.size())
      throw ContractError("frame sequence timestamp count differs from frame count");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
      if (!(timestamps[i] > timestamps[i - 1]))
        throw ContractError("frame sequence timestamps must increase strictly");
    }
  }
}

Image synthesize_motion_blur(const FrameSequence& seq) {
  seq.validate();
  if (seq.frames.front().space() != imaging::ColorSpace::SrgbEncoded)
    throw ContractError("synthesize_motion_blur expects SrgbEncoded frames");
  Image acc = Image::like(seq.frames.front());
  acc.set_space(imaging::ColorSpace::Linear);
  auto out = acc.data();
  for (const Image& f : seq.frames) {
    const auto in = f.data();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] += imaging::srgb_decode(in[i]);
  }
  const double n = static_cast<double>(seq.frames.size());
  for (double& v : out) v /= n;
  return imaging::linear_to_srgb(acc);
}

namespace {

// Antiderivative of sqrt(r^2 - x^2).
double half_chord_integral(double r, double x) {
  const double u = std::clamp(x / r, -1.0, 1.0);
  return 0.5 * r * r * (u * std::sqrt(std::max(0.0, 1.0 - u * u)) + std::asin(u));
}

}  // namespace

double disk_rect_overlap(double r, double x0, double x1, double y0, double y1) {
  if (r <= 0.0) return 0.0;
  x0 = std::max(x0, -r);
  x1 = std::min(x1, r);
  if (x1 <= x0 || y1 <= y0) return 0.0;

  // Between consecutive breakpoints the upper and lower boundaries of the
  // clipped chord are each either a rectangle edge or the circle.
  std::vector<double> cuts{x0, x1};
  for (double y : {y0, y1}) {
    if (std::abs(y) <= r) {
      const double xb = std::sqrt(r * r - y * y);
      for (double c : {-xb, xb}) {
        if (c > x0 && c < x1) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b <= a) continue;
    const double m = 0.5 * (a + b);
    const double h = std::sqrt(std::max(0.0, r * r - m * m));
    const bool top_is_circle = h <= y1;
    const bool bottom_is_circle = -h >= y0;
    const double top_mid = top_is_circle ? h : y1;
    const double bottom_mid = bottom_is_circle ? -h : y0;
    if (top_mid <= bottom_mid) continue;
    const double chord = half_chord_integral(r, b) - half_chord_integral(r, a);
    const double top = top_is_circle ? chord : y1 * (b - a);
    const double bottom = bottom_is_circle ? -chord : y0 * (b - a);
    area += top - bottom;
  }
  return area;
}

Kernel2D defocus_kernel(double radius_px) {
  if (!(radius_px >= 0.0) || !std::isfinite(radius_px))
    throw ContractError("defocus radius must be finite and non-negative");
  const int half = static_cast<int>(std::ceil(radius_px));
  if (half == 0) return Kernel2D::identity(1);
  Kernel2D k(2 * half + 1);
  for (int i = -half; i <= half; ++i) {
    for (int j = -half; j <= half; ++j) {
      k.at(i + half, j + half) = disk_rect_overlap(radius_px, j - 0.5, j + 0.5, i - 0.5, i + 0.5);
    }
  }
  k.normalize();
  return k;
}

Image synthesize_defocus_blur(const Image& img, const Image& depth, double focus_depth,
                              double coc_gain) {
  if (depth.channels() != 1 || !depth.same_size(img))
    throw ContractError("defocus depth must be single-channel and match the image size");
  for (double d : depth.data()) {
    if (!(d > 0.0)) throw ContractError("defocus depth must be positive");
  }
  Image out = Image::like(img);
  std::map<double, Kernel2D> cache;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double d = depth.at(x, y);
      const double radius = coc_gain * std::abs(d - focus_depth) / d;
      auto it = cache.find(radius);
      if (it == cache.end()) it = cache.emplace(radius, defocus_kernel(radius)).first;
      const Kernel2D& k = it->second;
      const int r = k.radius();
      for (int c = 0; c < img.channels(); ++c) {
        double acc = 0.0;
        for (int i = 0; i < k.size(); ++i) {
          for (int j = 0; j < k.size(); ++j) {
            acc += k.at(i, j) * img.at_clamped(x + j - r, y + i - r, c);
          }
        }
        out.at(x, y, c) = acc;
      }
    }
  }
  return out;
}

BenchmarkPair make_benchmark_pair(const FrameSequence& seq, int n) {
  seq.validate();
  if (n < 1 || static_cast<std::size_t>(n) > seq.frames.size())
    throw ContractError("benchmark window exceeds the sequence length");
  FrameSequence window;
  window.frames.assign(seq.frames.begin(), seq.frames.begin() + n);
  BenchmarkPair pair;
  pair.blurred = synthesize_motion_blur(window);
  pair.mid_index = n / 2;
  pair.sharp = seq.frames[static_cast<std::size_t>(pair.mid_index)];
  pair.n_averaged = n;
  return pair;
}

}  // namespace blursplat::synth
