#pragma once

#include <vector>

#include "blursplat/imaging/image.hpp"

namespace blursplat::blur {

using imaging::Image;
using imaging::Kernel2D;

/// Per-pixel blur kernels and blend masks stored as logits on a coarse grid
/// (one cell per `grid` x `grid` pixels) and bilinearly upsampled.
///
/// At pixel x with depth d the kernel is
///   h = normalize(softmax(kernel logits) + alpha * sharpen),
///   alpha = softplus(alpha logit) * d / (1 + d),
/// where `sharpen` is 1 at the centre and -1/4 on its four neighbours. The
/// blend weight is m = sigmoid(mask logit).
class BlurProposal {
 public:
  BlurProposal() = default;
  /// All logits start at zero.
  BlurProposal(int kernel_size, int width, int height, int grid = 4);

  int kernel_size() const { return kernel_size_; }
  int taps() const { return kernel_size_ * kernel_size_; }
  int width() const { return width_; }
  int height() const { return height_; }
  int grid() const { return grid_; }
  int grid_width() const { return grid_w_; }
  int grid_height() const { return grid_h_; }
  int cells() const { return grid_w_ * grid_h_; }

  /// Cell-major, taps() logits per cell.
  std::vector<double> kernel_logits;
  std::vector<double> mask_logits;
  std::vector<double> alpha_logits;

  struct Sample {
    int cell[4];
    double weight[4];
  };
  /// Bilinear (half-pixel centred) grid sample for pixel (x, y).
  Sample sample(int x, int y) const;

 private:
  int kernel_size_ = 1;
  int width_ = 0;
  int height_ = 0;
  int grid_ = 4;
  int grid_w_ = 0;
  int grid_h_ = 0;
};

struct BlurProposalGradient {
  std::vector<double> kernel_logits;
  std::vector<double> mask_logits;
  std::vector<double> alpha_logits;

  explicit BlurProposalGradient(const BlurProposal& bp);
  BlurProposalGradient() = default;
  BlurProposalGradient& operator+=(const BlurProposalGradient& other);
};

/// Fixed sharpening stencil embedded in a size x size support.
Kernel2D sharpen_stencil(int size);

Kernel2D decode_depth_kernel(const BlurProposal& bp, int x, int y, double depth);
double decode_mask(const BlurProposal& bp, int x, int y);

/// out = (1 - m) img + m (img gathered with h(x, depth(x))), replicate borders.
/// When `gate` is given the mask is multiplied by it per pixel.
Image apply_blur_proposal(const Image& img, const Image& depth, const BlurProposal& bp,
                          const Image* gate = nullptr);

/// Reverse pass of apply_blur_proposal. Adjoints are accumulated into
/// `img_adjoint`, `depth_adjoint` (through the depth-dependent gain) and
/// `grad`; the first two may alias.
void apply_blur_proposal_backward(const Image& img, const Image& depth, const BlurProposal& bp,
                                  const Image* gate, const Image& out_adjoint,
                                  Image* img_adjoint, Image* depth_adjoint,
                                  BlurProposalGradient& grad);

/// Mean decoded mask (after gating) over the image.
double mean_mask(const BlurProposal& bp, const Image* gate = nullptr);

/// Accumulates the gradient of scale * mean_mask(bp, gate).
void mean_mask_backward(const BlurProposal& bp, const Image* gate, double scale,
                        BlurProposalGradient& grad);

}  // namespace blursplat::blur
