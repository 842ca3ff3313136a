#include "blursplat/blur/blur_proposal.hpp"

#include <algorithm>
#include <cmath>

#include "blursplat/error.hpp"

namespace blursplat::blur {
namespace {

double sigmoid(double v) {
  return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

double softplus(double v) {
  return v > 30.0 ? v : std::log1p(std::exp(v));
}

// Everything the forward and reverse passes need at one pixel.
struct PixelKernel {
  std::vector<double> logits;
  std::vector<double> soft;
  std::vector<double> h;
  double raw_sum = 1.0;
  double alpha_logit = 0.0;
  double mask_logit = 0.0;
  double gain = 0.0;  // softplus(alpha logit)
  double depth_factor = 0.0;
  double alpha = 0.0;
};

class KernelDecoder {
 public:
  explicit KernelDecoder(const BlurProposal& bp) : bp_(bp), sharpen_(sharpen_stencil(bp.kernel_size())) {}

  void decode(int x, int y, double depth, PixelKernel& pk) const {
    const int taps = bp_.taps();
    const BlurProposal::Sample s = bp_.sample(x, y);
    pk.logits.assign(static_cast<std::size_t>(taps), 0.0);
    pk.alpha_logit = 0.0;
    pk.mask_logit = 0.0;
    for (int n = 0; n < 4; ++n) {
      const double w = s.weight[n];
      if (w == 0.0) continue;
      const double* src = bp_.kernel_logits.data() + static_cast<std::size_t>(s.cell[n]) * taps;
      for (int t = 0; t < taps; ++t) pk.logits[t] += w * src[t];
      pk.alpha_logit += w * bp_.alpha_logits[s.cell[n]];
      pk.mask_logit += w * bp_.mask_logits[s.cell[n]];
    }
    const double mx = *std::max_element(pk.logits.begin(), pk.logits.end());
    pk.soft.resize(pk.logits.size());
    double z = 0.0;
    for (int t = 0; t < taps; ++t) z += (pk.soft[t] = std::exp(pk.logits[t] - mx));
    for (double& v : pk.soft) v /= z;

    const double d = std::max(depth, 0.0);
    pk.gain = softplus(pk.alpha_logit);
    pk.depth_factor = d / (1.0 + d);
    pk.alpha = pk.gain * pk.depth_factor;
    pk.h.resize(pk.soft.size());
    pk.raw_sum = 0.0;
    const auto stencil = sharpen_.weights();
    for (int t = 0; t < taps; ++t) pk.raw_sum += (pk.h[t] = pk.soft[t] + pk.alpha * stencil[t]);
    for (double& v : pk.h) v /= pk.raw_sum;
  }

  const Kernel2D& sharpen() const { return sharpen_; }

 private:
  const BlurProposal& bp_;
  Kernel2D sharpen_;
};

// Replicate-border k x k neighbourhood of (x, y), tap-major, channels interleaved.
void gather_patch(const Image& img, int x, int y, int k, std::vector<double>& patch,
                  std::vector<std::size_t>* offsets = nullptr) {
  const int r = k / 2;
  const int ch = img.channels();
  patch.resize(static_cast<std::size_t>(k) * k * ch);
  if (offsets != nullptr) offsets->resize(static_cast<std::size_t>(k) * k);
  const auto data = img.data();
  std::size_t t = 0;
  for (int i = 0; i < k; ++i) {
    const int sy = std::clamp(y + i - r, 0, img.height() - 1);
    for (int j = 0; j < k; ++j, ++t) {
      const int sx = std::clamp(x + j - r, 0, img.width() - 1);
      const std::size_t base = img.index(sx, sy);
      if (offsets != nullptr) (*offsets)[t] = base;
      for (int c = 0; c < ch; ++c) patch[t * ch + c] = data[base + c];
    }
  }
}

void check_inputs(const Image& img, const Image& depth, const BlurProposal& bp, const Image* gate) {
  if (img.width() != bp.width() || img.height() != bp.height() || !depth.same_size(img) ||
      depth.channels() != 1)
    throw ContractError("blur proposal inputs must match the proposal resolution");
  if (gate != nullptr && (!gate->same_size(img) || gate->channels() != 1))
    throw ContractError("blur proposal gate must be single-channel and match the image");
}

}  // namespace

BlurProposal::BlurProposal(int kernel_size, int width, int height, int grid)
    : kernel_size_(kernel_size), width_(width), height_(height), grid_(grid) {
  if (kernel_size < 1 || kernel_size % 2 == 0) throw ContractError("kernel size must be odd");
  if (width < 1 || height < 1 || grid < 1) throw ContractError("invalid blur proposal resolution");
  grid_w_ = (width + grid - 1) / grid;
  grid_h_ = (height + grid - 1) / grid;
  kernel_logits.assign(static_cast<std::size_t>(cells()) * taps(), 0.0);
  mask_logits.assign(static_cast<std::size_t>(cells()), 0.0);
  alpha_logits.assign(static_cast<std::size_t>(cells()), 0.0);
}

BlurProposal::Sample BlurProposal::sample(int x, int y) const {
  const auto axis = [this](int p, int n, int& i0, int& i1, double& f) {
    const double g = std::clamp((p + 0.5) / grid_ - 0.5, 0.0, static_cast<double>(n - 1));
    i0 = static_cast<int>(std::floor(g));
    i1 = std::min(i0 + 1, n - 1);
    f = g - i0;
  };
  int x0, x1, y0, y1;
  double fx, fy;
  axis(x, grid_w_, x0, x1, fx);
  axis(y, grid_h_, y0, y1, fy);
  Sample s;
  s.cell[0] = y0 * grid_w_ + x0;
  s.cell[1] = y0 * grid_w_ + x1;
  s.cell[2] = y1 * grid_w_ + x0;
  s.cell[3] = y1 * grid_w_ + x1;
  s.weight[0] = (1 - fx) * (1 - fy);
  s.weight[1] = fx * (1 - fy);
  s.weight[2] = (1 - fx) * fy;
  s.weight[3] = fx * fy;
  return s;
}

BlurProposalGradient::BlurProposalGradient(const BlurProposal& bp)
    : kernel_logits(bp.kernel_logits.size(), 0.0),
      mask_logits(bp.mask_logits.size(), 0.0),
      alpha_logits(bp.alpha_logits.size(), 0.0) {}

BlurProposalGradient& BlurProposalGradient::operator+=(const BlurProposalGradient& other) {
  if (kernel_logits.empty()) return *this = other;
  for (std::size_t i = 0; i < kernel_logits.size(); ++i) kernel_logits[i] += other.kernel_logits[i];
  for (std::size_t i = 0; i < mask_logits.size(); ++i) mask_logits[i] += other.mask_logits[i];
  for (std::size_t i = 0; i < alpha_logits.size(); ++i) alpha_logits[i] += other.alpha_logits[i];
  return *this;
}

Kernel2D sharpen_stencil(int size) {
  Kernel2D k(size);
  const int r = size / 2;
  if (r == 0) return k;
  k.at(r, r) = 1.0;
  k.at(r - 1, r) = k.at(r + 1, r) = k.at(r, r - 1) = k.at(r, r + 1) = -0.25;
  return k;
}

Kernel2D decode_depth_kernel(const BlurProposal& bp, int x, int y, double depth) {
  if (!(depth >= 0.0)) throw ContractError("kernel depth must be non-negative");
  PixelKernel pk;
  KernelDecoder(bp).decode(x, y, depth, pk);
  return Kernel2D(bp.kernel_size(), pk.h);
}

double decode_mask(const BlurProposal& bp, int x, int y) {
  const BlurProposal::Sample s = bp.sample(x, y);
  double l = 0.0;
  for (int n = 0; n < 4; ++n) l += s.weight[n] * bp.mask_logits[s.cell[n]];
  return sigmoid(l);
}

Image apply_blur_proposal(const Image& img, const Image& depth, const BlurProposal& bp,
                          const Image* gate) {
  check_inputs(img, depth, bp, gate);
  Image out = Image::like(img);
  const KernelDecoder decoder(bp);
  PixelKernel pk;
  const int k = bp.kernel_size();
  const int ch = img.channels();
  std::vector<double> patch;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double g = gate != nullptr ? gate->at(x, y) : 1.0;
      decoder.decode(x, y, depth.at(x, y), pk);
      const double m = g * sigmoid(pk.mask_logit);
      if (m != 0.0) gather_patch(img, x, y, k, patch);
      for (int c = 0; c < ch; ++c) {
        double conv = 0.0;
        if (m != 0.0) {
          for (std::size_t t = 0; t < pk.h.size(); ++t) conv += pk.h[t] * patch[t * ch + c];
        }
        out.at(x, y, c) = (1.0 - m) * img.at(x, y, c) + m * conv;
      }
    }
  }
  return out;
}

void apply_blur_proposal_backward(const Image& img, const Image& depth, const BlurProposal& bp,
                                  const Image* gate, const Image& out_adjoint,
                                  Image* img_adjoint, Image* depth_adjoint,
                                  BlurProposalGradient& grad) {
  check_inputs(img, depth, bp, gate);
  if (!out_adjoint.same_shape(img)) throw ContractError("blur proposal adjoint shape mismatch");
  if (grad.kernel_logits.size() != bp.kernel_logits.size()) grad = BlurProposalGradient(bp);
  const KernelDecoder decoder(bp);
  const auto stencil = decoder.sharpen().weights();
  PixelKernel pk;
  const int k = bp.kernel_size();
  const int taps = bp.taps();
  const int ch = img.channels();
  std::vector<double> patch;
  std::vector<std::size_t> offsets;
  std::vector<double> g_h(static_cast<std::size_t>(taps));
  std::vector<double> g_logit(static_cast<std::size_t>(taps));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double gate_v = gate != nullptr ? gate->at(x, y) : 1.0;
      bool any = false;
      for (int c = 0; c < img.channels(); ++c) any = any || out_adjoint.at(x, y, c) != 0.0;
      if (!any) continue;
      decoder.decode(x, y, depth.at(x, y), pk);
      const double s = sigmoid(pk.mask_logit);
      const double m = gate_v * s;

      double g_m = 0.0;
      std::fill(g_h.begin(), g_h.end(), 0.0);
      gather_patch(img, x, y, k, patch, &offsets);
      for (int c = 0; c < ch; ++c) {
        const double go = out_adjoint.at(x, y, c);
        if (go == 0.0) continue;
        double conv = 0.0;
        for (int t = 0; t < taps; ++t) {
          const double v = patch[static_cast<std::size_t>(t) * ch + c];
          conv += pk.h[t] * v;
          g_h[t] += m * go * v;
        }
        if (img_adjoint != nullptr) {
          if (m != 0.0) {
            auto adj = img_adjoint->data();
            for (int t = 0; t < taps; ++t) adj[offsets[t] + c] += m * pk.h[t] * go;
          }
          img_adjoint->at(x, y, c) += (1.0 - m) * go;
        }
        g_m += go * (conv - img.at(x, y, c));
      }
      const double g_mask_logit = g_m * gate_v * s * (1.0 - s);

      // h = raw / sum(raw), raw = softmax + alpha * stencil.
      double gh_dot_h = 0.0;
      for (int t = 0; t < taps; ++t) gh_dot_h += g_h[t] * pk.h[t];
      double g_alpha = 0.0;
      double gp_dot_p = 0.0;
      for (int t = 0; t < taps; ++t) {
        const double g_raw = (g_h[t] - gh_dot_h) / pk.raw_sum;
        g_alpha += g_raw * stencil[t];
        g_logit[t] = g_raw;
        gp_dot_p += g_raw * pk.soft[t];
      }
      for (int t = 0; t < taps; ++t) g_logit[t] = pk.soft[t] * (g_logit[t] - gp_dot_p);
      const double g_alpha_logit = g_alpha * sigmoid(pk.alpha_logit) * pk.depth_factor;
      if (depth_adjoint != nullptr) {
        const double d = depth.at(x, y);
        if (d > 0.0) depth_adjoint->at(x, y) += g_alpha * pk.gain / ((1.0 + d) * (1.0 + d));
      }

      const BlurProposal::Sample sm = bp.sample(x, y);
      for (int n = 0; n < 4; ++n) {
        const double w = sm.weight[n];
        if (w == 0.0) continue;
        const std::size_t cell = static_cast<std::size_t>(sm.cell[n]);
        double* dst = grad.kernel_logits.data() + cell * taps;
        for (int t = 0; t < taps; ++t) dst[t] += w * g_logit[t];
        grad.mask_logits[cell] += w * g_mask_logit;
        grad.alpha_logits[cell] += w * g_alpha_logit;
      }
    }
  }
}

double mean_mask(const BlurProposal& bp, const Image* gate) {
  double sum = 0.0;
  for (int y = 0; y < bp.height(); ++y) {
    for (int x = 0; x < bp.width(); ++x) {
      sum += (gate != nullptr ? gate->at(x, y) : 1.0) * decode_mask(bp, x, y);
    }
  }
  return sum / (static_cast<double>(bp.width()) * bp.height());
}

void mean_mask_backward(const BlurProposal& bp, const Image* gate, double scale,
                        BlurProposalGradient& grad) {
  if (grad.mask_logits.size() != bp.mask_logits.size()) grad = BlurProposalGradient(bp);
  const double n = static_cast<double>(bp.width()) * bp.height();
  for (int y = 0; y < bp.height(); ++y) {
    for (int x = 0; x < bp.width(); ++x) {
      const double g = gate != nullptr ? gate->at(x, y) : 1.0;
      if (g == 0.0) continue;
      const double m = decode_mask(bp, x, y);
      const double gl = scale * g * m * (1.0 - m) / n;
      const BlurProposal::Sample sm = bp.sample(x, y);
      for (int i = 0; i < 4; ++i) grad.mask_logits[sm.cell[i]] += sm.weight[i] * gl;
    }
  }
}

}  // namespace blursplat::blur
