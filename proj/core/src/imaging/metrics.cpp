#include "blursplat/imaging/metrics.hpp"

#include <cmath>
#include <vector>

#include "blursplat/error.hpp"
#include "blursplat/imaging/color.hpp"
#include "blursplat/imaging/filter.hpp"

namespace blursplat::imaging {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

std::vector<double> ssim_window() {
  std::vector<double> w(kSsimWindow * kSsimWindow);
  const int r = kSsimWindow / 2;
  double total = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    for (int j = 0; j < kSsimWindow; ++j) {
      const double d2 = static_cast<double>((i - r) * (i - r) + (j - r) * (j - r));
      w[i * kSsimWindow + j] = std::exp(-d2 / (2.0 * kSsimSigma * kSsimSigma));
      total += w[i * kSsimWindow + j];
    }
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ContractError("psnr: image shapes differ");
  if (a.space() != b.space()) throw ContractError("psnr: color spaces differ");
  if (a.empty()) throw ContractError("psnr: empty images");
  double sse = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(da.size());
  if (mse == 0.0) return kPsnrInfinite;
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
  if (!a.same_size(b)) throw ContractError("ssim: image sizes differ");
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw ContractError("ssim: images must be at least 11x11");
  }
  const Image ga = to_grayscale(a);
  const Image gb = to_grayscale(b);
  const auto w = ssim_window();
  const int nx = a.width() - kSsimWindow + 1;
  const int ny = a.height() - kSsimWindow + 1;
  double total = 0.0;
  for (int y0 = 0; y0 < ny; ++y0) {
    for (int x0 = 0; x0 < nx; ++x0) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < kSsimWindow; ++i) {
        for (int j = 0; j < kSsimWindow; ++j) {
          const double wi = w[i * kSsimWindow + j];
          const double va = ga.at(x0 + j, y0 + i);
          const double vb = gb.at(x0 + j, y0 + i);
          ma += wi * va;
          mb += wi * vb;
          saa += wi * va * va;
          sbb += wi * vb * vb;
          sab += wi * va * vb;
        }
      }
      const double var_a = saa - ma * ma;
      const double var_b = sbb - mb * mb;
      const double cov = sab - ma * mb;
      total += ((2 * ma * mb + kSsimC1) * (2 * cov + kSsimC2)) /
               ((ma * ma + mb * mb + kSsimC1) * (var_a + var_b + kSsimC2));
    }
  }
  return total / (static_cast<double>(nx) * ny);
}

double laplacian_variance(const Image& img) {
  const Image lap = laplacian(img);
  auto d = lap.data();
  if (d.empty()) return 0.0;
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(d.size());
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  return var / static_cast<double>(d.size());
}

}  // namespace blursplat::imaging
