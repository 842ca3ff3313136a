#pragma once

#include <span>
#include <vector>

namespace blursplat::mapping {

/// First-order moment-adaptive optimizer for one parameter group.
class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  /// In-place update; the group size is fixed by the first call.
  void step(std::span<double> params, std::span<const double> grads);

  double learning_rate() const { return lr_; }
  long steps() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace blursplat::mapping
