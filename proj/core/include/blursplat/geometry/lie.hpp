#pragma once

// Scalar-generic SO(3)/SE(3) helpers. Rotations are unit quaternions stored
// as (w, x, y, z); twists are 6-vectors ordered [theta (rotation); rho
// (translation)]. Every function is written so it can be instantiated with
// Eigen::AutoDiffScalar: small-angle branches switch on the value only and
// use Taylor expansions whose first derivatives are exact at zero.

#include <Eigen/Core>
#include <cmath>

namespace blursplat::geometry {

template <typename T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Vec4T = Eigen::Matrix<T, 4, 1>;
template <typename T>
using Vec6T = Eigen::Matrix<T, 6, 1>;
template <typename T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

namespace detail {

template <typename T>
double value_of(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return static_cast<double>(v);
  } else {
    return v.value();
  }
}

inline constexpr double kSmallAngleSq = 1e-8;

}  // namespace detail

template <typename T>
Mat3T<T> hat(const Vec3T<T>& v) {
  Mat3T<T> m;
  m << T(0), -v(2), v(1),
       v(2), T(0), -v(0),
       -v(1), v(0), T(0);
  return m;
}

template <typename T>
Vec4T<T> quat_multiply(const Vec4T<T>& a, const Vec4T<T>& b) {
  Vec4T<T> r;
  r(0) = a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3);
  r(1) = a(0) * b(1) + a(1) * b(0) + a(2) * b(3) - a(3) * b(2);
  r(2) = a(0) * b(2) - a(1) * b(3) + a(2) * b(0) + a(3) * b(1);
  r(3) = a(0) * b(3) + a(1) * b(2) - a(2) * b(1) + a(3) * b(0);
  return r;
}

template <typename T>
Vec4T<T> quat_conjugate(const Vec4T<T>& q) {
  return Vec4T<T>(q(0), -q(1), -q(2), -q(3));
}

/// Rotation matrix of q / |q|.
template <typename T>
Mat3T<T> quat_to_rotation(const Vec4T<T>& q_raw) {
  using std::sqrt;
  const T n = sqrt(q_raw.squaredNorm());
  const T w = q_raw(0) / n, x = q_raw(1) / n, y = q_raw(2) / n, z = q_raw(3) / n;
  Mat3T<T> r;
  r << T(1) - T(2) * (y * y + z * z), T(2) * (x * y - w * z), T(2) * (x * z + w * y),
       T(2) * (x * y + w * z), T(1) - T(2) * (x * x + z * z), T(2) * (y * z - w * x),
       T(2) * (x * z - w * y), T(2) * (y * z + w * x), T(1) - T(2) * (x * x + y * y);
  return r;
}

template <typename T>
Vec3T<T> quat_rotate(const Vec4T<T>& q, const Vec3T<T>& v) {
  return quat_to_rotation(q) * v;
}

/// Exp map R^3 -> S^3.
template <typename T>
Vec4T<T> so3_exp(const Vec3T<T>& theta) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T a2 = theta.squaredNorm();
  T real;
  T imag_scale;
  if (detail::value_of(a2) < detail::kSmallAngleSq) {
    real = T(1) - a2 / T(8);
    imag_scale = T(0.5) - a2 / T(48);
  } else {
    const T a = sqrt(a2);
    real = cos(a / T(2));
    imag_scale = sin(a / T(2)) / a;
  }
  return Vec4T<T>(real, imag_scale * theta(0), imag_scale * theta(1), imag_scale * theta(2));
}

/// Log map S^3 -> R^3, shortest-arc representative.
template <typename T>
Vec3T<T> so3_log(const Vec4T<T>& q_in) {
  using std::atan2;
  using std::sqrt;
  Vec4T<T> q = q_in / sqrt(q_in.squaredNorm());
  if (detail::value_of(q(0)) < 0.0) q = -q;
  const Vec3T<T> v = q.template tail<3>();
  const T n2 = v.squaredNorm();
  T scale;
  if (detail::value_of(n2) < detail::kSmallAngleSq) {
    const T w = q(0);
    scale = T(2) / w - T(2) * n2 / (T(3) * w * w * w);
  } else {
    const T n = sqrt(n2);
    scale = T(2) * atan2(n, q(0)) / n;
  }
  return scale * v;
}

/// Left Jacobian of SO(3), the V matrix of the SE(3) exponential.
template <typename T>
Mat3T<T> so3_left_jacobian(const Vec3T<T>& theta) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T a2 = theta.squaredNorm();
  T b;
  T c;
  if (detail::value_of(a2) < detail::kSmallAngleSq) {
    b = T(0.5) - a2 / T(24);
    c = T(1.0 / 6.0) - a2 / T(120);
  } else {
    const T a = sqrt(a2);
    b = (T(1) - cos(a)) / a2;
    c = (a - sin(a)) / (a2 * a);
  }
  const Mat3T<T> h = hat(theta);
  return Mat3T<T>::Identity() + b * h + c * h * h;
}

template <typename T>
Mat3T<T> so3_left_jacobian_inverse(const Vec3T<T>& theta) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T a2 = theta.squaredNorm();
  T c;
  if (detail::value_of(a2) < detail::kSmallAngleSq) {
    c = T(1.0 / 12.0) + a2 / T(720);
  } else {
    const T a = sqrt(a2);
    c = (T(1) - a * sin(a) / (T(2) * (T(1) - cos(a)))) / a2;
  }
  const Mat3T<T> h = hat(theta);
  return Mat3T<T>::Identity() - T(0.5) * h + c * h * h;
}

/// Rigid transform x -> R(q) x + t.
template <typename T>
struct RigidT {
  Vec4T<T> q = Vec4T<T>(T(1), T(0), T(0), T(0));
  Vec3T<T> t = Vec3T<T>::Zero();

  RigidT operator*(const RigidT& other) const {
    return {quat_multiply(q, other.q), quat_rotate(q, other.t) + t};
  }
  RigidT inverse() const {
    const Vec4T<T> qi = quat_conjugate(q);
    return {qi, -quat_rotate(qi, t)};
  }
  Vec3T<T> apply(const Vec3T<T>& x) const { return quat_rotate(q, x) + t; }
};

template <typename T>
RigidT<T> se3_exp(const Vec6T<T>& xi) {
  const Vec3T<T> theta = xi.template head<3>();
  const Vec3T<T> rho = xi.template tail<3>();
  return {so3_exp(theta), so3_left_jacobian(theta) * rho};
}

template <typename T>
Vec6T<T> se3_log(const RigidT<T>& g) {
  const Vec3T<T> theta = so3_log(g.q);
  Vec6T<T> xi;
  xi.template head<3>() = theta;
  xi.template tail<3>() = so3_left_jacobian_inverse(theta) * g.t;
  return xi;
}

/// exp(u * log(end * start^-1)) * start.
template <typename T>
RigidT<T> se3_geodesic(const RigidT<T>& start, const RigidT<T>& end, const T& u) {
  const Vec6T<T> delta = se3_log(end * start.inverse());
  return se3_exp<T>(u * delta) * start;
}

}  // namespace blursplat::geometry
