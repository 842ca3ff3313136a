#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "blursplat/geometry/se3.hpp"
#include "test_support.hpp"

namespace blursplat::geometry {
namespace {

using testing::random_pose;
using testing::random_unit_quaternion;

Mat3 eigen_rotation(const Vec4& q) { return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).normalized().toRotationMatrix(); }

TEST(Lie, QuaternionToRotationMatchesEigen) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Vec4 q = random_unit_quaternion(rng);
    EXPECT_LT((quat_to_rotation(q) - eigen_rotation(q)).norm(), 1e-12);
  }
}

TEST(Lie, QuaternionMultiplyComposesRotations) {
  std::mt19937_64 rng(2);
  const Vec4 a = random_unit_quaternion(rng);
  const Vec4 b = random_unit_quaternion(rng);
  EXPECT_LT((quat_to_rotation(quat_multiply(a, b)) - eigen_rotation(a) * eigen_rotation(b)).norm(), 1e-12);
}

TEST(Lie, So3ExpMatchesAngleAxis) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 w(n(rng), n(rng), n(rng));
    const Mat3 expected = Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix();
    EXPECT_LT((quat_to_rotation(so3_exp(w)) - expected).norm(), 1e-12);
  }
}

TEST(Lie, So3ExpLogRoundTripIncludingSmallAngles) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double mag : {1e-10, 1e-6, 1e-3, 0.5, 2.0, 3.0}) {
    const Vec3 w = Vec3(n(rng), n(rng), n(rng)).normalized() * mag;
    EXPECT_LT((so3_log(so3_exp(w)) - w).norm(), 1e-12 + 1e-10 * mag) << mag;
  }
}

TEST(Lie, LeftJacobianInverse) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double mag : {0.0, 1e-8, 0.3, 2.5}) {
    const Vec3 w = Vec3(n(rng), n(rng), n(rng)).normalized() * mag;
    EXPECT_LT((so3_left_jacobian(w) * so3_left_jacobian_inverse(w) - Mat3::Identity()).norm(), 1e-9) << mag;
  }
}

TEST(Lie, LeftJacobianMatchesSeriesDefinition) {
  // J = sum_k hat(w)^k / (k+1)!
  const Vec3 w(0.4, -0.2, 0.7);
  Mat3 term = Mat3::Identity();
  Mat3 series = Mat3::Zero();
  double fact = 1.0;
  for (int k = 0; k < 30; ++k) {
    fact *= (k + 1);
    series += term / fact;
    term = term * hat(w);
  }
  EXPECT_LT((so3_left_jacobian(w) - series).norm(), 1e-12);
}

TEST(Se3, ExpMatchesMatrixExponential) {
  // Compare against a truncated power series of the 4x4 twist matrix.
  Vec6 xi;
  xi << 0.3, -0.1, 0.5, 0.2, 0.4, -0.6;
  Mat4 x = Mat4::Zero();
  x.topLeftCorner<3, 3>() = hat(Vec3(xi.head<3>()));
  x.topRightCorner<3, 1>() = xi.tail<3>();
  Mat4 term = Mat4::Identity();
  Mat4 series = Mat4::Zero();
  for (int k = 0; k < 40; ++k) {
    series += term;
    term = term * x / (k + 1.0);
  }
  EXPECT_LT((SE3Pose::exp(xi).matrix() - series).norm(), 1e-12);
}

TEST(Se3, ExpLogRoundTrip) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 30; ++i) {
    const SE3Pose p = random_pose(rng, 3.0);
    const SE3Pose back = SE3Pose::exp(p.log());
    EXPECT_LT((back.matrix() - p.matrix()).norm(), 1e-10);
  }
}

TEST(Se3, QuaternionStaysUnit) {
  std::mt19937_64 rng(7);
  SE3Pose p;
  for (int i = 0; i < 200; ++i) p = p * random_pose(rng, 0.5);
  EXPECT_NEAR(p.quaternion().norm(), 1.0, 1e-9);
}

TEST(Se3, InverseAndComposition) {
  std::mt19937_64 rng(8);
  const SE3Pose a = random_pose(rng, 2.0);
  const SE3Pose b = random_pose(rng, 2.0);
  EXPECT_LT(((a * a.inverse()).matrix() - Mat4::Identity()).norm(), 1e-12);
  EXPECT_LT(((a * b).matrix() - a.matrix() * b.matrix()).norm(), 1e-12);
  const Vec3 x(0.3, -1.0, 2.0);
  EXPECT_LT((a.to_camera(a * x) - x).norm(), 1e-12);
}

TEST(Se3, FromMatrixRoundTrip) {
  std::mt19937_64 rng(9);
  const SE3Pose a = random_pose(rng, 2.0);
  EXPECT_LT((SE3Pose::from_matrix(a.matrix()).matrix() - a.matrix()).norm(), 1e-12);
}

TEST(Se3, DistanceHelpers) {
  const SE3Pose a = SE3Pose::from_translation(Vec3(1, 2, 3));
  const SE3Pose b(Vec4(std::cos(0.25), 0, 0, std::sin(0.25)), Vec3(1, 2, 5));
  EXPECT_NEAR(translation_distance(a, b), 2.0, 1e-12);
  EXPECT_NEAR(rotation_angle_between(a, b), 0.5, 1e-12);
}

TEST(Se3, GeodesicEndpointsAndTranslationMidpoint) {
  std::mt19937_64 rng(10);
  const SE3Pose a = random_pose(rng, 1.0);
  const SE3Pose b = random_pose(rng, 1.0);
  const auto g0 = SE3Pose::from_rigid(se3_geodesic(a.rigid(), b.rigid(), 0.0));
  const auto g1 = SE3Pose::from_rigid(se3_geodesic(a.rigid(), b.rigid(), 1.0));
  EXPECT_LT((g0.matrix() - a.matrix()).norm(), 1e-12);
  EXPECT_LT((g1.matrix() - b.matrix()).norm(), 1e-10);

  const SE3Pose s = SE3Pose::from_translation(Vec3(0, 0, 0));
  const SE3Pose e = SE3Pose::from_translation(Vec3(2, -4, 1));
  const auto mid = SE3Pose::from_rigid(se3_geodesic(s.rigid(), e.rigid(), 0.5));
  EXPECT_LT((mid.translation() - Vec3(1, -2, 0.5)).norm(), 1e-12);
}

TEST(Se3, GeodesicRotationMatchesSlerp) {
  const Eigen::Quaterniond qa = Eigen::Quaterniond::Identity();
  const Eigen::Quaterniond qb(Eigen::AngleAxisd(std::numbers::pi / 2, Eigen::Vector3d::UnitZ()));
  const SE3Pose a(qa, Vec3::Zero());
  const SE3Pose b(qb, Vec3::Zero());
  const auto mid = SE3Pose::from_rigid(se3_geodesic(a.rigid(), b.rigid(), 0.5));
  const Eigen::Quaterniond expected = qa.slerp(0.5, qb);
  EXPECT_LT((mid.rotation_matrix() - expected.toRotationMatrix()).norm(), 1e-6);
  EXPECT_NEAR(rotation_angle_between(a, mid), std::numbers::pi / 4, 1e-9);
}

}  // namespace
}  // namespace blursplat::geometry
