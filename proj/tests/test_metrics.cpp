#include "manipsyn/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace manipsyn;
using testutil::joint;
using testutil::raw;
using Vec3 = Eigen::Vector3d;

namespace {

constexpr double kPi = std::numbers::pi;
const double kDeg = kPi / 180.0;

Eigen::MatrixXd random_matrix(int rows, int cols, testutil::Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-2, 2);
  return m;
}

}  // namespace

TEST(Manipulability, TwoRPlanarAtRightAngle) {
  // l1 = l2 = 1, theta2 = 90 deg: the 2x2 linear-velocity block has det 1.
  Eigen::Matrix2d j;
  const double th1 = 0.3, th2 = kPi / 2;
  j << -std::sin(th1) - std::sin(th1 + th2), -std::sin(th1 + th2),
       std::cos(th1) + std::cos(th1 + th2), std::cos(th1 + th2);
  EXPECT_NEAR(manipulability(j), 1.0, 1e-12);
}

TEST(Manipulability, IdentityIsOne) {
  EXPECT_DOUBLE_EQ(manipulability(Eigen::MatrixXd::Identity(4, 4)), 1.0);
}

TEST(Manipulability, MatchesSingularValueProduct) {
  testutil::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXd j = random_matrix(6, 2, rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    EXPECT_NEAR(manipulability(j), svd.singularValues().prod(), 1e-12);
  }
  // Wide case uses J J^T.
  const Eigen::MatrixXd wide = random_matrix(2, 5, rng);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(wide);
  EXPECT_NEAR(manipulability(wide), svd.singularValues().prod(), 1e-10);
}

TEST(Manipulability, ZeroAtRankDeficiency) {
  Eigen::MatrixXd j(3, 2);
  j << 1, 2, 2, 4, 3, 6;
  EXPECT_DOUBLE_EQ(manipulability(j), 0.0);
}

TEST(Manipulability, InvariantUnderTaskFrameRotation) {
  testutil::Rng rng(5);
  const double angle = rng.uniform(0, 2 * kPi);
  Eigen::Matrix3d rot =
      Eigen::AngleAxisd(angle, Vec3(1, 2, 2).normalized()).toRotationMatrix();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(6, 6);
  block.topLeftCorner<3, 3>() = rot;
  block.bottomRightCorner<3, 3>() = rot;
  const Eigen::MatrixXd j = random_matrix(6, 3, rng);
  EXPECT_NEAR(manipulability(block * j), manipulability(j), 1e-10);
}

TEST(CharacteristicLength, SingleSphericalJoint) {
  auto r = raw("S1", {"L1", "L2"}, {joint("j1", "spherical", "L1", "L2")}, "L1", "L2", {});
  const Topology t = build_topology(r);
  Configuration cfg;
  cfg.joints.resize(1);
  cfg.joints[0].position = Vec3::Zero();
  cfg.task_point = Vec3(3, 4, 5);
  EXPECT_NEAR(characteristic_length(t, cfg), std::sqrt(50.0), 1e-12);
}

TEST(CharacteristicLength, RevoluteAxisThroughTaskPointContributesZero) {
  auto r = raw("R1", {"L1", "L2"}, {joint("j1", "revolute", "L1", "L2")}, "L1", "L2",
               {{"j1", "theta"}});
  const Topology t = build_topology(r);
  Configuration cfg;
  cfg.joints.resize(1);
  cfg.joints[0].position = Vec3::Zero();
  cfg.joints[0].beta = 0;  // axis +z
  cfg.task_point = Vec3(0, 0, 7);  // on the axis
  EXPECT_NEAR(characteristic_length(t, cfg), 0.0, 1e-12);
}

TEST(CharacteristicLength, AllPrismaticThrows) {
  auto r = raw("PP", {"L1", "L2", "L3"},
               {joint("j1", "prismatic", "L1", "L2"), joint("j2", "prismatic", "L2", "L3")},
               "L1", "L3", {{"j1", "d"}, {"j2", "d"}});
  const Topology t = build_topology(r);
  Configuration cfg;
  cfg.joints.resize(2);
  try {
    characteristic_length(t, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllPrismatic);
  }
}

TEST(CharacteristicLength, M71PaperOptimum) {
  const Topology t = testutil::topology_2d_m71();
  Configuration cfg;
  cfg.task_point = Vec3(3, 4, 5);
  cfg.joints.resize(5);
  cfg.joints[0] = {{10, 10, 10}, 137.39 * kDeg, 360.0 * kDeg};
  cfg.joints[1] = {{10, 10, 0}, 45.96 * kDeg, 104.74 * kDeg};
  cfg.joints[2] = {{0, 10, 0}, 68.46 * kDeg, 32.44 * kDeg};
  cfg.joints[3] = {{10, 0, 10}, 0, 0};
  cfg.joints[4] = {{0, 0, 0}, 134.35 * kDeg, 347.83 * kDeg};

  // Five effective distances: four axis distances and one spherical norm
  // |r42 - a| = sqrt(90).
  double expected = 0;
  for (int k : {0, 1, 2, 4})
    expected += (cfg.joints[k].position - cfg.task_point).cross(cfg.joints[k].axis()).norm();
  expected += (cfg.joints[3].position - cfg.task_point).norm();
  expected /= 5;
  EXPECT_NEAR((cfg.joints[3].position - cfg.task_point).norm(), std::sqrt(90.0), 1e-12);
  EXPECT_NEAR(characteristic_length(t, cfg), expected, 1e-12);
}

TEST(ScaledMetrics, UnitLengthIsIdentityScaling) {
  testutil::Rng rng(7);
  const Eigen::MatrixXd j = random_matrix(6, 3, rng);
  const MetricReport rep = scaled_metrics(j, 1.0, 3);
  EXPECT_NEAR(rep.mu_bar, rep.mu, 1e-10);
}

TEST(ScaledMetrics, OneDofConditionNumberIsOne) {
  testutil::Rng rng(9);
  const Eigen::MatrixXd j = random_matrix(6, 1, rng);
  const MetricReport rep = scaled_metrics(j, 2.5, 3);
  EXPECT_DOUBLE_EQ(rep.kappa, 1.0);
}

TEST(ScaledMetrics, RankDeficientReportsInfiniteKappa) {
  Eigen::MatrixXd j(3, 2);
  j << 1, 2, 2, 4, 3, 6;
  const MetricReport rep = scaled_metrics(j, 1.0, 3);
  EXPECT_TRUE(std::isinf(rep.kappa));
}

TEST(ScaledMetrics, DegenerateLengthFallsBackToUnscaled) {
  testutil::Rng rng(11);
  const Eigen::MatrixXd j = random_matrix(6, 2, rng);
  const MetricReport rep = scaled_metrics(j, 0.0, 3);
  EXPECT_TRUE(rep.degenerate_scaling);
  EXPECT_TRUE(std::isnan(rep.mu_bar));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  EXPECT_NEAR(rep.kappa, svd.singularValues()(0) / svd.singularValues()(1), 1e-12);
}

TEST(ScaledMetrics, MuBarEqualsGramDeterminantRoot) {
  testutil::Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    const Eigen::MatrixXd j = random_matrix(6, 3, rng);
    const double length = rng.uniform(0.3, 4.0);
    const MetricReport rep = scaled_metrics(j, length, 3);
    Eigen::MatrixXd scaled = j;
    scaled.topRows(3) /= length;
    EXPECT_NEAR(rep.mu_bar, std::sqrt((scaled.transpose() * scaled).determinant()), 1e-10);
  }
}

TEST(ScaledMetrics, KappaAtLeastOneWithEqualityIffEqualSingularValues) {
  testutil::Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXd j = random_matrix(5, 3, rng);
    const MetricReport rep = scaled_metrics(j, 1.0, 3);
    EXPECT_GE(rep.kappa, 1.0);
  }
  // Orthogonal columns with equal norms: kappa exactly 1.
  Eigen::MatrixXd ortho(3, 2);
  ortho << 2, 0, 0, 2, 0, 0;
  EXPECT_NEAR(scaled_metrics(ortho, 1.0, 3).kappa, 1.0, 1e-12);
}

TEST(ScaledMetrics, FixedLengthScalingPreservesArgmax) {
  // Sweep the 2R elbow angle; the best configuration by mu must also be the
  // best by mu_bar when one L scales the whole family.
  const double length = 2.0;
  double best_mu = -1, best_mu_arg = 0, best_mu_bar = -1, best_mu_bar_arg = 0;
  for (int i = 1; i < 180; ++i) {
    const double th2 = i * kDeg;
    Eigen::Matrix2d j;
    j << -std::sin(0.0) - std::sin(th2), -std::sin(th2),
         std::cos(0.0) + std::cos(th2), std::cos(th2);
    Eigen::MatrixXd j6 = Eigen::MatrixXd::Zero(3, 2);
    j6.topRows(2) = j;
    const MetricReport rep = scaled_metrics(j6, length, 2);
    if (rep.mu > best_mu) {
      best_mu = rep.mu;
      best_mu_arg = th2;
    }
    if (rep.mu_bar > best_mu_bar) {
      best_mu_bar = rep.mu_bar;
      best_mu_bar_arg = th2;
    }
  }
  EXPECT_DOUBLE_EQ(best_mu_arg, best_mu_bar_arg);
  EXPECT_NEAR(best_mu_arg, kPi / 2, 1e-6);
}

TEST(EvaluateMetrics, M71PaperOptimumValues) {
  const Topology t = testutil::topology_2d_m71();
  Configuration cfg;
  cfg.task_point = Vec3(3, 4, 5);
  cfg.joints.resize(5);
  cfg.joints[0] = {{10, 10, 10}, 137.39 * kDeg, 360.0 * kDeg};
  cfg.joints[1] = {{10, 10, 0}, 45.96 * kDeg, 104.74 * kDeg};
  cfg.joints[2] = {{0, 10, 0}, 68.46 * kDeg, 32.44 * kDeg};
  cfg.joints[3] = {{10, 0, 10}, 0, 0};
  cfg.joints[4] = {{0, 0, 0}, 134.35 * kDeg, 347.83 * kDeg};

  const auto reduced = reduced_jacobian(assemble_system(t, cfg));
  const MetricReport rep = evaluate_metrics(t, cfg, reduced.J);
  // Reported to two decimals at a parameter set itself rounded to two
  // decimals; 1e-2 absorbs that input rounding.
  EXPECT_NEAR(rep.mu, 173.16, 1e-2);
  EXPECT_NEAR(rep.kappa, 1.98, 1e-2);
  EXPECT_NEAR(rep.characteristic_length, 9.0911, 1e-3);
}

TEST(EvaluateMetrics, AllPrismaticSkipsScaling) {
  auto r = raw("PP", {"L1", "L2", "L3"},
               {joint("j1", "prismatic", "L1", "L2"), joint("j2", "prismatic", "L2", "L3")},
               "L1", "L3", {{"j1", "d"}, {"j2", "d"}});
  const Topology t = build_topology(r);
  Configuration cfg;
  cfg.joints.resize(2);
  cfg.joints[0] = {{0, 0, 0}, kPi / 2, 0};        // axis +x
  cfg.joints[1] = {{0, 0, 0}, kPi / 2, kPi / 2};  // axis +y
  const auto reduced = reduced_jacobian(assemble_system(t, cfg));
  const MetricReport rep = evaluate_metrics(t, cfg, reduced.J);
  EXPECT_TRUE(rep.all_prismatic);
  EXPECT_NEAR(rep.mu, 1.0, 1e-12);
  EXPECT_NEAR(rep.mu_bar, 1.0, 1e-12);
  EXPECT_NEAR(rep.kappa, 1.0, 1e-12);
}
