#include "manipsyn/jacobian.hpp"

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

// 2R planar chain in the x-y plane, both axes +z.
Topology topology_2r() {
  return build_topology(raw("2R", {"L1", "L2", "L3"},
                            {joint("j1", "revolute", "L1", "L2"),
                             joint("j2", "revolute", "L2", "L3")},
                            "L1", "L3", {{"j1", "theta"}, {"j2", "theta"}}));
}

Configuration configuration_2r(double l1, double l2, double th1, double th2) {
  Configuration cfg;
  cfg.joints.resize(2);
  cfg.joints[0].position = Vec3::Zero();
  cfg.joints[1].position = Vec3(l1 * std::cos(th1), l1 * std::sin(th1), 0);
  cfg.task_point = cfg.joints[1].position +
                   Vec3(l2 * std::cos(th1 + th2), l2 * std::sin(th1 + th2), 0);
  return cfg;
}

// The optimum reported for 2D-M71 (positions at bounds, angles in degrees).
Configuration configuration_m71_paper() {
  Configuration cfg;
  cfg.task_point = Vec3(3, 4, 5);
  cfg.joints.resize(5);
  cfg.joints[0] = {{10, 10, 10}, 137.39 * kDeg, 360.0 * kDeg};  // j13
  cfg.joints[1] = {{10, 10, 0}, 45.96 * kDeg, 104.74 * kDeg};   // j14
  cfg.joints[2] = {{0, 10, 0}, 68.46 * kDeg, 32.44 * kDeg};     // j35
  cfg.joints[3] = {{10, 0, 10}, 0, 0};                          // j42 (spherical)
  cfg.joints[4] = {{0, 0, 0}, 134.35 * kDeg, 347.83 * kDeg};    // j25
  return cfg;
}

}  // namespace

TEST(JointContribution, PrismaticAlongZ) {
  auto cols = joint_contribution(JointKind::Prismatic, +1, Vec3(1, 2, 3), Vec3(0, 0, 1),
                                 Vec3(5, 5, 5));
  ASSERT_EQ(cols.cols(), 1);
  EXPECT_TRUE(cols.col(0).head<3>().isApprox(Vec3(0, 0, 1)));
  EXPECT_TRUE(cols.col(0).tail<3>().isZero());
}

TEST(JointContribution, RevoluteAtTaskPoint) {
  const Vec3 r(2, -1, 4);
  auto cols = joint_contribution(JointKind::Revolute, +1, r, Vec3(0, 1, 0), r);
  EXPECT_TRUE(cols.col(0).head<3>().isZero());
  EXPECT_TRUE(cols.col(0).tail<3>().isApprox(Vec3(0, 1, 0)));
}

TEST(JointContribution, RevoluteZCrossX) {
  auto cols = joint_contribution(JointKind::Revolute, +1, Vec3(0, 0, 0), Vec3(0, 0, 1),
                                 Vec3(1, 0, 0));
  EXPECT_TRUE(cols.col(0).head<3>().isApprox(Vec3(0, 1, 0)));
}

TEST(JointContribution, DirectionFlipsSign) {
  auto fwd = joint_contribution(JointKind::Cylindrical, +1, Vec3(1, 1, 1), Vec3(1, 0, 0),
                                Vec3(4, 4, 4));
  auto rev = joint_contribution(JointKind::Cylindrical, -1, Vec3(1, 1, 1), Vec3(1, 0, 0),
                                Vec3(4, 4, 4));
  EXPECT_TRUE((fwd + rev).isZero());
  ASSERT_EQ(fwd.cols(), 2);  // theta then d
  EXPECT_TRUE(fwd.col(1).tail<3>().isZero());
}

TEST(JointContribution, SphericalHasThreeWorldAxisColumns) {
  auto cols = joint_contribution(JointKind::Spherical, +1, Vec3(0, 0, 0), Vec3::Zero(),
                                 Vec3(1, 2, 3));
  ASSERT_EQ(cols.cols(), 3);
  EXPECT_TRUE(cols.col(0).tail<3>().isApprox(Vec3(1, 0, 0)));
  EXPECT_TRUE(cols.col(1).tail<3>().isApprox(Vec3(0, 1, 0)));
  EXPECT_TRUE(cols.col(2).tail<3>().isApprox(Vec3(0, 0, 1)));
  // v = w x (a - r) for the unit-x spin.
  EXPECT_TRUE(cols.col(0).head<3>().isApprox(Vec3(1, 0, 0).cross(Vec3(1, 2, 3))));
}

TEST(AssembleSystem, SerialChainHasEmptyClosure) {
  const Topology t = topology_2r();
  const auto parts = assemble_system(t, configuration_2r(1, 1, 0.3, 0.9));
  EXPECT_TRUE(parts.serial());
  EXPECT_EQ(parts.A1.rows(), 0);
  EXPECT_EQ(parts.A2.cols(), 0);
  const auto reduced = reduced_jacobian(parts);
  EXPECT_TRUE(reduced.J.isApprox(parts.J1));
  EXPECT_EQ(reduced.det_a2, 1.0);
}

TEST(AssembleSystem, TwoRPlanarDeterminant) {
  testutil::Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const double l1 = rng.uniform(0.2, 3), l2 = rng.uniform(0.2, 3);
    const double th1 = rng.uniform(0, 2 * kPi), th2 = rng.uniform(0, 2 * kPi);
    const auto parts =
        assemble_system(topology_2r(), configuration_2r(l1, l2, th1, th2), TaskSpace::Planar3);
    const auto reduced = reduced_jacobian(parts);
    const double det = reduced.J.topRows(2).determinant();
    EXPECT_NEAR(det, l1 * l2 * std::sin(th2), 1e-9);
  }
}

TEST(AssembleSystem, M71StructureMatchesPaperDisplay) {
  const Topology t = testutil::topology_2d_m71();
  const Configuration cfg = configuration_m71_paper();
  const auto parts = assemble_system(t, cfg);

  ASSERT_EQ(parts.A2.rows(), 6);
  ASSERT_EQ(parts.A2.cols(), 6);
  ASSERT_EQ(parts.J1.cols(), 2);
  EXPECT_EQ(parts.path_count, 2);
  EXPECT_EQ(parts.superfluous_rows, 0);

  const Vec3 a = cfg.task_point;
  const Vec3 n13 = cfg.joints[0].axis();
  const Vec3 n35 = cfg.joints[2].axis();
  const Vec3 r13 = cfg.joints[0].position;
  const Vec3 r42 = cfg.joints[3].position;

  // J1 column for theta13 is the table-1 revolute contribution; column 2 is 0.
  EXPECT_TRUE(parts.J1.col(0).head<3>().isApprox(n13.cross(a - r13), 1e-12));
  EXPECT_TRUE(parts.J1.col(0).tail<3>().isApprox(n13, 1e-12));
  EXPECT_TRUE(parts.J1.col(1).isZero());

  // Passive columns are ordered (d35, theta25, theta35, w42x, w42y, w42z).
  // J2: only the cylindrical joint on path 1 contributes.
  EXPECT_TRUE(parts.J2.col(0).head<3>().isApprox(n35, 1e-12));
  EXPECT_TRUE(parts.J2.col(0).tail<3>().isZero());
  EXPECT_TRUE(parts.J2.col(1).isZero());  // theta25 lives on path 2
  EXPECT_TRUE(parts.J2.col(3).isZero());  // w42 lives on path 2

  // A2 signs: path-1 variables negative, path-2 variables positive.
  EXPECT_TRUE(parts.A2.col(0).head<3>().isApprox(-n35, 1e-12));
  EXPECT_TRUE(parts.A2.col(0).tail<3>().isZero());
  // w42x column: (0, r42z - az, ay - r42y, 1, 0, 0).
  EXPECT_NEAR(parts.A2(0, 3), 0.0, 1e-12);
  EXPECT_NEAR(parts.A2(1, 3), r42.z() - a.z(), 1e-12);
  EXPECT_NEAR(parts.A2(2, 3), a.y() - r42.y(), 1e-12);
  EXPECT_NEAR(parts.A2(3, 3), 1.0, 1e-12);
  // A1 column for theta13 is the negated J1 column.
  EXPECT_TRUE(parts.A1.col(0).isApprox(-parts.J1.col(0), 1e-12));
}

TEST(AssembleSystem, RssrNeedsTheSuperfluousRow) {
  const Topology t = testutil::topology_rssr();
  testutil::Rng rng(21);
  const Configuration cfg = testutil::random_configuration(t, rng);
  try {
    assemble_system(t, cfg, TaskSpace::Spatial6, /*superfluous_fix=*/false);
    FAIL() << "expected NonSquareA2";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSquareA2);
  }
  const auto parts = assemble_system(t, cfg);
  EXPECT_EQ(parts.A2.rows(), 7);
  EXPECT_EQ(parts.A2.cols(), 7);
  EXPECT_EQ(parts.superfluous_rows, 1);
}

TEST(AssembleSystem, SpatialFourBarIsOverconstrained) {
  // All-revolute spatial four-bar: 6 closure rows but only 3 passive rates.
  auto r = raw("4R", {"L1", "L2", "L3", "L4"},
               {joint("j1", "revolute", "L1", "L2"), joint("j2", "revolute", "L2", "L3"),
                joint("j3", "revolute", "L3", "L4"), joint("j4", "revolute", "L1", "L4")},
               "L1", "L3", {{"j1", "theta"}});
  const Topology t = build_topology(r);
  testutil::Rng rng(3);
  try {
    assemble_system(t, testutil::random_configuration(t, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSquareA2);
  }
}

TEST(ReducedJacobian, PathConsistencyAcrossFormulations) {
  // Velocities propagated through every path agree once the passive rates
  // are solved from the closure system.
  for (const Topology& t : {testutil::topology_2d_m71(), testutil::topology_rssr()}) {
    testutil::Rng rng(11);
    for (int i = 0; i < 20; ++i) {
      const Configuration cfg = testutil::generic_configuration(t, rng);
      const auto parts = assemble_system(t, cfg);
      const auto inv = passive_velocity_inventory(t);
      Eigen::VectorXd theta_a(inv.active.size());
      for (int k = 0; k < theta_a.size(); ++k) theta_a[k] = rng.uniform(-1, 1);
      const Eigen::VectorXd omega = parts.A2.partialPivLu().solve(-parts.A1 * theta_a);

      // Twist through each path, summed joint by joint from table-1 terms.
      const auto paths = enumerate_paths(t);
      std::vector<Eigen::VectorXd> twists;
      for (const Path& path : paths) {
        Eigen::VectorXd tw = Eigen::VectorXd::Zero(6);
        for (const PathStep& step : path.steps) {
          const Joint& jt = t.joints()[step.joint];
          auto cols = joint_contribution(jt.kind, step.direction, cfg.joints[step.joint].position,
                                         cfg.joints[step.joint].axis(), cfg.task_point);
          int c = 0;
          for (VelComponent comp : components(jt.kind)) {
            const int col = inv.column_of({step.joint, comp});
            const double rate = col < static_cast<int>(inv.active.size())
                                    ? theta_a[col]
                                    : omega[col - inv.active.size()];
            tw += cols.col(c) * rate;
            ++c;
          }
        }
        twists.push_back(tw);
      }
      for (std::size_t p = 1; p < twists.size(); ++p)
        EXPECT_LT((twists[p] - twists[0]).lpNorm<Eigen::Infinity>(), 1e-9);

      // And the reduced Jacobian reproduces the first-path twist.
      const auto reduced = reduced_jacobian(parts);
      EXPECT_LT((reduced.J * theta_a - twists[0]).lpNorm<Eigen::Infinity>(), 1e-9);
    }
  }
}

TEST(ReducedJacobian, TranslationEquivariance) {
  const Topology t = testutil::topology_2d_m71();
  testutil::Rng rng(5);
  const Configuration cfg = testutil::generic_configuration(t, rng);
  Configuration shifted = cfg;
  const Vec3 offset(1.7, -2.3, 0.9);
  for (auto& p : shifted.joints) p.position += offset;
  shifted.task_point += offset;
  const auto j0 = reduced_jacobian(assemble_system(t, cfg)).J;
  const auto j1 = reduced_jacobian(assemble_system(t, shifted)).J;
  EXPECT_TRUE(j0.isApprox(j1, 1e-9));
}

TEST(ReducedJacobian, PrismaticLocationIndependence) {
  // Moving a prismatic joint does not change the Jacobian.
  auto r = raw("RP", {"L1", "L2", "L3"},
               {joint("j1", "revolute", "L1", "L2"), joint("j2", "prismatic", "L2", "L3")},
               "L1", "L3", {{"j1", "theta"}, {"j2", "d"}});
  const Topology t = build_topology(r);
  testutil::Rng rng(13);
  Configuration cfg = testutil::random_configuration(t, rng);
  Configuration moved = cfg;
  moved.joints[1].position = Vec3(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10));
  const auto j0 = reduced_jacobian(assemble_system(t, cfg)).J;
  const auto j1 = reduced_jacobian(assemble_system(t, moved)).J;
  EXPECT_TRUE(j0.isApprox(j1, 1e-12));
}

TEST(ReducedJacobian, PowerConservation) {
  for (const Topology& t : {testutil::topology_2d_m71(), testutil::topology_rssr(),
                            testutil::topology_3d_m1()}) {
    testutil::Rng rng(17);
    for (int i = 0; i < 30; ++i) {
      const Configuration cfg = testutil::generic_configuration(t, rng);
      const auto reduced = reduced_jacobian(assemble_system(t, cfg));
      Eigen::VectorXd rates(reduced.J.cols());
      Eigen::VectorXd wrench(6);
      for (int k = 0; k < rates.size(); ++k) rates[k] = rng.uniform(-1, 1);
      for (int k = 0; k < 6; ++k) wrench[k] = rng.uniform(-1, 1);
      const double task_power = wrench.dot(reduced.J * rates);
      const double joint_power = (reduced.J.transpose() * wrench).dot(rates);
      EXPECT_LT(std::abs(task_power - joint_power), 1e-12 * std::max(1.0, std::abs(task_power)));
    }
  }
}

TEST(ReducedJacobian, SingularA2Throws) {
  // Coincident revolute/cylindrical axes with matching positions make the
  // theta25 and theta35 closure columns exact negatives of each other.
  const Topology t = testutil::topology_2d_m71();
  Configuration cfg;
  cfg.task_point = Vec3(3, 4, 5);
  cfg.joints.resize(5);
  for (auto& p : cfg.joints) p = {{1, 1, 1}, 0, 0};
  cfg.joints[4] = cfg.joints[2];  // j25 coincides with j35, both axes +z
  const auto parts = assemble_system(t, cfg);
  EXPECT_NEAR(parts.A2.determinant(), 0.0, 1e-12);
  try {
    reduced_jacobian(parts);
    FAIL() << "expected SingularA2";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularA2);
  }
}

TEST(Type2, SerialHasNoMatrices) {
  const auto parts = assemble_system(topology_2r(), configuration_2r(1, 1, 0.2, 0.4));
  EXPECT_FALSE(type2_matrices(parts).has_value());
}

TEST(Type2, HandComputedTwoByTwo) {
  JacobianParts parts;
  parts.task_rows = 2;
  parts.path_count = 2;
  parts.J1 = Eigen::MatrixXd::Identity(2, 2);
  parts.J2 = Eigen::MatrixXd::Zero(2, 2);
  parts.A1 = Eigen::MatrixXd::Ones(2, 2);
  parts.A2 = Eigen::Vector2d(2, 3).asDiagonal();
  const auto type2 = type2_matrices(parts);
  ASSERT_TRUE(type2.has_value());
  EXPECT_TRUE(type2->A_tilde.isApprox(6 * Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_TRUE(type2->B_tilde.isApprox(-6 * parts.J1));
}

TEST(Type2, BTildeIsMinusDetTimesReduced) {
  const Topology t = testutil::topology_2d_m71();
  testutil::Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    const Configuration cfg = testutil::generic_configuration(t, rng);
    const auto parts = assemble_system(t, cfg);
    const auto reduced = reduced_jacobian(parts);
    const auto type2 = type2_matrices(parts);
    ASSERT_TRUE(type2.has_value());
    EXPECT_TRUE(type2->B_tilde.isApprox(-reduced.det_a2 * reduced.J, 1e-8));
    // A~ Xdot + B~ theta = 0 for any consistent pair.
    Eigen::VectorXd rates(reduced.J.cols());
    for (int k = 0; k < rates.size(); ++k) rates[k] = rng.uniform(-1, 1);
    const Eigen::VectorXd xdot = reduced.J * rates;
    const Eigen::VectorXd residual = type2->A_tilde * xdot + type2->B_tilde * rates;
    EXPECT_LT(residual.lpNorm<Eigen::Infinity>(),
              1e-9 * std::max(1.0, std::abs(reduced.det_a2) * xdot.norm()));
  }
}

TEST(Adjugate, MatchesDetTimesInverse) {
  testutil::Rng rng(31);
  for (int n = 1; n <= 7; ++n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-2, 2);
    const Eigen::MatrixXd adj = adjugate(m);
    EXPECT_TRUE((m * adj).isApprox(m.determinant() * Eigen::MatrixXd::Identity(n, n), 1e-9));
  }
  // Exact at a singular matrix.
  Eigen::MatrixXd s(2, 2);
  s << 1, 2, 2, 4;
  const Eigen::MatrixXd adj = adjugate(s);
  EXPECT_DOUBLE_EQ(adj(0, 0), 4);
  EXPECT_DOUBLE_EQ(adj(0, 1), -2);
  EXPECT_DOUBLE_EQ(adj(1, 0), -2);
  EXPECT_DOUBLE_EQ(adj(1, 1), 1);
}
