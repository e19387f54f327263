#include "fsik/benchmark.hpp"
#include "fsik/kuka_solver.hpp"

#include "../support/golden.hpp"
#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fsik;

namespace {

const RobotModel& km() {
  static const RobotModel m = builtin_model(RobotKind::KUKA);
  return m;
}

JointVector random_theta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  JointVector t(7);
  for (int i = 0; i < 7; ++i) t[i] = u(rng);
  return t;
}

Vec3 origin(const JointVector& th, int links) { return forward_kinematics_prefix(km(), th, links).translation; }

}  // namespace

TEST(KukaWristTarget, SimplePoses) {
  Transform t;
  t.translation = Vec3(0, 0, 1.306);
  EXPECT_NEAR((kuka::wrist_target(t, km()) - Vec3(0, 0, 1.18)).norm(), 0.0, 1e-12);
  Transform f;
  f.rotation = Eigen::AngleAxisd(kPi, Vec3::UnitX()).toRotationMatrix();
  EXPECT_NEAR((kuka::wrist_target(f, km()) - Vec3(0, 0, 0.126)).norm(), 0.0, 1e-12);
}

TEST(KukaWristTarget, GoldenPoseByMatrixVectorScript) {
  const Transform t = golden::corrected(golden::kuka_reference());
  const Vec3 w = kuka::wrist_target(t, km());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(w[i], t.translation[i] - 0.126 * t.rotation(i, 2), 1e-15);
}

TEST(KukaWristTarget, IsPrefixFiveOrigin) {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 100; ++k) {
    const JointVector th = random_theta(rng);
    EXPECT_NEAR((kuka::wrist_target(forward_kinematics(km(), th), km()) - origin(th, 5)).norm(), 0.0, 1e-12);
  }
}

TEST(KukaMagnitudes, ExtendedAndRightAngle) {
  const auto z = kuka::elbow_magnitudes(Vec3(0, 0, 0.36), Vec3(0, 0, 0.78), Vec3(0, 0, 1.18), Vec3(0, 0, 1.306), km());
  EXPECT_NEAR(z.theta2, 0.0, 1e-15);
  EXPECT_NEAR(z.theta4, 0.0, 1e-15);
  EXPECT_NEAR(z.theta6, 0.0, 1e-15);
  const auto r = kuka::elbow_magnitudes(Vec3(0, 0, 0.36), Vec3(0, 0, 0.78), Vec3(0.42, 0, 0.78),
                                        Vec3(0.42, 0, 0.906), km());
  EXPECT_NEAR(r.theta4, kPi / 2, 1e-12);
  EXPECT_NEAR(r.theta6, kPi / 2, 1e-12);
}

TEST(KukaMagnitudes, MatchLawOfCosinesAndGeneratingAngles) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 200; ++k) {
    const JointVector th = random_theta(rng);
    const Vec3 p1(0, 0, km().l(1)), p2 = origin(th, 3), p3 = origin(th, 5), p4 = origin(th, 7);
    const auto m = kuka::elbow_magnitudes(p1, p2, p3, p4, km());
    EXPECT_NEAR(m.theta2, std::abs(th[1]), 1e-9);
    EXPECT_NEAR(m.theta4, std::abs(th[3]), 1e-9);
    EXPECT_NEAR(m.theta6, std::abs(th[5]), 1e-9);
    const double l3 = km().l(2), l4 = km().l(3);
    const double cosine = (l3 * l3 + l4 * l4 - (p3 - p1).squaredNorm()) / (2 * l3 * l4);
    EXPECT_NEAR(m.theta4, std::abs(kPi - std::acos(std::clamp(cosine, -1.0, 1.0))), 1e-6);
  }
}

TEST(KukaRecover, Theta1Symmetry) {
  const double s = std::sin(0.5), c = std::cos(0.5);
  const Vec3 p2 = Vec3(0, 0, km().l(1)) + km().l(2) * Vec3(0, s, c);
  EXPECT_NEAR(kuka::recover_theta1(p2, 0.5, km(), 0.0), kPi / 2, 1e-12);
  EXPECT_NEAR(kuka::recover_theta1(p2, -0.5, km(), 0.0), -kPi / 2, 1e-12);
  EXPECT_EQ(kuka::recover_theta1(Vec3(0, 0, 0.78), 0.0, km(), 0.25), 0.25);
}

TEST(KukaRecover, FkRoundTrips) {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 100; ++k) {
    const JointVector th = random_theta(rng);
    const Transform t = forward_kinematics(km(), th);
    EXPECT_NEAR(wrap_angle(kuka::recover_theta1(origin(th, 3), th[1], km(), 0.0) - th[0]), 0.0, 1e-9);
    EXPECT_NEAR(wrap_angle(kuka::recover_theta3(th[0], th[1], th[3], origin(th, 5), km(), 0.0) - th[2]), 0.0, 1e-9);
    const Eigen::Vector4d t4 = th.head<4>();
    bool found = false;
    for (int s6 : {1, -1}) {
      for (int s7 : {1, -1}) {
        const auto w = kuka::recover_theta5_theta7(t4, s6, s7, t, km(), 0.0);
        found = found || (std::abs(wrap_angle(w.theta5 - th[4])) < 1e-9 && std::abs(w.theta6 - th[5]) < 1e-9 &&
                          std::abs(wrap_angle(w.theta7 - th[6])) < 1e-9);
      }
    }
    EXPECT_TRUE(found) << k;
  }
}

TEST(KukaRecover, Theta3ZeroAtZeroPose) {
  JointVector th = JointVector::Zero(7);
  th[1] = 0.6;
  th[3] = 0.9;
  EXPECT_NEAR(kuka::recover_theta3(th[0], th[1], th[3], origin(th, 5), km(), 1.0), 0.0, 1e-12);
}

TEST(KukaRecover, Theta7ZeroWhenAxesAgree) {
  JointVector th = JointVector::Zero(7);
  th << 0.3, 0.7, -0.2, 1.1, 0.4, 0.9, 0.0;
  const auto w = kuka::recover_theta5_theta7(th.head<4>(), 1, 1, forward_kinematics(km(), th), km(), 0.0);
  EXPECT_NEAR(w.theta7, 0.0, 1e-7);
}

TEST(KukaWristAnalytic, ZeroConfiguration) {
  const auto w = kuka::wrist_analytic(Eigen::Vector4d::Zero(), km());
  EXPECT_NEAR((w.p3 - Vec3(0, 0, 1.18)).norm(), 0.0, 1e-15);
}

TEST(KukaWristAnalytic, MatchesPrefixFkAndFiniteDifferences) {
  std::mt19937_64 rng(44);
  for (int k = 0; k < 100; ++k) {
    const JointVector th = random_theta(rng);
    const Eigen::Vector4d t4 = th.head<4>();
    const auto w = kuka::wrist_analytic(t4, km());
    std::vector<double> raw(th.data(), th.data() + 7);
    const oracle::M4 o = oracle::chain(oracle::kuka_table(), raw, 5);
    EXPECT_NEAR(w.p3.x(), o[0][3], 1e-10);
    EXPECT_NEAR(w.p3.y(), o[1][3], 1e-10);
    EXPECT_NEAR(w.p3.z(), o[2][3], 1e-10);
    for (int i = 0; i < 4; ++i) {
      Eigen::Vector4d a = t4, b = t4;
      a[i] += 1e-6;
      b[i] -= 1e-6;
      const Vec3 fd = (kuka::wrist_analytic(a, km()).p3 - kuka::wrist_analytic(b, km()).p3) / 2e-6;
      EXPECT_LE((w.jacobian.col(i) - fd).norm(), 1e-4 * std::max(fd.norm(), 1e-6));
    }
  }
}

TEST(KukaWristOptimize, SatisfiedSeedReturnsImmediately) {
  const Eigen::Vector4d s(0.2, 0.8, -0.4, 1.0);
  const auto r = kuka::wrist_optimize(s, kuka::wrist_analytic(s, km()).p3, km(), 1e-6, 200);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_TRUE(r.success);
}

TEST(KukaWristOptimize, NearbySeedsReachRandomTargets) {
  std::mt19937_64 rng(45);
  int ok = 0;
  for (int k = 0; k < 100; ++k) {
    JointVector th = random_theta(rng);
    for (int i = 0; i < 7; ++i) th[i] = std::clamp(th[i], km().limits[i].lo, km().limits[i].hi);
    const JointVector seed = th + 0.1 * random_theta(rng);
    const Vec3 target = origin(th, 5);
    const auto r = kuka::wrist_optimize(seed.head<4>(), target, km(), 1e-6, 200);
    if (!r.success) continue;
    ++ok;
    JointVector full = JointVector::Zero(7);
    full.head<4>() = r.theta;
    EXPECT_LE((origin(full, 5) - target).norm(), 1e-6);
    EXPECT_NEAR((r.p3 - target).norm(), std::sqrt(r.f), 1e-12);
    EXPECT_NEAR((r.p2 - origin(full, 3)).norm(), 0.0, 1e-12);
  }
  EXPECT_GE(ok, 99);
}

TEST(KukaSolve, OwnPoseFromInitialChainIsExact) {
  std::mt19937_64 rng(46);
  SolverConfig c = SolverConfig::defaults_for(RobotKind::KUKA);
  c.chain_init = ChainInit::FromInitial;
  for (int k = 0; k < 50; ++k) {
    const JointVector th = random_theta(rng);
    const IKResult r = solve(km(), IKQuery{forward_kinematics(km(), th), th}, c);
    ASSERT_EQ(r.status, SolveStatus::Solved);
    EXPECT_LE(r.error.mismatch(), 1e-10);
    EXPECT_EQ(r.fabrik_iterations, 0);
  }
}

TEST(KukaSolve, SixteenBranchesAndSelection) {
  const Transform t = forward_kinematics(km(), golden::kuka_theta());
  const IKResult r = solve(km(), IKQuery{t, JointVector::Zero(7)}, SolverConfig::defaults_for(RobotKind::KUKA));
  ASSERT_EQ(r.status, SolveStatus::Solved);
  ASSERT_EQ(r.candidates.size(), 16u);
  EXPECT_EQ(r.candidates.front().signs, (std::vector<int>{1, 1, 1, 1}));
  EXPECT_EQ(r.candidates.back().signs, (std::vector<int>{-1, -1, -1, -1}));
  double best = 1e9;
  for (const auto& c : r.candidates) {
    if (c.admitted) best = std::min(best, l1_distance(c.theta, JointVector::Zero(7)));
  }
  EXPECT_EQ(l1_distance(r.theta, JointVector::Zero(7)), best);
  EXPECT_LE(r.error.eps_rot, 1e-9);
  // the selected vector reaches the same wrist point as the golden one
  EXPECT_LE((origin(r.theta, 5) - origin(golden::kuka_theta(), 5)).norm(), 1e-6);
}

TEST(KukaSolve, RandomQueriesSoundWithExactOrientation) {
  const auto qs = bench::generate_queries(km(), 500, 91);
  int solved = 0;
  for (const auto& q : qs.queries) {
    const IKResult r = solve(km(), IKQuery{q.t_des, q.theta_init}, SolverConfig::defaults_for(RobotKind::KUKA));
    if (r.status != SolveStatus::Solved) continue;
    ++solved;
    ASSERT_LE(pose_mismatch(km(), r.theta, q.t_des), 1e-6);
    ASSERT_LE(r.error.eps_rot, 1e-9);
    ASSERT_TRUE(within_limits(km(), r.theta));
  }
  EXPECT_GE(solved, 495);
}

TEST(KukaSolve, FarPoseIsUnreachable) {
  Transform t;
  t.translation = Vec3(0.0, 0.0, 3.0);
  const IKResult r = solve(km(), IKQuery{t, JointVector::Zero(7)}, SolverConfig::defaults_for(RobotKind::KUKA));
  EXPECT_EQ(r.status, SolveStatus::Unreachable);
}
