#pragma once

#include "fsik/fabrik.hpp"
#include "fsik/solver.hpp"

#include <array>
#include <vector>

namespace fsik::kuka {

struct ElbowMagnitudes {
  double theta2 = 0.0;
  double theta4 = 0.0;
  double theta6 = 0.0;
};

struct WristAngles {
  double theta5 = 0.0;
  double theta6 = 0.0;
  double theta7 = 0.0;
};

struct WristJacobian {
  Vec3 p3;
  Eigen::Matrix<double, 3, 4> jacobian;
};

struct WristOptResult {
  Eigen::Vector4d theta = Eigen::Vector4d::Zero();
  Vec3 p2;
  Vec3 p3;
  Vec3 l2d;
  Vec3 l3d;
  double f = 0.0;
  int iterations = 0;
  bool success = false;
};

Vec3 wrist_target(const Transform& t_des, const RobotModel& model);

Vec3 shoulder_point(const RobotModel& model);

// Unsigned joint angles at the shoulder, elbow and wrist of the chain
// origin -> p1 -> p2 -> p3 -> p4 (shoulder, elbow, wrist, flange).
ElbowMagnitudes elbow_magnitudes(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                                 const RobotModel& model);

// `fallback` is used when theta2 is singular and theta1 is undetermined.
double recover_theta1(const Vec3& p2, double theta2, const RobotModel& model, double fallback);

double recover_theta3(double theta1, double theta2, double theta4, const Vec3& p3, const RobotModel& model,
                      double fallback);

// sign6 and sign7 pick the branch of theta6 and theta7.
WristAngles recover_theta5_theta7(const Eigen::Vector4d& theta1_4, int sign6, int sign7, const Transform& t_des,
                                  const RobotModel& model, double fallback5);

WristJacobian wrist_analytic(const Eigen::Vector4d& theta1_4, const RobotModel& model);

// Link directions (shoulder->elbow, elbow->wrist) from the first four joints.
std::array<Vec3, 2> link_directions(const Eigen::Vector4d& theta1_4, const RobotModel& model);

WristOptResult wrist_optimize(const Eigen::Vector4d& seeds, const Vec3& target, const RobotModel& model,
                              double eps_tol, int max_iters);

struct BranchAngles {
  std::array<int, 4> signs{};
  JointVector theta;
};

// All 16 sign branches of (theta2, theta4, theta6, theta7), (+,+,+,+) first.
std::vector<BranchAngles> recover_all(const Vec3& p2, const Vec3& p3, const Transform& t_des, const RobotModel& model,
                                      const JointVector& theta_init);

fabrik::ChainState make_chain(const RobotModel& model, const SolverConfig& config, const JointVector* theta_init);

IKResult solve(const IKQuery& query, const RobotModel& model, const SolverConfig& config);

}  // namespace fsik::kuka
