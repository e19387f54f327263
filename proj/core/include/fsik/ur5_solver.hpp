#pragma once

#include "fsik/fabrik.hpp"
#include "fsik/solver.hpp"

#include <array>
#include <optional>
#include <vector>

namespace fsik::ur5 {

struct PlanarFrame {
  double theta1 = 0.0;
  Vec3 v_init;
  Vec3 z2d;
  Vec3 x1d;
  std::array<Vec3, 2> l5d;
  std::array<Vec3, 2> targets;
  Vec3 p_w_proj;
  Vec3 p1;
  bool degenerate = false;
};

struct ElbowResult {
  double theta2 = 0.0;
  double theta3 = 0.0;
  Vec3 l2d;
  Vec3 l3d;
  double f = 0.0;
  int iterations = 0;
  bool success = false;
};

Vec3 wrist_position(const Transform& t_des, const RobotModel& model);

// Empty when the wrist lies inside the l4 cylinder.
std::vector<double> theta1_candidates(const Vec3& p_w, const RobotModel& model);

PlanarFrame planar_frame(double theta1, const Transform& t_des, const Vec3& p_w, const RobotModel& model);

// Elbow point of the reduced two-link chain.
Vec3 elbow_point(double theta1, double theta2, double theta3, const RobotModel& model);

// Reduced chain rooted at (0, 0, l1) and lying in the plane normal to z2d.
fabrik::ChainState make_chain(const PlanarFrame& frame, const RobotModel& model, const JointVector* theta_init);

JointVector recover_angles(const Vec3& l2d, const Vec3& l3d, const PlanarFrame& frame, int l5_branch,
                           const Transform& t_des, const RobotModel& model);

ElbowResult elbow_optimize(double theta1, const Vec3& target, double seed2, double seed3, const RobotModel& model,
                           double eps_tol, int max_iters);

// +1 or -1: the elbow side the pre-bend should favour.
double bend_sign(const PlanarFrame& frame, const Vec3& target, const JointVector& theta_init);

IKResult solve(const IKQuery& query, const RobotModel& model, const SolverConfig& config);

}  // namespace fsik::ur5
