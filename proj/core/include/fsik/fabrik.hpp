#pragma once

#include "fsik/kinematics.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace fsik::fabrik {

enum class JointKind { Hinge, Ball };

// Hinge limits bound the signed inter-link angle about `axis`;
// ball limits bound the unsigned angle between consecutive links.
struct JointSpec {
  JointKind kind = JointKind::Ball;
  Vec3 axis = Vec3::UnitZ();
  JointLimit limit{-kPi, kPi};

  static JointSpec hinge(const Vec3& axis, JointLimit limit = {-kPi, kPi}) {
    return {JointKind::Hinge, axis.normalized(), limit};
  }
  static JointSpec ball(double cone = kPi) { return {JointKind::Ball, Vec3::UnitZ(), {0.0, cone}}; }
};

// positions[j] carries joints[j]; the last position is the free end.
// base_direction is the direction of the fixed link feeding into positions[0].
struct ChainState {
  std::vector<Vec3> positions;
  std::vector<double> link_lengths;
  std::vector<JointSpec> joints;
  Vec3 base = Vec3::Zero();
  Vec3 base_direction = Vec3::UnitZ();

  std::size_t size() const { return positions.size(); }
  const Vec3& end() const { return positions.back(); }
  double reach() const;
  void validate() const;
};

struct PhaseGeometry {
  double d = 0.0;
  double alpha = 0.0;
  double phi = 0.0;
  double delta_phi = 0.0;
};

enum class Status { Converged, NotConverged, Unreachable };

struct Options {
  double eps_tol = 1e-6;
  int iter_cap = 100;
  bool record_trace = false;
  // Extra distance tolerated by the reachability gate.
  double reach_slack = 0.0;
};

struct Outcome {
  Status status = Status::NotConverged;
  bool converged = false;
  int iterations = 0;
  double dist = 0.0;
  ChainState final;
  std::vector<std::pair<int, double>> trace;
};

struct PreBendOptions {
  double bend = 1e-3;
  double collinear_tol = 1e-6;
  double sign = 1.0;
  // Bend axis for ball joints; projected onto the plane normal to the link.
  std::optional<Vec3> axis_hint;
};

double clamp_correction(double phi, JointLimit limit);

Vec3 ball_joint_axis(const Vec3& p0, const Vec3& p1, const Vec3& p2);

ChainState forward_phase(const ChainState& chain, const Vec3& target,
                         std::vector<PhaseGeometry>* geometry = nullptr);

ChainState backward_phase(const ChainState& chain, std::vector<PhaseGeometry>* geometry = nullptr);

bool is_collinear(const ChainState& chain, double tol);

ChainState pre_bend(const ChainState& chain, const Vec3& target, const PreBendOptions& options = {});

Outcome solve(const ChainState& chain, const Vec3& target, const Options& options);

// Inter-link angle at joint j measured with the joint's own convention.
double joint_angle(const ChainState& chain, std::size_t j);

}  // namespace fsik::fabrik
