#pragma once

#include "fsik/solver.hpp"

#include <string>
#include <vector>

namespace fsik::tracking {

struct Waypoint {
  int phase = 1;
  Transform pose;
};

struct Record {
  int index = 0;
  int phase = 1;
  SolveStatus status = SolveStatus::Failed;
  JointVector theta_init;
  JointVector theta;
  double eps_pos = 0.0;
  double eps_rot = 0.0;
  bool optimizer_used = false;
  double time_seconds = 0.0;
};

struct Trace {
  std::vector<Record> records;
  int phase1_points = 0;
  int phase2_points = 0;
  int dof = 0;
  SolveStatus status = SolveStatus::Solved;
  int failed_index = -1;
};

struct Scenario {
  JointVector theta_init;
  JointVector theta_end;
  int phase1_points = 80;
  int phase2_points = 100;

  static Scenario defaults_for(RobotKind kind);
};

// Base point and end point of the reduced two-link chain at theta.
Vec3 reduced_chain_base(const RobotModel& model);
Vec3 reduced_chain_end(const RobotModel& model, const JointVector& theta);

// Direction of the fully stretched reduced chain that the first phase drives towards.
Vec3 extension_direction(const RobotModel& model, const JointVector& theta_init);

std::vector<Vec3> build_phase1_path(const RobotModel& model, const JointVector& theta_init, int n_points);

// End-effector poses whose reduced-chain end follows `points` with the
// orientation of FK(theta_init) held fixed.
std::vector<Transform> phase1_poses(const RobotModel& model, const JointVector& theta_init,
                                    const std::vector<Vec3>& points);

std::vector<Transform> build_phase2_path(const RobotModel& model, const JointVector& theta_start,
                                         const JointVector& theta_end, int n_points);

Trace track(const RobotModel& model, const JointVector& theta_init, const std::vector<Waypoint>& waypoints,
            const SolverConfig& config);

// Both phases of the scripted scenario; phase 2 starts at the zero configuration.
Trace run_scenario(const RobotModel& model, const Scenario& scenario, const SolverConfig& config);

// Solver settings used for tracking: warm-started chains and the robot's default n_l.
SolverConfig tracking_config(RobotKind kind);

void write_trace_csv(const Trace& trace, const std::string& path);

}  // namespace fsik::tracking
