#pragma once

#include "fsik/fabrik.hpp"
#include "fsik/kinematics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fsik {

enum class SolveStatus { Solved, Unreachable, Failed };
enum class SolveMode { Combined, FabrikOnly };

// Straight: the reduced chain starts fully extended along v_init.
// FromInitial: the reduced chain starts at the configuration of theta_init.
enum class ChainInit { Straight, FromInitial };

struct SolverConfig {
  double eps_tol = 1e-6;
  int n_l = 5;
  int n_max = 100;
  int opt_max_iters = 200;
  SolveMode mode = SolveMode::Combined;
  ChainInit chain_init = ChainInit::Straight;
  double pre_bend = 1e-3;
  // KUKA only: initial chain direction.
  Vec3 v_init = Vec3::UnitZ();
  // KUKA only: cone half-angle of the shoulder ball joint.
  double shoulder_cone = kPi;
  bool record_trace = false;

  static SolverConfig defaults_for(RobotKind kind);
  void validate() const;
};

struct IKQuery {
  Transform t_des;
  JointVector theta_init;
};

struct Candidate {
  std::vector<int> signs;
  JointVector theta;
  double mismatch = 0.0;
  bool admitted = false;
  int fabrik_iterations = 0;
  bool optimizer_used = false;
  int optimizer_iterations = 0;
};

struct IKResult {
  SolveStatus status = SolveStatus::Failed;
  JointVector theta;
  CartesianError error;
  int fabrik_iterations = 0;
  bool optimizer_used = false;
  int optimizer_iterations = 0;
  double solve_time = 0.0;
  std::vector<Candidate> candidates;
  // FABRIK (n, dist) series of the first reachable branch, when requested.
  std::vector<std::pair<int, double>> trace;

  int total_steps() const { return fabrik_iterations + optimizer_iterations; }
};

const char* to_string(SolveStatus status);
const char* to_string(SolveMode mode);

// Dispatches to the robot-specific pipeline and stamps solve_time.
IKResult solve(const RobotModel& model, const IKQuery& query, const SolverConfig& config);

namespace detail {

// Fills status, theta, error and counters from the candidate list.
void select_candidate(const RobotModel& model, const IKQuery& query, double eps_tol, IKResult& result,
                      bool any_reachable);

// Box for the fallback optimizer around `seed`; a full-turn joint range is
// re-centred on the seed so the wrap point never acts as a wall.
JointLimit optimizer_bound(const JointLimit& limit, double seed);

}  // namespace detail
}  // namespace fsik
