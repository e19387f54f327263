#include "fsik/solver.hpp"

#include "fsik/kuka_solver.hpp"
#include "fsik/ur5_solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace fsik {

SolverConfig SolverConfig::defaults_for(RobotKind kind) {
  SolverConfig c;
  c.n_l = kind == RobotKind::UR5 ? 5 : 15;
  return c;
}

void SolverConfig::validate() const {
  if (!(eps_tol > 0.0) || !std::isfinite(eps_tol)) throw ContractViolation("solver config: eps_tol must be > 0");
  if (n_l < 1) throw ContractViolation("solver config: n_l must be >= 1");
  if (n_max < 1) throw ContractViolation("solver config: n_max must be >= 1");
  if (opt_max_iters < 0) throw ContractViolation("solver config: opt_max_iters must be >= 0");
  if (!(pre_bend >= 0.0)) throw ContractViolation("solver config: pre_bend must be >= 0");
  if (!(v_init.norm() > 0.0)) throw ContractViolation("solver config: v_init must be nonzero");
  if (!(shoulder_cone > 0.0)) throw ContractViolation("solver config: shoulder_cone must be > 0");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Solved: return "Solved";
    case SolveStatus::Unreachable: return "Unreachable";
    case SolveStatus::Failed: return "Failed";
  }
  return "?";
}

const char* to_string(SolveMode mode) { return mode == SolveMode::Combined ? "combined" : "fabrik"; }

IKResult solve(const RobotModel& model, const IKQuery& query, const SolverConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  IKResult r = model.kind == RobotKind::UR5 ? ur5::solve(query, model, config) : kuka::solve(query, model, config);
  r.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace detail {

void select_candidate(const RobotModel& model, const IKQuery& query, double eps_tol, IKResult& result,
                      bool any_reachable) {
  const Candidate* best = nullptr;
  double best_l1 = std::numeric_limits<double>::infinity();
  const Candidate* closest = nullptr;
  for (auto& c : result.candidates) {
    c.admitted = c.mismatch <= eps_tol && within_limits(model, c.theta);
    if (!closest || c.mismatch < closest->mismatch) closest = &c;
    if (!c.admitted) continue;
    const double l1 = l1_distance(c.theta, query.theta_init);
    if (l1 < best_l1) {
      best_l1 = l1;
      best = &c;
    }
  }
  if (best) {
    result.status = SolveStatus::Solved;
    result.theta = best->theta;
    result.fabrik_iterations = best->fabrik_iterations;
    result.optimizer_used = best->optimizer_used;
    result.optimizer_iterations = best->optimizer_iterations;
  } else {
    result.status = any_reachable ? SolveStatus::Failed : SolveStatus::Unreachable;
    result.theta = closest ? closest->theta : query.theta_init;
    for (const auto& c : result.candidates) {
      result.fabrik_iterations = std::max(result.fabrik_iterations, c.fabrik_iterations);
      result.optimizer_used = result.optimizer_used || c.optimizer_used;
      result.optimizer_iterations = std::max(result.optimizer_iterations, c.optimizer_iterations);
    }
  }
  result.error = cartesian_error(forward_kinematics(model, result.theta), query.t_des);
}

JointLimit optimizer_bound(const JointLimit& limit, double seed) {
  if (limit.hi - limit.lo >= 2.0 * kPi) return {seed - kPi, seed + kPi};
  return {limit.lo, limit.hi};
}

}  // namespace detail
}  // namespace fsik
