#include "fsik/tracking.hpp"

#include "fsik/csv.hpp"

#include <cmath>

namespace fsik::tracking {

Scenario Scenario::defaults_for(RobotKind kind) {
  Scenario s;
  if (kind == RobotKind::UR5) {
    s.theta_init.resize(6);
    s.theta_init << 0.0, -0.959, 2.05, -1.091, 0.0, 0.0;
    s.theta_end.resize(6);
    s.theta_end << -0.179, 0.581, 2.8, -2.308, -1.028, 2.185;
  } else {
    s.theta_init.resize(7);
    s.theta_init << 0.0, 1.0, 0.0, -2.084, 0.0, 1.084, 0.0;
    s.theta_end.resize(7);
    s.theta_end << 1.953, -0.711, -1.608, 1.648, -0.888, 0.782, 0.893;
  }
  return s;
}

Vec3 reduced_chain_base(const RobotModel& model) { return {0.0, 0.0, model.l(1)}; }

Vec3 reduced_chain_end(const RobotModel& model, const JointVector& theta) {
  return forward_kinematics_prefix(model, theta, model.kind == RobotKind::UR5 ? 3 : 5).translation;
}

Vec3 extension_direction(const RobotModel& model, const JointVector& theta_init) {
  if (model.kind == RobotKind::UR5) return {-std::cos(theta_init[0]), -std::sin(theta_init[0]), 0.0};
  return Vec3::UnitZ();
}

std::vector<Vec3> build_phase1_path(const RobotModel& model, const JointVector& theta_init, int n_points) {
  if (n_points < 2) throw ContractViolation("build_phase1_path needs at least 2 points");
  const Vec3 base = reduced_chain_base(model);
  const Vec3 v = extension_direction(model, theta_init);
  const double reach = model.l(2) + model.l(3);
  const double s0 = (reduced_chain_end(model, theta_init) - base).dot(v);
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double s = s0 + (reach - s0) * static_cast<double>(k) / static_cast<double>(n_points - 1);
    pts.push_back(base + s * v);
  }
  return pts;
}

std::vector<Transform> phase1_poses(const RobotModel& model, const JointVector& theta_init,
                                    const std::vector<Vec3>& points) {
  const Transform start = forward_kinematics(model, theta_init);
  const Vec3 p3 = reduced_chain_end(model, theta_init);
  std::vector<Transform> poses;
  poses.reserve(points.size());
  for (const Vec3& p : points) {
    Transform t = start;
    t.translation += p - p3;
    poses.push_back(t);
  }
  return poses;
}

std::vector<Transform> build_phase2_path(const RobotModel& model, const JointVector& theta_start,
                                         const JointVector& theta_end, int n_points) {
  if (n_points < 2) throw ContractViolation("build_phase2_path needs at least 2 points");
  if (theta_start.size() != model.dof() || theta_end.size() != model.dof()) {
    throw ContractViolation("build_phase2_path: joint vectors must match the model dof");
  }
  std::vector<Transform> poses;
  poses.reserve(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n_points - 1);
    poses.push_back(forward_kinematics(model, theta_start + s * (theta_end - theta_start)));
  }
  return poses;
}

Trace track(const RobotModel& model, const JointVector& theta_init, const std::vector<Waypoint>& waypoints,
            const SolverConfig& config) {
  Trace trace;
  trace.dof = model.dof();
  for (const auto& w : waypoints) (w.phase == 1 ? trace.phase1_points : trace.phase2_points)++;
  JointVector prev = theta_init;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const IKResult r = solve(model, IKQuery{waypoints[i].pose, prev}, config);
    Record rec;
    rec.index = static_cast<int>(i);
    rec.phase = waypoints[i].phase;
    rec.status = r.status;
    rec.theta_init = prev;
    rec.theta = r.theta;
    rec.eps_pos = r.error.eps_pos;
    rec.eps_rot = r.error.eps_rot;
    rec.optimizer_used = r.optimizer_used;
    rec.time_seconds = r.solve_time;
    trace.records.push_back(rec);
    if (r.status != SolveStatus::Solved) {
      trace.status = r.status;
      trace.failed_index = static_cast<int>(i);
      break;
    }
    prev = r.theta;
  }
  return trace;
}

Trace run_scenario(const RobotModel& model, const Scenario& scenario, const SolverConfig& config) {
  std::vector<Waypoint> wps;
  const auto pts = build_phase1_path(model, scenario.theta_init, scenario.phase1_points);
  for (const auto& pose : phase1_poses(model, scenario.theta_init, pts)) wps.push_back({1, pose});
  const JointVector zero = JointVector::Zero(model.dof());
  for (const auto& pose : build_phase2_path(model, zero, scenario.theta_end, scenario.phase2_points)) {
    wps.push_back({2, pose});
  }
  return track(model, scenario.theta_init, wps, config);
}

SolverConfig tracking_config(RobotKind kind) {
  SolverConfig c = SolverConfig::defaults_for(kind);
  c.chain_init = ChainInit::FromInitial;
  return c;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  auto out = open_output(path);
  const int k = trace.dof;
  out << "index,phase";
  for (int i = 1; i <= k; ++i) out << ",theta_" << i;
  out << ",eps_pos,eps_rot,opt_used,time_seconds\n";
  for (const auto& r : trace.records) {
    out << r.index << ',' << r.phase;
    for (Eigen::Index i = 0; i < r.theta.size(); ++i) out << ',' << format_double(r.theta[i]);
    out << ',' << format_double(r.eps_pos) << ',' << format_double(r.eps_rot) << ',' << (r.optimizer_used ? 1 : 0)
        << ',' << format_double(r.time_seconds) << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace fsik::tracking
