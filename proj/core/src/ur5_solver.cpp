#include "fsik/ur5_solver.hpp"

#include "fsik/sqp.hpp"

#include <cmath>

namespace fsik::ur5 {
namespace {

constexpr double kDegenerateWrist = 1e-8;
constexpr double kDuplicateTheta1 = 1e-9;

void check_model(const RobotModel& model) {
  if (model.kind != RobotKind::UR5) throw ContractViolation("ur5 solver needs a ur5 model");
}

Vec3 z2d_of(double theta1) { return {std::sin(theta1), -std::cos(theta1), 0.0}; }
Vec3 x1d_of(double theta1) { return {std::cos(theta1), std::sin(theta1), 0.0}; }

}  // namespace

Vec3 wrist_position(const Transform& t_des, const RobotModel& model) {
  return t_des.translation - t_des.rotation * Vec3(0.0, 0.0, model.l(6));
}

std::vector<double> theta1_candidates(const Vec3& p_w, const RobotModel& model) {
  const double rho = std::hypot(p_w.x(), p_w.y());
  const double l4 = model.l(4);
  if (rho < l4) return {};
  const double c = std::acos(std::min(1.0, l4 / rho));
  const double base = kPi / 2.0 + std::atan2(p_w.y(), p_w.x());
  const double a = wrap_angle(c + base);
  const double b = wrap_angle(-c + base);
  if (std::abs(wrap_angle(a - b)) < kDuplicateTheta1) return {a};
  return {a, b};
}

PlanarFrame planar_frame(double theta1, const Transform& t_des, const Vec3& p_w, const RobotModel& model) {
  PlanarFrame f;
  f.theta1 = theta1;
  f.z2d = z2d_of(theta1);
  f.x1d = x1d_of(theta1);
  f.v_init = -f.x1d;
  f.p1 = Vec3(0.0, 0.0, model.l(1));

  const Vec3 l6d = t_des.rotation.col(2);
  const Vec3 c = f.z2d.cross(l6d);
  f.degenerate = c.norm() < kDegenerateWrist;
  const Vec3 l5 = f.degenerate ? Vec3(t_des.rotation.col(0).cross(f.z2d).normalized()) : Vec3(c.normalized());
  f.l5d = {l5, -l5};

  f.p_w_proj = p_w - (p_w - f.p1).dot(f.z2d) * f.z2d;
  for (int b = 0; b < 2; ++b) f.targets[static_cast<std::size_t>(b)] = f.p_w_proj - model.l(5) * f.l5d[static_cast<std::size_t>(b)];
  return f;
}

Vec3 elbow_point(double theta1, double theta2, double theta3, const RobotModel& model) {
  const double l1 = model.l(1), l2 = model.l(2), l3 = model.l(3);
  const double r = l2 * std::cos(theta2) + l3 * std::cos(theta2 + theta3);
  const double h = l2 * std::sin(theta2) + l3 * std::sin(theta2 + theta3);
  return {-std::cos(theta1) * r, -std::sin(theta1) * r, l1 - h};
}

fabrik::ChainState make_chain(const PlanarFrame& frame, const RobotModel& model, const JointVector* theta_init) {
  const double l2 = model.l(2), l3 = model.l(3);
  fabrik::ChainState c;
  c.base = frame.p1;
  c.base_direction = frame.v_init;
  c.link_lengths = {l2, l3};
  c.joints = {fabrik::JointSpec::hinge(frame.z2d, model.limits[1]), fabrik::JointSpec::hinge(frame.z2d, model.limits[2])};
  Vec3 d2 = frame.v_init, d3 = frame.v_init;
  if (theta_init) {
    d2 = rotate_about_axis(frame.z2d, (*theta_init)[1], frame.v_init);
    d3 = rotate_about_axis(frame.z2d, (*theta_init)[1] + (*theta_init)[2], frame.v_init);
  }
  const Vec3 p2 = frame.p1 + l2 * d2;
  c.positions = {frame.p1, p2, p2 + l3 * d3};
  return c;
}

JointVector recover_angles(const Vec3& l2d, const Vec3& l3d, const PlanarFrame& frame, int l5_branch,
                           const Transform& t_des, const RobotModel& model) {
  const Vec3& l5d = frame.l5d[static_cast<std::size_t>(l5_branch)];
  JointVector th = JointVector::Zero(6);
  th[0] = frame.theta1;
  th[1] = signed_angle(frame.v_init, l2d, frame.z2d);
  th[2] = signed_angle(l2d, l3d, frame.z2d);
  th[3] = signed_angle(l3d, l5d, frame.z2d) - kPi / 2.0;
  if (!frame.degenerate) {
    const Vec3 l6d = t_des.rotation.col(2);
    th[4] = signed_angle(frame.z2d, l6d, l5d);
    const Transform t5 = forward_kinematics_prefix(model, th, 5);
    th[5] = signed_angle(t5.rotation.col(0), t_des.rotation.col(0), l6d);
  }
  return wrap_angles(th);
}

ElbowResult elbow_optimize(double theta1, const Vec3& target, double seed2, double seed3, const RobotModel& model,
                           double eps_tol, int max_iters) {
  const double l2 = model.l(2), l3 = model.l(3);
  const double c1 = std::cos(theta1), s1 = std::sin(theta1);

  sqp::Problem p;
  p.x0 = Eigen::Vector2d(seed2, seed3);
  const JointLimit b2 = detail::optimizer_bound(model.limits[1], seed2);
  const JointLimit b3 = detail::optimizer_bound(model.limits[2], seed3);
  p.lower = Eigen::Vector2d(b2.lo, b3.lo);
  p.upper = Eigen::Vector2d(b2.hi, b3.hi);
  p.x0 = p.x0.cwiseMax(p.lower).cwiseMin(p.upper);
  p.objective = [&](const sqp::Vector& x, sqp::Vector& g) {
    const Vec3 r = elbow_point(theta1, x[0], x[1], model) - target;
    const double s2 = std::sin(x[0]), c2 = std::cos(x[0]);
    const double s23 = std::sin(x[0] + x[1]), c23 = std::cos(x[0] + x[1]);
    const Vec3 j2(c1 * (l2 * s2 + l3 * s23), s1 * (l2 * s2 + l3 * s23), -(l2 * c2 + l3 * c23));
    const Vec3 j3(c1 * l3 * s23, s1 * l3 * s23, -l3 * c23);
    g[0] = 2.0 * r.dot(j2);
    g[1] = 2.0 * r.dot(j3);
    return r.squaredNorm();
  };
  const sqp::Result res = sqp::minimize(p, eps_tol * eps_tol, max_iters);

  ElbowResult out;
  out.theta2 = res.x[0];
  out.theta3 = res.x[1];
  out.f = res.f;
  out.iterations = res.iterations;
  out.success = res.f <= eps_tol * eps_tol;
  const Vec3 v = -x1d_of(theta1);
  const Vec3 z = z2d_of(theta1);
  out.l2d = rotate_about_axis(z, out.theta2, v);
  out.l3d = rotate_about_axis(z, out.theta2 + out.theta3, v);
  return out;
}

double bend_sign(const PlanarFrame& frame, const Vec3& target, const JointVector& theta_init) {
  if (theta_init[2] != 0.0) return theta_init[2] > 0.0 ? 1.0 : -1.0;
  return frame.z2d.dot(frame.v_init.cross(target - frame.p1)) >= 0.0 ? 1.0 : -1.0;
}

IKResult solve(const IKQuery& query, const RobotModel& model, const SolverConfig& config) {
  check_model(model);
  config.validate();
  if (query.theta_init.size() != 6) throw ContractViolation("ur5 solve: theta_init needs 6 values");
  const Transform t_des = sanitize_pose(query.t_des);
  const double eps = config.eps_tol;
  const bool combined = config.mode == SolveMode::Combined;

  IKResult result;
  bool any_reachable = false;
  bool traced = false;
  const Vec3 p_w = wrist_position(t_des, model);
  const std::vector<double> theta1s = theta1_candidates(p_w, model);

  for (std::size_t i = 0; i < theta1s.size(); ++i) {
    const PlanarFrame frame = planar_frame(theta1s[i], t_des, p_w, model);
    for (int b = 0; b < 2; ++b) {
      const Vec3& target = frame.targets[static_cast<std::size_t>(b)];
      if ((target - frame.p1).norm() > model.l(2) + model.l(3) + eps) continue;
      any_reachable = true;

      fabrik::ChainState chain =
          make_chain(frame, model, config.chain_init == ChainInit::FromInitial ? &query.theta_init : nullptr);
      if ((chain.end() - target).norm() > eps && config.pre_bend > 0.0) {
        fabrik::PreBendOptions pb;
        pb.bend = config.pre_bend;
        pb.sign = bend_sign(frame, target, query.theta_init);
        chain = fabrik::pre_bend(chain, target, pb);
      }
      fabrik::Options fo;
      fo.eps_tol = eps;
      fo.iter_cap = combined ? config.n_l : config.n_max;
      fo.record_trace = config.record_trace && !traced;
      fo.reach_slack = eps;
      const fabrik::Outcome out = fabrik::solve(chain, target, fo);
      if (fo.record_trace) {
        result.trace = out.trace;
        traced = true;
      }

      Candidate cand;
      cand.signs = {i == 0 ? 1 : -1, b == 0 ? 1 : -1};
      cand.fabrik_iterations = out.iterations;
      const auto& P = out.final.positions;
      Vec3 l2d = (P[1] - P[0]).normalized();
      Vec3 l3d = (P[2] - P[1]).normalized();
      if (!out.converged && combined) {
        const double seed2 = signed_angle(frame.v_init, l2d, frame.z2d);
        const double seed3 = signed_angle(l2d, l3d, frame.z2d);
        const ElbowResult e = elbow_optimize(frame.theta1, target, seed2, seed3, model, eps, config.opt_max_iters);
        cand.optimizer_used = true;
        cand.optimizer_iterations = e.iterations;
        l2d = e.l2d;
        l3d = e.l3d;
      }
      cand.theta = recover_angles(l2d, l3d, frame, b, t_des, model);
      cand.mismatch = pose_mismatch(model, cand.theta, t_des);
      result.candidates.push_back(std::move(cand));
    }
  }
  IKQuery q = query;
  q.t_des = t_des;
  detail::select_candidate(model, q, eps, result, any_reachable);
  return result;
}

}  // namespace fsik::ur5
