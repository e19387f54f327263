#include "fsik/kuka_solver.hpp"

#include "fsik/sqp.hpp"

#include <cmath>

namespace fsik::kuka {
namespace {

constexpr double kSingular = 1e-9;

void check_model(const RobotModel& model) {
  if (model.kind != RobotKind::KUKA) throw ContractViolation("kuka solver needs a kuka model");
}

double unsigned_angle(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

Transform prefix(const RobotModel& model, const double* theta, int links) {
  Transform t;
  for (int i = 0; i < links; ++i) t = t * dh_transform(model.dh[static_cast<std::size_t>(i)], theta[i]);
  return t;
}

// Angle phi of a unit vector (cos(phi) sin(beta), sin(phi) sin(beta), cos(beta)).
double azimuth(const Vec3& v, double sin_beta, double fallback) {
  if (std::abs(sin_beta) < kSingular) return fallback;
  return std::atan2(v.y() / sin_beta, v.x() / sin_beta);
}

}  // namespace

Vec3 wrist_target(const Transform& t_des, const RobotModel& model) {
  return t_des.translation - t_des.rotation * Vec3(0.0, 0.0, model.l(4));
}

Vec3 shoulder_point(const RobotModel& model) { return {0.0, 0.0, model.l(1)}; }

ElbowMagnitudes elbow_magnitudes(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4,
                                 const RobotModel& model) {
  (void)model;
  ElbowMagnitudes m;
  m.theta2 = unsigned_angle(p1, p2 - p1);
  m.theta4 = unsigned_angle(p2 - p1, p3 - p2);
  m.theta6 = unsigned_angle(p3 - p2, p4 - p3);
  return m;
}

double recover_theta1(const Vec3& p2, double theta2, const RobotModel& model, double fallback) {
  const Vec3 z2 = (p2 - shoulder_point(model)) / model.l(2);
  return azimuth(z2, std::sin(theta2), fallback);
}

double recover_theta3(double theta1, double theta2, double theta4, const Vec3& p3, const RobotModel& model,
                      double fallback) {
  const double th[2] = {theta1, theta2};
  const Transform t2 = prefix(model, th, 2);
  const Vec3 local = t2.inverse().rotation * (p3 - t2.translation);
  const Vec3 w = (local - Vec3(0.0, 0.0, model.l(2))) / model.l(3);
  return azimuth(w, std::sin(theta4), fallback);
}

WristAngles recover_theta5_theta7(const Eigen::Vector4d& theta1_4, int sign6, int sign7, const Transform& t_des,
                                  const RobotModel& model, double fallback5) {
  double th[6] = {theta1_4[0], theta1_4[1], theta1_4[2], theta1_4[3], 0.0, 0.0};
  const Transform t4 = prefix(model, th, 4);
  const Vec3 z6 = t4.rotation.transpose() * t_des.rotation.col(2);
  WristAngles w;
  w.theta6 = (sign6 >= 0 ? 1.0 : -1.0) * std::atan2(std::hypot(z6.x(), z6.y()), z6.z());
  w.theta5 = azimuth(z6, std::sin(w.theta6), fallback5);
  th[4] = w.theta5;
  th[5] = w.theta6;
  const Transform t6 = prefix(model, th, 6);
  const Vec3 x6 = t6.rotation.col(0);
  const Vec3 x7 = t_des.rotation.col(0);
  w.theta7 = (sign7 >= 0 ? 1.0 : -1.0) * unsigned_angle(x6, x7);
  return w;
}

WristJacobian wrist_analytic(const Eigen::Vector4d& theta1_4, const RobotModel& model) {
  const double l1 = model.l(1), l2 = model.l(2), l3 = model.l(3);
  const double c1 = std::cos(theta1_4[0]), s1 = std::sin(theta1_4[0]);
  const double c2 = std::cos(theta1_4[1]), s2 = std::sin(theta1_4[1]);
  const double c3 = std::cos(theta1_4[2]), s3 = std::sin(theta1_4[2]);
  const double c4 = std::cos(theta1_4[3]), s4 = std::sin(theta1_4[3]);

  // Joint axes: z0 = base z, z1 and z2 from the shoulder, z3 from the elbow.
  const Vec3 z0(0.0, 0.0, 1.0);
  const Vec3 z1(-s1, c1, 0.0);
  const Vec3 z2(c1 * s2, s1 * s2, c2);
  const Vec3 x2(c1 * c2, s1 * c2, -s2);
  const Vec3 y2 = z2.cross(x2);
  // Rotz(theta3) Rotx(-pi/2) applied to frame 2
  const Vec3 z3 = -s3 * x2 + c3 * y2;
  const Vec3 x3 = c3 * x2 + s3 * y2;
  const Vec3 y3 = z3.cross(x3);
  const Vec3 z4 = s4 * x3 - c4 * y3;

  const Vec3 o1(0.0, 0.0, l1);
  const Vec3 o3 = o1 + l2 * z2;
  WristJacobian out;
  out.p3 = o3 + l3 * z4;
  out.jacobian.col(0) = z0.cross(out.p3);
  out.jacobian.col(1) = z1.cross(out.p3 - o1);
  out.jacobian.col(2) = z2.cross(out.p3 - o1);
  out.jacobian.col(3) = z3.cross(out.p3 - o3);
  return out;
}

std::array<Vec3, 2> link_directions(const Eigen::Vector4d& theta1_4, const RobotModel& model) {
  const double th[4] = {theta1_4[0], theta1_4[1], theta1_4[2], theta1_4[3]};
  return {Vec3(prefix(model, th, 2).rotation.col(2)), Vec3(prefix(model, th, 4).rotation.col(2))};
}

WristOptResult wrist_optimize(const Eigen::Vector4d& seeds, const Vec3& target, const RobotModel& model,
                              double eps_tol, int max_iters) {
  sqp::Problem p;
  p.x0 = seeds;
  p.lower.resize(4);
  p.upper.resize(4);
  for (int i = 0; i < 4; ++i) {
    const JointLimit b = detail::optimizer_bound(model.limits[static_cast<std::size_t>(i)], seeds[i]);
    p.lower[i] = b.lo;
    p.upper[i] = b.hi;
  }
  p.x0 = p.x0.cwiseMax(p.lower).cwiseMin(p.upper);
  p.objective = [&](const sqp::Vector& x, sqp::Vector& g) {
    const WristJacobian wj = wrist_analytic(Eigen::Vector4d(x), model);
    const Vec3 r = wj.p3 - target;
    g = 2.0 * wj.jacobian.transpose() * r;
    return r.squaredNorm();
  };
  const sqp::Result res = sqp::minimize(p, eps_tol * eps_tol, max_iters);

  WristOptResult out;
  out.theta = res.x;
  out.f = res.f;
  out.iterations = res.iterations;
  out.success = res.f <= eps_tol * eps_tol;
  const auto dirs = link_directions(out.theta, model);
  out.l2d = dirs[0];
  out.l3d = dirs[1];
  out.p2 = shoulder_point(model) + model.l(2) * out.l2d;
  out.p3 = wrist_analytic(out.theta, model).p3;
  return out;
}

std::vector<BranchAngles> recover_all(const Vec3& p2, const Vec3& p3, const Transform& t_des, const RobotModel& model,
                                      const JointVector& theta_init) {
  const Vec3 p1 = shoulder_point(model);
  const Vec3 flange = p3 + model.l(4) * t_des.rotation.col(2);
  const ElbowMagnitudes m = elbow_magnitudes(p1, p2, p3, flange, model);
  std::vector<BranchAngles> out;
  out.reserve(16);
  for (int s2 : {1, -1}) {
    const double t2 = s2 * m.theta2;
    const double t1 = recover_theta1(p2, t2, model, theta_init[0]);
    for (int s4 : {1, -1}) {
      const double t4 = s4 * m.theta4;
      const double t3 = recover_theta3(t1, t2, t4, p3, model, theta_init[2]);
      for (int s6 : {1, -1}) {
        for (int s7 : {1, -1}) {
          const WristAngles w =
              recover_theta5_theta7(Eigen::Vector4d(t1, t2, t3, t4), s6, s7, t_des, model, theta_init[4]);
          BranchAngles b;
          b.signs = {s2, s4, s6, s7};
          b.theta.resize(7);
          b.theta << t1, t2, t3, t4, w.theta5, w.theta6, w.theta7;
          b.theta = wrap_angles(b.theta);
          out.push_back(std::move(b));
        }
      }
    }
  }
  return out;
}

fabrik::ChainState make_chain(const RobotModel& model, const SolverConfig& config, const JointVector* theta_init) {
  const double l2 = model.l(2), l3 = model.l(3);
  const Vec3 p1 = shoulder_point(model);
  fabrik::ChainState c;
  c.base = p1;
  c.base_direction = Vec3::UnitZ();
  c.link_lengths = {l2, l3};
  const JointLimit& lim4 = model.limits[3];
  const double elbow_max = std::min(kPi, std::max(std::abs(lim4.lo), std::abs(lim4.hi)));
  c.joints = {fabrik::JointSpec::ball(config.shoulder_cone), fabrik::JointSpec::ball(elbow_max)};
  if (theta_init) {
    c.positions = {p1, forward_kinematics_prefix(model, *theta_init, 3).translation,
                   forward_kinematics_prefix(model, *theta_init, 5).translation};
  } else {
    const Vec3 v = config.v_init.normalized();
    c.positions = {p1, p1 + l2 * v, p1 + (l2 + l3) * v};
  }
  return c;
}

IKResult solve(const IKQuery& query, const RobotModel& model, const SolverConfig& config) {
  check_model(model);
  config.validate();
  if (query.theta_init.size() != 7) throw ContractViolation("kuka solve: theta_init needs 7 values");
  const Transform t_des = sanitize_pose(query.t_des);
  const double eps = config.eps_tol;
  const bool combined = config.mode == SolveMode::Combined;
  IKQuery q = query;
  q.t_des = t_des;

  IKResult result;
  const Vec3 target = wrist_target(t_des, model);
  const Vec3 p1 = shoulder_point(model);
  if ((target - p1).norm() > model.l(2) + model.l(3) + eps) {
    detail::select_candidate(model, q, eps, result, false);
    return result;
  }

  fabrik::ChainState chain =
      make_chain(model, config, config.chain_init == ChainInit::FromInitial ? &query.theta_init : nullptr);
  if ((chain.end() - target).norm() > eps && config.pre_bend > 0.0) {
    fabrik::PreBendOptions pb;
    pb.bend = config.pre_bend;
    pb.sign = query.theta_init[3] < 0.0 ? -1.0 : 1.0;
    pb.axis_hint = Vec3(forward_kinematics_prefix(model, query.theta_init, 3).rotation.col(2));
    chain = fabrik::pre_bend(chain, target, pb);
  }
  fabrik::Options fo;
  fo.eps_tol = eps;
  fo.iter_cap = combined ? config.n_l : config.n_max;
  fo.record_trace = config.record_trace;
  fo.reach_slack = eps;
  const fabrik::Outcome out = fabrik::solve(chain, target, fo);
  result.trace = out.trace;

  Vec3 p2 = out.final.positions[1];
  Vec3 p3 = out.final.positions[2];
  bool opt_used = false;
  int opt_iters = 0;
  if (!out.converged && combined) {
    const auto seeds_all = recover_all(p2, p3, t_des, model, query.theta_init);
    Eigen::Vector4d seed = seeds_all.front().theta.head<4>();
    double best = l1_distance(seed, query.theta_init.head<4>());
    // the wrist branches share joints 1..4, so step over them
    for (std::size_t i = 4; i < seeds_all.size(); i += 4) {
      const Eigen::Vector4d s = seeds_all[i].theta.head<4>();
      const double d = l1_distance(s, query.theta_init.head<4>());
      if (d < best) {
        best = d;
        seed = s;
      }
    }
    const WristOptResult w = wrist_optimize(seed, target, model, eps, config.opt_max_iters);
    opt_used = true;
    opt_iters = w.iterations;
    p2 = w.p2;
    p3 = w.p3;
  }

  for (auto& b : recover_all(p2, p3, t_des, model, query.theta_init)) {
    Candidate c;
    c.signs.assign(b.signs.begin(), b.signs.end());
    c.theta = std::move(b.theta);
    c.mismatch = pose_mismatch(model, c.theta, t_des);
    c.fabrik_iterations = out.iterations;
    c.optimizer_used = opt_used;
    c.optimizer_iterations = opt_iters;
    result.candidates.push_back(std::move(c));
  }
  detail::select_candidate(model, q, eps, result, true);
  return result;
}

}  // namespace fsik::kuka
