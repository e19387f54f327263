#include "fsik/fabrik.hpp"

#include <cmath>
#include <numeric>

namespace fsik::fabrik {
namespace {

constexpr double kDegenerate = 1e-12;

double unsigned_angle(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

struct LimitCheck {
  Vec3 axis;
  double phi;
  double delta_phi;
};

// `in` and `out` are unit directions of the links entering and leaving the joint at `p`.
LimitCheck check_joint(const JointSpec& joint, const Vec3& p, const Vec3& in, const Vec3& out) {
  LimitCheck c;
  if (joint.kind == JointKind::Hinge) {
    c.axis = joint.axis;
    c.phi = signed_angle(in, out, joint.axis);
  } else {
    c.axis = ball_joint_axis(p - in, p, p + out);
    c.phi = unsigned_angle(in, out);
  }
  c.delta_phi = clamp_correction(c.phi, joint.limit);
  return c;
}

Vec3 unit_or(const Vec3& v, const Vec3& fallback) {
  const double n = v.norm();
  return n < kDegenerate ? fallback : Vec3(v / n);
}

}  // namespace

double ChainState::reach() const { return std::accumulate(link_lengths.begin(), link_lengths.end(), 0.0); }

void ChainState::validate() const {
  if (positions.size() < 2) throw ContractViolation("chain needs at least two positions");
  if (link_lengths.size() != positions.size() - 1) throw ContractViolation("chain needs one length per link");
  if (joints.size() != positions.size() - 1) throw ContractViolation("chain needs one joint per link");
  for (double l : link_lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ContractViolation("chain link lengths must be positive");
  }
  for (const auto& j : joints) {
    if (!(j.limit.lo < j.limit.hi)) throw ContractViolation("chain joint limit needs lo < hi");
  }
}

double clamp_correction(double phi, JointLimit limit) {
  if (phi > limit.hi) return limit.hi - phi;
  if (phi < limit.lo) return limit.lo - phi;
  return 0.0;
}

Vec3 ball_joint_axis(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  const Vec3 a = (p1 - p0).normalized();
  const Vec3 b = (p2 - p1).normalized();
  const Vec3 c = a.cross(b);
  if (c.norm() < kDegenerate) return any_orthogonal(a);
  return c.normalized();
}

ChainState forward_phase(const ChainState& chain, const Vec3& target, std::vector<PhaseGeometry>* geometry) {
  ChainState out = chain;
  const auto& old = chain.positions;
  auto& p = out.positions;
  const std::size_t m = p.size();
  if (geometry) geometry->assign(m - 1, PhaseGeometry{});

  p[m - 1] = target;
  for (std::size_t k = m - 1; k-- > 0;) {
    const double l = chain.link_lengths[k];
    Vec3 w = old[k] - p[k + 1];
    const double d = w.norm();
    PhaseGeometry g;
    g.d = d;
    if (d < kDegenerate) {
      Vec3 dir;
      if (k + 2 < m) {
        dir = unit_or(p[k + 1] - p[k + 2], -chain.base_direction.normalized());
      } else {
        dir = unit_or(old[k] - old[k + 1], -chain.base_direction.normalized());
      }
      p[k] = p[k + 1] + l * dir;
      g.alpha = 1.0;
      if (geometry) (*geometry)[k] = g;
      continue;
    }
    g.alpha = l / d;
    Vec3 retained = old[k];
    if (k + 2 < m) {
      const Vec3 in = -w / d;
      const Vec3 next = (p[k + 2] - p[k + 1]).normalized();
      const LimitCheck c = check_joint(chain.joints[k + 1], p[k + 1], in, next);
      g.phi = c.phi;
      g.delta_phi = c.delta_phi;
      if (c.delta_phi != 0.0) retained = p[k + 1] + rotate_about_axis(c.axis, -c.delta_phi, w);
    }
    p[k] = (1.0 - g.alpha) * p[k + 1] + g.alpha * retained;
    if (geometry) (*geometry)[k] = g;
  }
  return out;
}

ChainState backward_phase(const ChainState& chain, std::vector<PhaseGeometry>* geometry) {
  ChainState out = chain;
  const auto& old = chain.positions;
  auto& p = out.positions;
  const std::size_t m = p.size();
  if (geometry) geometry->assign(m - 1, PhaseGeometry{});

  p[0] = chain.base;
  for (std::size_t k = 1; k < m; ++k) {
    const double l = chain.link_lengths[k - 1];
    const Vec3 in = k == 1 ? Vec3(chain.base_direction.normalized()) : Vec3((p[k - 1] - p[k - 2]).normalized());
    Vec3 w = old[k] - p[k - 1];
    const double d = w.norm();
    PhaseGeometry g;
    g.d = d;
    if (d < kDegenerate) {
      p[k] = p[k - 1] + l * in;
      g.alpha = 1.0;
      if (geometry) (*geometry)[k - 1] = g;
      continue;
    }
    g.alpha = l / d;
    const LimitCheck c = check_joint(chain.joints[k - 1], p[k - 1], in, w / d);
    g.phi = c.phi;
    g.delta_phi = c.delta_phi;
    Vec3 retained = old[k];
    if (c.delta_phi != 0.0) retained = p[k - 1] + rotate_about_axis(c.axis, c.delta_phi, w);
    p[k] = (1.0 - g.alpha) * p[k - 1] + g.alpha * retained;
    if (geometry) (*geometry)[k - 1] = g;
  }
  return out;
}

double joint_angle(const ChainState& chain, std::size_t j) {
  const auto& p = chain.positions;
  const Vec3 in = j == 0 ? Vec3(chain.base_direction.normalized()) : Vec3((p[j] - p[j - 1]).normalized());
  const Vec3 out = (p[j + 1] - p[j]).normalized();
  const JointSpec& joint = chain.joints[j];
  if (joint.kind == JointKind::Hinge) return signed_angle(in, out, joint.axis);
  return unsigned_angle(in, out);
}

bool is_collinear(const ChainState& chain, double tol) {
  const auto& p = chain.positions;
  for (std::size_t a = 0; a + 1 < p.size(); ++a) {
    for (std::size_t b = a + 1; b + 1 < p.size(); ++b) {
      const Vec3 da = p[a + 1] - p[a];
      const Vec3 db = p[b + 1] - p[b];
      if (unsigned_angle(da, db) >= tol) return false;
    }
  }
  return true;
}

ChainState pre_bend(const ChainState& chain, const Vec3& target, const PreBendOptions& options) {
  if (chain.size() < 3 || !is_collinear(chain, options.collinear_tol)) return chain;
  ChainState out = chain;
  auto& p = out.positions;
  for (std::size_t j = 1; j + 1 < p.size(); ++j) {
    const Vec3 dir = (p[j] - p[j - 1]).normalized();
    Vec3 axis;
    if (chain.joints[j].kind == JointKind::Hinge) {
      axis = chain.joints[j].axis;
    } else {
      Vec3 cand = Vec3::Zero();
      if (options.axis_hint) cand = *options.axis_hint - options.axis_hint->dot(dir) * dir;
      if (cand.norm() < 1e-9) cand = dir.cross(target - p[0]);
      axis = cand.norm() < 1e-9 ? any_orthogonal(dir) : Vec3(cand.normalized());
    }
    const double angle = options.sign >= 0.0 ? options.bend : -options.bend;
    for (std::size_t k = j + 1; k < p.size(); ++k) p[k] = p[j] + rotate_about_axis(axis, angle, p[k] - p[j]);
  }
  // swing the bent chain about the base so its end sits back on the original line,
  // leaving every interior joint off the base-to-end line
  const Vec3 from = (p.back() - p[0]).normalized();
  const Vec3 to = (chain.end() - chain.positions[0]).normalized();
  const Vec3 n = from.cross(to);
  if (n.norm() > 1e-15) {
    const double swing = std::atan2(n.norm(), from.dot(to));
    const Vec3 u = n.normalized();
    for (std::size_t k = 1; k < p.size(); ++k) p[k] = p[0] + rotate_about_axis(u, swing, p[k] - p[0]);
  }
  return out;
}

Outcome solve(const ChainState& chain, const Vec3& target, const Options& options) {
  chain.validate();
  if (!(options.eps_tol > 0.0)) throw ContractViolation("fabrik::solve needs eps_tol > 0");
  if (options.iter_cap < 1) throw ContractViolation("fabrik::solve needs iter_cap >= 1");
  if (!target.allFinite()) throw ContractViolation("fabrik::solve target must be finite");

  Outcome out;
  out.final = chain;
  out.dist = (chain.end() - target).norm();
  if ((target - chain.base).norm() > chain.reach() + options.reach_slack) {
    out.status = Status::Unreachable;
    return out;
  }
  while (out.dist > options.eps_tol && out.iterations < options.iter_cap) {
    out.final = backward_phase(forward_phase(out.final, target));
    ++out.iterations;
    out.dist = (out.final.end() - target).norm();
    if (options.record_trace) out.trace.emplace_back(out.iterations, out.dist);
  }
  out.converged = out.dist <= options.eps_tol;
  out.status = out.converged ? Status::Converged : Status::NotConverged;
  return out;
}

}  // namespace fsik::fabrik
