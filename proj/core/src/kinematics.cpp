#include "fsik/kinematics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace fsik {

Transform Transform::from_matrix(const Mat4& m) {
  Transform t;
  t.rotation = m.topLeftCorner<3, 3>();
  t.translation = m.topRightCorner<3, 1>();
  return t;
}

Mat4 Transform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Transform Transform::operator*(const Transform& rhs) const {
  Transform t;
  t.rotation = rotation * rhs.rotation;
  t.translation = rotation * rhs.translation + translation;
  return t;
}

Transform Transform::inverse() const {
  Transform t;
  t.rotation = rotation.transpose();
  t.translation = -(t.rotation * translation);
  return t;
}

double wrap_angle(double theta) { return std::remainder(theta, 2.0 * kPi); }

JointVector wrap_angles(const JointVector& theta) {
  JointVector out(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) out[i] = wrap_angle(theta[i]);
  return out;
}

Vec3 rotate_about_axis(const Vec3& u, double theta, const Vec3& v) {
  if (std::abs(u.norm() - 1.0) > 1e-12) {
    throw ContractViolation("rotate_about_axis: axis is not a unit vector");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return c * v + s * u.cross(v) + (1.0 - c) * u.dot(v) * u;
}

Transform dh_transform(const DHRow& row, double theta) {
  const double th = theta + row.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Transform t;
  t.rotation << ct, -st * ca, st * sa,
                st, ct * ca, -ct * sa,
                0.0, sa, ca;
  t.translation << row.a * ct, row.a * st, row.d;
  return t;
}

Transform forward_kinematics_prefix(const RobotModel& model, const JointVector& theta, int links) {
  if (theta.size() != model.dof()) {
    throw ContractViolation("forward_kinematics: expected " + std::to_string(model.dof()) +
                            " joint values, got " + std::to_string(theta.size()));
  }
  if (links < 0 || links > model.dof()) {
    throw ContractViolation("forward_kinematics: link count out of range");
  }
  Transform t;
  for (int i = 0; i < links; ++i) t = t * dh_transform(model.dh[static_cast<std::size_t>(i)], theta[i]);
  return t;
}

Transform forward_kinematics(const RobotModel& model, const JointVector& theta) {
  return forward_kinematics_prefix(model, theta, model.dof());
}

CartesianError cartesian_error(const Transform& t_temp, const Transform& t_des) {
  const Mat3 r = t_temp.rotation.transpose() * t_des.rotation;
  const Vec3 vee(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  CartesianError e;
  // atan2 of (sin, cos) keeps full precision near zero where arccos does not
  e.eps_rot = std::atan2(0.5 * vee.norm(), c);
  e.eps_pos = (t_temp.translation - t_des.translation).norm();
  return e;
}

double pose_mismatch(const RobotModel& model, const JointVector& theta, const Transform& t_des) {
  return cartesian_error(forward_kinematics(model, theta), t_des).mismatch();
}

double signed_angle(const Vec3& a, const Vec3& b, const Vec3& ref_axis) {
  const Vec3 c = a.cross(b);
  const double s = ref_axis.dot(c) >= 0.0 ? 1.0 : -1.0;
  return s * std::atan2(c.norm(), a.dot(b));
}

bool within_limits(const RobotModel& model, const JointVector& theta, double tol) {
  if (theta.size() != model.dof()) return false;
  for (int i = 0; i < model.dof(); ++i) {
    const auto& lim = model.limits[static_cast<std::size_t>(i)];
    if (!(theta[i] >= lim.lo - tol && theta[i] <= lim.hi + tol)) return false;
  }
  return true;
}

double l1_distance(const JointVector& a, const JointVector& b) { return (a - b).cwiseAbs().sum(); }

double orthonormality_defect(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().rowwise().sum().maxCoeff();
}

Mat3 nearest_rotation(const Mat3& r) {
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

Transform sanitize_pose(const Transform& pose) {
  if (!pose.rotation.allFinite() || !pose.translation.allFinite()) {
    throw ContractViolation("pose contains non-finite entries");
  }
  const double defect = orthonormality_defect(pose.rotation);
  if (defect > 1e-3 || pose.rotation.determinant() <= 0.0) {
    throw ContractViolation("pose rotation is not a rotation matrix (defect " +
                            std::to_string(defect) + ")");
  }
  Transform out = pose;
  if (defect > 1e-9) out.rotation = nearest_rotation(pose.rotation);
  return out;
}

Vec3 any_orthogonal(const Vec3& v) {
  const Vec3 n = v.normalized();
  const Vec3 a = n.cwiseAbs();
  Vec3 e = Vec3::UnitX();
  if (a.y() <= a.x() && a.y() <= a.z()) e = Vec3::UnitY();
  if (a.z() < a.x() && a.z() < a.y()) e = Vec3::UnitZ();
  return n.cross(e).normalized();
}

std::string to_string(RobotKind kind) { return kind == RobotKind::UR5 ? "ur5" : "kuka"; }

RobotKind parse_robot_kind(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (n == "ur5") return RobotKind::UR5;
  if (n == "kuka" || n == "iiwa14" || n == "kuka_iiwa14" || n == "lbr_iiwa_14_r820") return RobotKind::KUKA;
  throw ModelError("unknown robot name '" + name + "' (expected ur5 or kuka)");
}

}  // namespace fsik
