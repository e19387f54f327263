#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>
#include <vector>

namespace fsik {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using JointVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Transform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Transform identity() { return {}; }
  static Transform from_matrix(const Mat4& m);
  Mat4 matrix() const;
  Transform operator*(const Transform& rhs) const;
  Transform inverse() const;
};

struct DHRow {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
};

struct JointLimit {
  double lo = -kPi;
  double hi = kPi;
};

enum class RobotKind { UR5, KUKA };

struct RobotModel {
  RobotKind kind = RobotKind::UR5;
  std::string name;
  std::vector<DHRow> dh;
  // UR5: l1..l6 = d1, |a2|, |a3|, d4, d5, d6.  KUKA: l1..l4 = d1, d3, d5, d7.
  std::vector<double> link_lengths;
  std::vector<JointLimit> limits;

  int dof() const { return static_cast<int>(dh.size()); }
  double l(int i) const { return link_lengths.at(static_cast<std::size_t>(i - 1)); }
};

struct CartesianError {
  double eps_pos = 0.0;
  double eps_rot = 0.0;

  double mismatch() const { return eps_rot + eps_pos; }
};

double wrap_angle(double theta);
JointVector wrap_angles(const JointVector& theta);

Vec3 rotate_about_axis(const Vec3& u, double theta, const Vec3& v);

Transform dh_transform(const DHRow& row, double theta);

Transform forward_kinematics(const RobotModel& model, const JointVector& theta);

// Product of the first `links` DH transforms.
Transform forward_kinematics_prefix(const RobotModel& model, const JointVector& theta, int links);

CartesianError cartesian_error(const Transform& t_temp, const Transform& t_des);

double pose_mismatch(const RobotModel& model, const JointVector& theta, const Transform& t_des);

double signed_angle(const Vec3& a, const Vec3& b, const Vec3& ref_axis);

bool within_limits(const RobotModel& model, const JointVector& theta, double tol = 0.0);

double l1_distance(const JointVector& a, const JointVector& b);

double orthonormality_defect(const Mat3& r);

Mat3 nearest_rotation(const Mat3& r);

// Re-projects slightly non-orthonormal rotations, rejects grossly invalid ones.
Transform sanitize_pose(const Transform& pose);

Vec3 any_orthogonal(const Vec3& v);

std::string to_string(RobotKind kind);
RobotKind parse_robot_kind(const std::string& name);

RobotModel parse_model_json(const std::string& text);
RobotModel load_model_file(const std::string& path);
RobotModel builtin_model(RobotKind kind);

}  // namespace fsik
