#include "fsik/kinematics.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

using namespace fsik;

namespace {

std::string ur5_json(const std::string& tweak_row0 = R"({"a":0,"alpha":1.5707963267948966,"d":0.089159,"theta_offset":0})") {
  return R"({"name":"ur5","dh":[)" + tweak_row0 + R"(,
    {"a":-0.425,"alpha":0,"d":0,"theta_offset":0},
    {"a":-0.39225,"alpha":0,"d":0,"theta_offset":0},
    {"a":0,"alpha":1.5707963267948966,"d":0.10915,"theta_offset":0},
    {"a":0,"alpha":-1.5707963267948966,"d":0.09465,"theta_offset":0},
    {"a":0,"alpha":0,"d":0.0823,"theta_offset":0}],
    "limits":[[-3,3],[-3,3],[-3,3],[-3,3],[-3,3],[-3,3]]})";
}

}  // namespace

TEST(ModelIo, EmbeddedModelsHaveExpectedLinkLengths) {
  const RobotModel u = builtin_model(RobotKind::UR5);
  EXPECT_EQ(u.dof(), 6);
  const std::vector<double> ul = {0.089159, 0.425, 0.39225, 0.10915, 0.09465, 0.0823};
  EXPECT_EQ(u.link_lengths, ul);
  const RobotModel k = builtin_model(RobotKind::KUKA);
  EXPECT_EQ(k.dof(), 7);
  const std::vector<double> kl = {0.36, 0.42, 0.4, 0.126};
  EXPECT_EQ(k.link_lengths, kl);
  for (const auto& lim : k.limits) {
    EXPECT_DOUBLE_EQ(lim.lo, -kPi);
    EXPECT_DOUBLE_EQ(lim.hi, kPi);
  }
}

TEST(ModelIo, ParsesCustomLimits) {
  const RobotModel m = parse_model_json(ur5_json());
  EXPECT_EQ(m.limits[3].lo, -3.0);
  EXPECT_EQ(m.limits[3].hi, 3.0);
}

TEST(ModelIo, WrapsAlphaIntoHalfOpenInterval) {
  const RobotModel m =
      parse_model_json(ur5_json(R"({"a":0,"alpha":7.853981633974483,"d":0.089159,"theta_offset":0})"));
  EXPECT_NEAR(m.dh[0].alpha, kPi / 2, 1e-12);
}

TEST(ModelIo, ErrorsNameTheField) {
  try {
    parse_model_json(ur5_json(R"({"a":0,"alpha":1.5707963267948966,"theta_offset":0})"));
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("'d'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_model_json("{"), ModelError);
  EXPECT_THROW(parse_model_json(R"({"name":"puma","dh":[],"limits":[]})"), std::exception);
}

TEST(ModelIo, RejectsInvertedLimits) {
  std::string s = ur5_json();
  s.replace(s.find("[-3,3]"), 6, "[3,-3]");
  EXPECT_THROW(parse_model_json(s), ModelError);
}

TEST(ModelIo, LoadsFromFile) {
  const std::string path = ::testing::TempDir() + "fsik_model_io.json";
  {
    std::ofstream f(path);
    f << ur5_json();
  }
  EXPECT_EQ(load_model_file(path).dof(), 6);
  std::remove(path.c_str());
  EXPECT_THROW(load_model_file(path), ModelError);
}

TEST(ModelIo, RobotKindNames) {
  EXPECT_EQ(parse_robot_kind("ur5"), RobotKind::UR5);
  EXPECT_EQ(parse_robot_kind("kuka"), RobotKind::KUKA);
  EXPECT_EQ(parse_robot_kind("iiwa14"), RobotKind::KUKA);
  EXPECT_THROW(parse_robot_kind("abb"), std::exception);
}
