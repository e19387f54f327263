#include "cli.hpp"

#include "fsik/kinematics.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

using fsik::cli::run;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return ::testing::TempDir() + name; }

std::string write_pose(const std::string& name, const fsik::Transform& t) {
  nlohmann::json j;
  j["position"] = {t.translation.x(), t.translation.y(), t.translation.z()};
  j["rotation"] = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) j["rotation"].push_back({t.rotation(r, 0), t.rotation(r, 1), t.rotation(r, 2)});
  const std::string path = tmp(name);
  std::ofstream(path) << j.dump();
  return path;
}

int data_rows(const std::string& path) {
  std::ifstream in(path);
  int n = -1;
  for (std::string l; std::getline(in, l);) ++n;
  return n;
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(CliSolve, SolvesOwnPose) {
  const auto m = fsik::builtin_model(fsik::RobotKind::UR5);
  const auto pose = write_pose("ur5_pose.json", fsik::forward_kinematics(m, fsik::JointVector::Constant(6, 0.3)));
  const CliRun r = call({"solve", "--robot", "ur5", "--pose", pose});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("status"), "Solved");
  EXPECT_EQ(j.at("theta").size(), 6u);
  EXPECT_LE(j.at("eps_pos").get<double>(), 1e-6);
  for (const char* key : {"eps_rot", "fabrik_iters", "opt_used", "time_s"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST(CliSolve, KukaFabrikMode) {
  const auto m = fsik::builtin_model(fsik::RobotKind::KUKA);
  const auto pose = write_pose("kuka_pose.json", fsik::forward_kinematics(m, fsik::JointVector::Constant(7, 0.2)));
  const CliRun r = call({"solve", "--robot", "kuka", "--pose", pose, "--mode", "fabrik", "--nmax", "50000"});
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("opt_used"), false);
  EXPECT_EQ(r.code, j.at("status") == "Solved" ? 0 : 3);
}

TEST(CliSolve, FarPoseIsUnreachable) {
  fsik::Transform t;
  t.translation = fsik::Vec3(3, 0, 0);
  const CliRun r = call({"solve", "--robot", "ur5", "--pose", write_pose("far.json", t)});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("status"), "Unreachable");
}

TEST(CliSolve, MalformedInputNamesField) {
  const std::string path = tmp("bad_pose.json");
  std::ofstream(path) << R"({"position": [1, 2], "rotation": [[1,0,0],[0,1,0],[0,0,1]]})";
  CliRun r = call({"solve", "--robot", "ur5", "--pose", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("position"), std::string::npos) << r.err;

  const auto m = fsik::builtin_model(fsik::RobotKind::UR5);
  const auto ok = write_pose("ok.json", fsik::forward_kinematics(m, fsik::JointVector::Zero(6)));
  r = call({"solve", "--robot", "ur5", "--pose", ok, "--init", "1,2,3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--init"), std::string::npos) << r.err;

  EXPECT_EQ(call({"solve", "--pose", ok}).code, 1);
  EXPECT_EQ(call({"solve", "--robot", "puma", "--pose", ok}).code, 1);
  EXPECT_EQ(call({"nonsense"}).code, 1);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST(CliBench, WritesThreeFilesPerModeAndRepeats) {
  const std::string prefix = tmp("bench_ur5");
  const std::vector<std::string> args = {"bench", "--robot", "ur5", "--n", "10", "--seed", "7",
                                         "--modes", "combined:5,fabrik:100", "--out", prefix, "--workers", "1"};
  const CliRun a = call(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j.at("modes").size(), 2u);
  EXPECT_EQ(j.at("prng"), "mt19937_64/v1");
  for (const char* label : {"combined-5", "fabrik-100"}) {
    const std::string base = prefix + "_" + label;
    EXPECT_EQ(data_rows(base + "_report.csv"), 10);
    EXPECT_EQ(data_rows(base + "_times.csv"), 15);
    std::ifstream in(base + "_summary.json");
    EXPECT_EQ(nlohmann::json::parse(in).at("n"), 10);
  }
  const CliRun b = call(args);
  ASSERT_EQ(b.code, 0);
  const auto j2 = nlohmann::json::parse(b.out);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(j.at("modes")[k].at("solved"), j2.at("modes")[k].at("solved"));
}

TEST(CliBench, RejectsBadMode) {
  const CliRun r = call({"bench", "--robot", "kuka", "--n", "2", "--modes", "sqp:3", "--out", tmp("x")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("sqp"), std::string::npos);
}

TEST(CliTrace, TargetAtEndHasNoSweeps) {
  const std::string out = tmp("trace_end.csv");
  const CliRun r = call({"trace", "--chain", "1,1", "--target", "2,0,0", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(data_rows(out), 1);
}

TEST(CliTrace, SlightBendNeedsManySweeps) {
  const std::string out = tmp("trace_bend.csv");
  const CliRun r = call({"trace", "--chain", "1,1", "--target", "1.99,0,0", "--pre-bend", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(out);
  ASSERT_GT(rows.size(), 100u);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    EXPECT_EQ(rows[i][0], static_cast<double>(i + 1));
    EXPECT_GT(rows[i][1], 1e-6);
  }
  EXPECT_LE(rows.back()[1], 1e-6);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("rows"), rows.size());
}

TEST(CliTrace, UnreachableTargetExitsTwo) {
  const CliRun r = call({"trace", "--chain", "1,1", "--target", "3,0,0", "--out", tmp("trace_far.csv")});
  EXPECT_EQ(r.code, 2);
}

TEST(CliTrack, DefaultScenarios) {
  const std::string ur = tmp("track_ur5.csv");
  CliRun r = call({"track", "--robot", "ur5", "--out", ur});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(ur), 180);

  const std::string ku = tmp("track_kuka.csv");
  r = call({"track", "--robot", "kuka", "--out", ku});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(ku);
  ASSERT_EQ(rows.size(), 180u);
  for (const auto& row : rows) EXPECT_LE(row[10], 1e-9);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("status"), "Solved");
  EXPECT_EQ(j.at("phase1_points"), 80);

  r = call({"track", "--robot", "kuka", "--phase1", "2", "--phase2", "2", "--out", ku});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(data_rows(ku), 4);
  EXPECT_EQ(call({"track", "--robot", "kuka", "--phase1", "1", "--out", ku}).code, 1);
}
