#include "cli.hpp"

#include "fsik/benchmark.hpp"
#include "fsik/csv.hpp"
#include "fsik/fabrik.hpp"
#include "fsik/solver.hpp"
#include "fsik/tracking.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace fsik::cli {
namespace {

using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw UsageError(what + ": '" + item + "' is not a finite number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(what + ": expected a comma-separated list of numbers");
  return values;
}

JointVector parse_joints(const std::string& text, int dof, const std::string& what) {
  const auto v = parse_list(text, what);
  if (static_cast<int>(v.size()) != dof) {
    throw UsageError(what + ": expected " + std::to_string(dof) + " values, got " + std::to_string(v.size()));
  }
  return Eigen::Map<const JointVector>(v.data(), dof);
}

Transform parse_pose_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open pose file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("pose file '" + path + "' does not parse: " + e.what());
  }
  if (!doc.is_object()) throw UsageError("pose: document must be an object");
  Transform t;
  if (!doc.contains("position")) throw UsageError("pose: missing field 'position'");
  const auto& p = doc.at("position");
  if (!p.is_array() || p.size() != 3) throw UsageError("pose: field 'position' must be an array of 3 numbers");
  for (int i = 0; i < 3; ++i) {
    if (!p[static_cast<std::size_t>(i)].is_number()) throw UsageError("pose: field 'position' must hold numbers");
    t.translation[i] = p[static_cast<std::size_t>(i)].get<double>();
  }
  if (!doc.contains("rotation")) throw UsageError("pose: missing field 'rotation'");
  const auto& r = doc.at("rotation");
  if (!r.is_array() || r.size() != 3) throw UsageError("pose: field 'rotation' must be a 3x3 array");
  for (int i = 0; i < 3; ++i) {
    const auto& row = r[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != 3) throw UsageError("pose: field 'rotation' must be a 3x3 array");
    for (int j = 0; j < 3; ++j) {
      if (!row[static_cast<std::size_t>(j)].is_number()) throw UsageError("pose: field 'rotation' must hold numbers");
      t.rotation(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }
  try {
    return sanitize_pose(t);
  } catch (const ContractViolation& e) {
    throw UsageError(std::string("pose: field 'rotation': ") + e.what());
  }
}

struct Common {
  std::string robot;
  std::string model_file;

  RobotModel model() const {
    if (!model_file.empty()) {
      RobotModel m = load_model_file(model_file);
      if (!robot.empty() && parse_robot_kind(robot) != m.kind) {
        throw UsageError("--robot " + robot + " does not match model file '" + model_file + "'");
      }
      return m;
    }
    if (robot.empty()) throw UsageError("--robot or --model is required");
    return builtin_model(parse_robot_kind(robot));
  }
};

ordered_json theta_json(const JointVector& theta) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < theta.size(); ++i) a.push_back(theta[i]);
  return a;
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return kExitSolved;
    case SolveStatus::Unreachable: return kExitUnreachable;
    case SolveStatus::Failed: return kExitFailed;
  }
  return kExitFailed;
}

std::string file_label(const bench::Mode& m) {
  std::string s = m.label();
  std::replace(s.begin(), s.end(), ':', '-');
  return s;
}

struct SolveArgs {
  std::string pose;
  std::string init;
  double eps = 1e-6;
  int n_l = 0;
  int n_max = 100;
  std::string mode = "combined";
};

int cmd_solve(const Common& c, const SolveArgs& a, std::ostream& out) {
  const RobotModel model = c.model();
  SolverConfig config = SolverConfig::defaults_for(model.kind);
  config.eps_tol = a.eps;
  if (a.n_l > 0) config.n_l = a.n_l;
  config.n_max = a.n_max;
  config.mode = a.mode == "fabrik" ? SolveMode::FabrikOnly : SolveMode::Combined;
  const JointVector init = a.init.empty() ? JointVector::Zero(model.dof()) : parse_joints(a.init, model.dof(), "--init");
  if (!within_limits(model, init)) throw UsageError("--init lies outside the joint limits");
  const Transform pose = parse_pose_file(a.pose);

  const IKResult r = solve(model, IKQuery{pose, init}, config);
  ordered_json j;
  j["status"] = to_string(r.status);
  j["theta"] = theta_json(r.theta);
  j["eps_pos"] = r.error.eps_pos;
  j["eps_rot"] = r.error.eps_rot;
  j["fabrik_iters"] = r.fabrik_iterations;
  j["opt_used"] = r.optimizer_used;
  j["time_s"] = r.solve_time;
  out << j.dump() << '\n';
  return exit_for(r.status);
}

struct BenchArgs {
  int n = 1000;
  std::uint64_t seed = 1;
  std::string modes;
  std::string out_prefix;
  int workers = 0;
  double eps = 1e-6;
  int repeats = 1;
};

int cmd_bench(const Common& c, const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const RobotModel model = c.model();
  std::vector<bench::Mode> modes;
  const std::string spec =
      a.modes.empty() ? "combined:" + std::to_string(SolverConfig::defaults_for(model.kind).n_l) : a.modes;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      modes.push_back(bench::Mode::parse(item));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--modes: ") + e.what());
    }
  }
  if (modes.empty()) throw UsageError("--modes: at least one mode is required");

  const bench::QuerySet qs = bench::generate_queries(model, a.n, a.seed);
  bench::Options opt;
  opt.eps_tol = a.eps;
  opt.workers = a.workers;
  opt.timing_repeats = a.repeats;
  const auto reports = bench::run_benchmark(model, qs, modes, opt);

  ordered_json j;
  j["robot"] = to_string(model.kind);
  j["n"] = a.n;
  j["seed"] = a.seed;
  j["prng"] = qs.prng;
  j["modes"] = ordered_json::array();
  err << std::left << std::setw(16) << "mode" << std::setw(14) << "succ. rate %" << "avg. time ms\n";
  for (const auto& r : reports) {
    const std::string base = a.out_prefix + "_" + file_label(r.mode);
    bench::write_report_csv(r, base + "_report.csv");
    bench::write_summary_json(r, base + "_summary.json");
    bench::export_time_distribution(r, base + "_times.csv");
    j["modes"].push_back(ordered_json::parse(bench::summary_json(r)));
    err << std::left << std::setw(16) << r.mode.label() << std::setw(14) << std::fixed << std::setprecision(2)
        << 100.0 * r.success_rate << std::setprecision(4) << 1e3 * r.avg_time << '\n';
  }
  out << j.dump() << '\n';
  return kExitSolved;
}

struct TraceArgs {
  std::string pose;
  std::string init;
  std::string chain;
  std::string target;
  double eps = 1e-6;
  int cap = 10000;
  std::string out;
  bool pre_bend = false;
};

int cmd_trace(const Common& c, const TraceArgs& a, std::ostream& out) {
  std::vector<std::pair<int, double>> trace;
  std::string status;
  int iterations = 0;
  double dist = 0.0;

  if (!a.chain.empty()) {
    if (!c.robot.empty() || !c.model_file.empty() || !a.pose.empty()) {
      throw UsageError("--chain cannot be combined with --robot, --model or --pose");
    }
    if (a.target.empty()) throw UsageError("--chain needs --target");
    const auto lengths = parse_list(a.chain, "--chain");
    const auto tv = parse_list(a.target, "--target");
    if (tv.size() != 3) throw UsageError("--target: expected 3 values");
    fabrik::ChainState chain;
    chain.base = Vec3::Zero();
    chain.base_direction = Vec3::UnitX();
    chain.positions.push_back(Vec3::Zero());
    double x = 0.0;
    for (double l : lengths) {
      if (!(l > 0.0)) throw UsageError("--chain: link lengths must be positive");
      x += l;
      chain.positions.emplace_back(x, 0.0, 0.0);
      chain.link_lengths.push_back(l);
      chain.joints.push_back(fabrik::JointSpec::hinge(Vec3::UnitZ()));
    }
    const Vec3 target(tv[0], tv[1], tv[2]);
    if (a.pre_bend) chain = fabrik::pre_bend(chain, target);
    fabrik::Options fo;
    fo.eps_tol = a.eps;
    fo.iter_cap = a.cap;
    fo.record_trace = true;
    const fabrik::Outcome o = fabrik::solve(chain, target, fo);
    trace = o.trace;
    iterations = o.iterations;
    dist = o.dist;
    status = o.status == fabrik::Status::Converged ? "Converged"
             : o.status == fabrik::Status::Unreachable ? "Unreachable"
                                                       : "NotConverged";
  } else {
    if (a.pose.empty()) throw UsageError("trace needs either --chain or --pose");
    const RobotModel model = c.model();
    SolverConfig config = SolverConfig::defaults_for(model.kind);
    config.eps_tol = a.eps;
    config.mode = SolveMode::FabrikOnly;
    config.n_max = a.cap;
    config.record_trace = true;
    if (!a.pre_bend) config.pre_bend = 0.0;
    const JointVector init = a.init.empty() ? JointVector::Zero(model.dof()) : parse_joints(a.init, model.dof(), "--init");
    const IKResult r = solve(model, IKQuery{parse_pose_file(a.pose), init}, config);
    trace = r.trace;
    iterations = trace.empty() ? 0 : trace.back().first;
    dist = trace.empty() ? 0.0 : trace.back().second;
    if (r.status == SolveStatus::Unreachable) {
      status = "Unreachable";
    } else {
      status = (trace.empty() || dist <= a.eps) ? "Converged" : "NotConverged";
    }
  }

  if (status != "Unreachable") {
    auto f = open_output(a.out);
    f << "n,dist\n";
    for (const auto& [n, d] : trace) f << n << ',' << format_double(d) << '\n';
    if (!f) throw IoError("failed while writing '" + a.out + "'");
  }
  ordered_json j;
  j["status"] = status;
  j["iterations"] = iterations;
  j["dist"] = dist;
  j["rows"] = trace.size();
  out << j.dump() << '\n';
  if (status == "Unreachable") return kExitUnreachable;
  return status == "Converged" ? kExitSolved : kExitFailed;
}

struct TrackArgs {
  int phase1 = 80;
  int phase2 = 100;
  std::string init;
  std::string end;
  std::string out;
};

int cmd_track(const Common& c, const TrackArgs& a, std::ostream& out, std::ostream& err) {
  const RobotModel model = c.model();
  tracking::Scenario sc = tracking::Scenario::defaults_for(model.kind);
  sc.phase1_points = a.phase1;
  sc.phase2_points = a.phase2;
  if (!a.init.empty()) sc.theta_init = parse_joints(a.init, model.dof(), "--init");
  if (!a.end.empty()) sc.theta_end = parse_joints(a.end, model.dof(), "--end");
  if (!within_limits(model, sc.theta_init)) throw UsageError("--init lies outside the joint limits");
  if (!within_limits(model, sc.theta_end)) throw UsageError("--end lies outside the joint limits");

  const tracking::Trace t = tracking::run_scenario(model, sc, tracking::tracking_config(model.kind));
  tracking::write_trace_csv(t, a.out);

  double max_pos = 0.0, max_rot = 0.0;
  int activations = 0;
  for (const auto& r : t.records) {
    max_pos = std::max(max_pos, r.eps_pos);
    max_rot = std::max(max_rot, r.eps_rot);
    activations += r.optimizer_used ? 1 : 0;
  }
  ordered_json j;
  j["status"] = to_string(t.status);
  j["rows"] = t.records.size();
  j["phase1_points"] = t.phase1_points;
  j["phase2_points"] = t.phase2_points;
  j["max_eps_pos"] = max_pos;
  j["max_eps_rot"] = max_rot;
  j["optimizer_activations"] = activations;
  if (t.failed_index >= 0) j["failed_index"] = t.failed_index;
  out << j.dump() << '\n';
  if (t.status != SolveStatus::Solved) {
    err << "waypoint " << t.failed_index << " failed with status " << to_string(t.status) << '\n';
    return exit_for(t.status);
  }
  return kExitSolved;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FABRIK + SQP inverse kinematics for the UR5 and KUKA LBR iiwa 14", "fsik"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--robot", common.robot, "robot: ur5 or kuka")
        ->check(CLI::IsMember({"ur5", "kuka", "iiwa14"}, CLI::ignore_case));
    sub->add_option("--model", common.model_file, "robot model JSON overriding the embedded one")
        ->check(CLI::ExistingFile);
  };

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "solve one IK query");
  add_common(solve_cmd);
  solve_cmd->add_option("--pose", sa.pose, "pose JSON file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--init", sa.init, "initial joint vector, comma separated (default zeros)");
  solve_cmd->add_option("--eps", sa.eps, "acceptance tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--nl", sa.n_l, "FABRIK sweeps before the optimizer takes over")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--nmax", sa.n_max, "sweep cap in fabrik mode")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--mode", sa.mode, "combined or fabrik")->check(CLI::IsMember({"combined", "fabrik"}));

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "run a random-query benchmark");
  add_common(bench_cmd);
  bench_cmd->add_option("--n", ba.n, "number of queries")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", ba.seed, "PRNG seed");
  bench_cmd->add_option("--modes", ba.modes, "comma separated modes, e.g. combined:5,fabrik:100");
  bench_cmd->add_option("--out", ba.out_prefix, "output file prefix")->required();
  bench_cmd->add_option("--workers", ba.workers, "worker threads (0 = available parallelism)")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--eps", ba.eps, "acceptance tolerance")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--repeats", ba.repeats, "timing repeats per query (fastest kept)")
      ->check(CLI::PositiveNumber);

  TraceArgs ta;
  auto* trace_cmd = app.add_subcommand("trace", "record the FABRIK distance series");
  add_common(trace_cmd);
  trace_cmd->add_option("--pose", ta.pose, "pose JSON file (robot trace)")->check(CLI::ExistingFile);
  trace_cmd->add_option("--init", ta.init, "initial joint vector for robot traces");
  trace_cmd->add_option("--chain", ta.chain, "link lengths of a planar chain laid along +x, e.g. 1,1");
  trace_cmd->add_option("--target", ta.target, "chain target x,y,z");
  trace_cmd->add_option("--eps", ta.eps, "convergence tolerance")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--cap", ta.cap, "sweep cap")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--out", ta.out, "output CSV")->required();
  trace_cmd->add_flag("--pre-bend", ta.pre_bend, "bend a straight chain before iterating");

  TrackArgs ka;
  auto* track_cmd = app.add_subcommand("track", "run the two-phase path tracking scenario");
  add_common(track_cmd);
  track_cmd->add_option("--phase1", ka.phase1, "phase-1 waypoints")->check(CLI::Range(2, 1000000));
  track_cmd->add_option("--phase2", ka.phase2, "phase-2 waypoints")->check(CLI::Range(2, 1000000));
  track_cmd->add_option("--init", ka.init, "initial joint vector (default scripted)");
  track_cmd->add_option("--end", ka.end, "phase-2 end joint vector (default scripted)");
  track_cmd->add_option("--out", ka.out, "output CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(common, sa, out);
    if (bench_cmd->parsed()) return cmd_bench(common, ba, out, err);
    if (trace_cmd->parsed()) return cmd_trace(common, ta, out);
    if (track_cmd->parsed()) return cmd_track(common, ka, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    ordered_json j;
    j["status"] = "Error";
    j["error"] = e.what();
    out << j.dump() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace fsik::cli
