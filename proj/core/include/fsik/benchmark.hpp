#pragma once

#include "fsik/solver.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fsik::bench {

inline constexpr const char* kPrngName = "mt19937_64/v1";

// Seeded stream of doubles in [0, 1) built from the top 53 bits of mt19937_64,
// so the sequence does not depend on the standard library's distributions.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

struct Query {
  int id = 0;
  Transform t_des;
  JointVector theta_sample;
  JointVector theta_init;
};

struct QuerySet {
  RobotKind robot = RobotKind::UR5;
  std::uint64_t seed = 0;
  std::string prng = kPrngName;
  std::vector<Query> queries;
};

struct Mode {
  SolveMode kind = SolveMode::Combined;
  // n_l for combined runs, n_max for FABRIK-only runs.
  int n = 5;

  std::string label() const;
  static Mode parse(const std::string& text);
};

struct QueryRecord {
  int query_id = 0;
  SolveStatus status = SolveStatus::Failed;
  JointVector theta;
  double eps_pos = 0.0;
  double eps_rot = 0.0;
  double mismatch = 0.0;
  int fabrik_iterations = 0;
  bool optimizer_used = false;
  int optimizer_iterations = 0;
  double time_seconds = 0.0;
};

struct Report {
  Mode mode;
  RobotKind robot = RobotKind::UR5;
  std::uint64_t seed = 0;
  std::string prng = kPrngName;
  int solved = 0;
  double success_rate = 0.0;
  double avg_time = 0.0;
  double max_time = 0.0;
  std::vector<double> times;
  std::vector<QueryRecord> per_query;
};

struct Options {
  double eps_tol = 1e-6;
  // 0 selects the available hardware parallelism.
  int workers = 1;
  // Each query is timed this many times and the fastest run is kept.
  int timing_repeats = 1;
  SolverConfig base;
};

struct TimeSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

QuerySet generate_queries(const RobotModel& model, int n, std::uint64_t seed);

std::vector<Report> run_benchmark(const RobotModel& model, const QuerySet& queries, const std::vector<Mode>& modes,
                                  const Options& options = {});

// Linear-interpolated quartiles of `values`.
TimeSummary summarize_times(std::vector<double> values);

void write_report_csv(const Report& report, const std::string& path);
void write_summary_json(const Report& report, const std::string& path);
void export_time_distribution(const Report& report, const std::string& path);

std::string summary_json(const Report& report);

}  // namespace fsik::bench
