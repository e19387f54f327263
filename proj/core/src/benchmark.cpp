#include "fsik/benchmark.hpp"

#include "fsik/csv.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace fsik::bench {

std::string Mode::label() const {
  return std::string(kind == SolveMode::Combined ? "combined:" : "fabrik:") + std::to_string(n);
}

Mode Mode::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("mode '" + text + "' must look like combined:5 or fabrik:100");
  const std::string name = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  Mode m;
  if (name == "combined") {
    m.kind = SolveMode::Combined;
  } else if (name == "fabrik" || name == "fabrik-only") {
    m.kind = SolveMode::FabrikOnly;
  } else {
    throw std::invalid_argument("mode '" + text + "': unknown kind '" + name + "'");
  }
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || n < 1) {
    throw std::invalid_argument("mode '" + text + "': iteration count must be a positive integer");
  }
  m.n = n;
  return m;
}

QuerySet generate_queries(const RobotModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw ContractViolation("generate_queries needs n >= 1");
  QuerySet set;
  set.robot = model.kind;
  set.seed = seed;
  set.queries.reserve(static_cast<std::size_t>(n));
  UniformStream rng(seed);
  const int k = model.dof();
  for (int q = 0; q < n; ++q) {
    Query query;
    query.id = q;
    query.theta_sample.resize(k);
    query.theta_init.resize(k);
    for (int i = 0; i < k; ++i) {
      const auto& lim = model.limits[static_cast<std::size_t>(i)];
      query.theta_sample[i] = rng.next(lim.lo, lim.hi);
    }
    for (int i = 0; i < k; ++i) {
      const auto& lim = model.limits[static_cast<std::size_t>(i)];
      query.theta_init[i] = rng.next(lim.lo, lim.hi);
    }
    query.t_des = forward_kinematics(model, query.theta_sample);
    set.queries.push_back(std::move(query));
  }
  return set;
}

namespace {

QueryRecord run_one(const RobotModel& model, const Query& q, const SolverConfig& config, int repeats) {
  IKQuery query{q.t_des, q.theta_init};
  IKResult r = fsik::solve(model, query, config);
  double t = r.solve_time;
  for (int i = 1; i < repeats; ++i) t = std::min(t, fsik::solve(model, query, config).solve_time);
  QueryRecord rec;
  rec.query_id = q.id;
  rec.status = r.status;
  rec.theta = r.theta;
  rec.eps_pos = r.error.eps_pos;
  rec.eps_rot = r.error.eps_rot;
  rec.mismatch = r.error.mismatch();
  rec.fabrik_iterations = r.fabrik_iterations;
  rec.optimizer_used = r.optimizer_used;
  rec.optimizer_iterations = r.optimizer_iterations;
  rec.time_seconds = t;
  return rec;
}

}  // namespace

std::vector<Report> run_benchmark(const RobotModel& model, const QuerySet& queries, const std::vector<Mode>& modes,
                                  const Options& options) {
  const std::size_t n = queries.queries.size();
  int workers = options.workers > 0 ? options.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  const int repeats = std::max(1, options.timing_repeats);

  std::vector<Report> reports;
  for (const Mode& mode : modes) {
    SolverConfig config = options.base;
    config.eps_tol = options.eps_tol;
    config.mode = mode.kind;
    if (mode.kind == SolveMode::Combined) {
      config.n_l = mode.n;
    } else {
      config.n_max = mode.n;
    }

    Report rep;
    rep.mode = mode;
    rep.robot = queries.robot;
    rep.seed = queries.seed;
    rep.prng = queries.prng;
    rep.per_query.resize(n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          rep.per_query[i] = run_one(model, queries.queries[i], config, repeats);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    double total = 0.0;
    for (const auto& rec : rep.per_query) {
      if (rec.status == SolveStatus::Solved) ++rep.solved;
      rep.times.push_back(rec.time_seconds);
      total += rec.time_seconds;
      rep.max_time = std::max(rep.max_time, rec.time_seconds);
    }
    rep.success_rate = n ? static_cast<double>(rep.solved) / static_cast<double>(n) : 0.0;
    rep.avg_time = n ? total / static_cast<double>(n) : 0.0;
    reports.push_back(std::move(rep));
  }
  return reports;
}

TimeSummary summarize_times(std::vector<double> values) {
  if (values.empty()) throw ContractViolation("summarize_times needs at least one value");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

void write_report_csv(const Report& report, const std::string& path) {
  auto out = open_output(path);
  out << "query_id,mode,status,eps_pos,eps_rot,fabrik_iters,opt_used,time_seconds\n";
  const std::string mode = report.mode.label();
  for (const auto& r : report.per_query) {
    out << r.query_id << ',' << mode << ',' << to_string(r.status) << ',' << format_double(r.eps_pos) << ','
        << format_double(r.eps_rot) << ',' << r.fabrik_iterations << ',' << (r.optimizer_used ? 1 : 0) << ','
        << format_double(r.time_seconds) << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::string summary_json(const Report& report) {
  nlohmann::ordered_json j;
  j["mode"] = report.mode.label();
  j["success_rate"] = report.success_rate;
  j["avg_time_s"] = report.avg_time;
  j["n"] = report.per_query.size();
  j["seed"] = report.seed;
  j["robot"] = to_string(report.robot);
  j["prng"] = report.prng;
  j["solved"] = report.solved;
  j["max_time_s"] = report.max_time;
  return j.dump(2);
}

void write_summary_json(const Report& report, const std::string& path) {
  auto out = open_output(path);
  out << summary_json(report) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void export_time_distribution(const Report& report, const std::string& path) {
  if (report.per_query.empty()) throw ContractViolation("export_time_distribution needs a non-empty report");
  auto out = open_output(path);
  const std::string mode = report.mode.label();
  out << "query_id,mode,time_seconds,log10_time\n";
  std::vector<double> times;
  for (const auto& r : report.per_query) {
    out << r.query_id << ',' << mode << ',' << format_double(r.time_seconds) << ','
        << format_double(std::log10(r.time_seconds)) << '\n';
    times.push_back(r.time_seconds);
  }
  const TimeSummary s = summarize_times(times);
  const std::pair<const char*, double> rows[] = {
      {"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
  for (const auto& [name, v] : rows) {
    out << name << ',' << mode << ',' << format_double(v) << ',' << format_double(std::log10(v)) << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace fsik::bench
