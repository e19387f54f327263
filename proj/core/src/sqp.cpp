#include "fsik/sqp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace fsik::sqp {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxBacktracks = 60;
constexpr double kStallTol = 1e-12;

class Evaluator {
 public:
  explicit Evaluator(const Problem& p) : p_(p) {}

  double operator()(const Vector& x, Vector& g) const {
    g.setZero(x.size());
    const double f = p_.objective(x, g);
    if (!std::isfinite(f) || !g.allFinite()) throw NonFiniteObjective("objective or gradient is not finite", x);
    return f;
  }

 private:
  const Problem& p_;
};

Vector project(const Vector& x, const Problem& p) { return x.cwiseMax(p.lower).cwiseMin(p.upper); }

}  // namespace

const char* to_string(Status status) {
  switch (status) {
    case Status::ToleranceReached: return "ToleranceReached";
    case Status::Stalled: return "Stalled";
    case Status::IterationCap: return "IterationCap";
  }
  return "?";
}

Result minimize(const Problem& problem, double stop_value, int max_iters) {
  const Eigen::Index n = problem.dimension();
  if (n == 0 || problem.lower.size() != n || problem.upper.size() != n) {
    throw std::invalid_argument("sqp::minimize: bounds and x0 must share a nonzero dimension");
  }
  if (!(stop_value > 0.0)) throw std::invalid_argument("sqp::minimize: stop_value must be positive");
  if (max_iters < 0) throw std::invalid_argument("sqp::minimize: max_iters must be non-negative");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(problem.lower[i] <= problem.x0[i] && problem.x0[i] <= problem.upper[i])) {
      throw std::invalid_argument("sqp::minimize: x0 outside bounds");
    }
  }

  const Evaluator eval(problem);
  Result res;
  res.x = problem.x0;
  Vector g(n);
  res.f = eval(res.x, g);
  res.accepted.push_back(res.f);
  if (res.f <= stop_value) {
    res.status = Status::ToleranceReached;
    return res;
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;
  bool scaled = false;
  Vector gn(n);

  while (res.iterations < max_iters) {
    Vector pg = g;
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lo = res.x[i] <= problem.lower[i] && g[i] > 0.0;
      const bool at_hi = res.x[i] >= problem.upper[i] && g[i] < 0.0;
      if (at_lo || at_hi) {
        pg[i] = 0.0;
      } else {
        free_idx.push_back(i);
      }
    }
    if (pg.norm() <= kStallTol) {
      res.status = Status::Stalled;
      return res;
    }

    Vector d = Vector::Zero(n);
    for (Eigen::Index a : free_idx) {
      for (Eigen::Index b : free_idx) d[a] -= h(a, b) * g[b];
    }
    if (g.dot(d) >= 0.0) {
      h.setIdentity();
      fresh = true;
      scaled = false;
      d = -pg;
    }

    double t = 1.0;
    bool ok = false;
    Vector xn, s;
    double fn = 0.0;
    for (int k = 0; k < kMaxBacktracks; ++k, t *= kShrink) {
      xn = project(res.x + t * d, problem);
      s = xn - res.x;
      if (s.norm() == 0.0) break;
      fn = eval(xn, gn);
      if (fn <= res.f + kArmijo * std::min(g.dot(s), 0.0) && fn <= res.f) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      if (!fresh) {
        h.setIdentity();
        fresh = true;
        scaled = false;
        continue;
      }
      res.status = Status::Stalled;
      return res;
    }

    ++res.iterations;
    const Vector y = gn - g;
    res.x = xn;
    res.f = fn;
    g = gn;
    res.accepted.push_back(res.f);
    if (res.f <= stop_value) {
      res.status = Status::ToleranceReached;
      return res;
    }
    if (s.norm() <= kStallTol && pg.norm() <= kStallTol) {
      res.status = Status::Stalled;
      return res;
    }

    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm() && sy > 0.0) {
      if (!scaled) {
        h = Eigen::MatrixXd::Identity(n, n) * (sy / y.dot(y));
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      h = (id - rho * s * y.transpose()) * h * (id - rho * y * s.transpose()) + rho * s * s.transpose();
      fresh = false;
    }
  }
  res.status = Status::IterationCap;
  return res;
}

}  // namespace fsik::sqp
