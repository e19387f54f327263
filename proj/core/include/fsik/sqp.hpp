#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsik::sqp {

using Vector = Eigen::VectorXd;

// Returns f(x) and writes the gradient into `grad` (already sized).
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct Problem {
  Objective objective;
  Vector lower;
  Vector upper;
  Vector x0;

  Eigen::Index dimension() const { return x0.size(); }
};

enum class Status { ToleranceReached, Stalled, IterationCap };

struct Result {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  Status status = Status::IterationCap;
  // Objective value of every accepted iterate, starting with x0.
  std::vector<double> accepted;
};

class NonFiniteObjective : public std::runtime_error {
 public:
  NonFiniteObjective(const std::string& what, Vector x) : std::runtime_error(what), x_(std::move(x)) {}
  const Vector& x() const { return x_; }

 private:
  Vector x_;
};

Result minimize(const Problem& problem, double stop_value, int max_iters = 200);

const char* to_string(Status status);

}  // namespace fsik::sqp
