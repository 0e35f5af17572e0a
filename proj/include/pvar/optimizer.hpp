#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace pvar {

struct OptimizerConfig {
  int max_iters = 200;
  /// Number of stored curvature pairs.
  int history = 10;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 50;
  double grad_tol = 1e-8;
  double rel_tol = 1e-9;
  void validate() const;
};

enum class Termination { converged, max_iters, line_search_failure };
std::string_view to_string(Termination t);

struct OptimReport {
  int iterations = 0;
  int evaluations = 0;
  /// Objective at the start point followed by every accepted iterate.
  std::vector<double> history;
  double final_grad_norm = 0.0;
  Termination reason = Termination::max_iters;
};

/// Returns f(x) and writes the gradient into `grad` (already sized).
using Oracle = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Called after each accepted step with the iteration index and iterate.
using IterationCallback =
    std::function<void(int iteration, const Eigen::VectorXd& x, double f)>;

struct MinimizeResult {
  Eigen::VectorXd x;
  OptimReport report;
};

/// L-BFGS with Armijo backtracking. Non-finite trial values are treated as
/// failed trials. When a quasi-Newton line search fails, the memory is
/// dropped and one steepest-descent search is attempted before giving up.
/// Throws std::runtime_error when the start point is not finite.
MinimizeResult minimize(Eigen::VectorXd x0, const Oracle& oracle,
                        const OptimizerConfig& cfg,
                        const IterationCallback& on_iteration = {});

}  // namespace pvar
