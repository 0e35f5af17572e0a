#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "pvar/optimizer.hpp"

using namespace pvar;

namespace {

// f(x) = 1/2 x'Ax - b'x with an ill-conditioned diagonal A.
struct Quadratic {
  Eigen::VectorXd diag, b;
  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
    g = diag.cwiseProduct(x) - b;
    return 0.5 * x.dot(diag.cwiseProduct(x)) - b.dot(x);
  }
};

}  // namespace

TEST(Minimize, SolvesIllConditionedQuadratic) {
  const int n = 20;
  Quadratic q{Eigen::VectorXd::LinSpaced(n, 1.0, 100.0), Eigen::VectorXd::Ones(n)};
  OptimizerConfig cfg;
  cfg.rel_tol = 1e-300;
  cfg.grad_tol = 1e-6;
  const MinimizeResult r = minimize(Eigen::VectorXd::Zero(n), q, cfg);
  EXPECT_EQ(r.report.reason, Termination::converged);
  EXPECT_LT(r.report.final_grad_norm, 1e-6);
  EXPECT_LT((r.x - q.b.cwiseQuotient(q.diag)).norm(), 1e-6);
  EXPECT_EQ(r.report.history.size(), static_cast<std::size_t>(r.report.iterations) + 1);
  for (std::size_t i = 1; i < r.report.history.size(); ++i)
    EXPECT_LE(r.report.history[i], r.report.history[i - 1]);
}

TEST(Minimize, Rosenbrock) {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  OptimizerConfig cfg;
  cfg.max_iters = 500;
  const MinimizeResult r = minimize(Eigen::Vector2d(-1.2, 1.0), f, cfg);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(Minimize, StopsAtMaxIters) {
  Quadratic q{Eigen::VectorXd::LinSpaced(50, 1.0, 1e4), Eigen::VectorXd::Ones(50)};
  OptimizerConfig cfg;
  cfg.max_iters = 3;
  const MinimizeResult r = minimize(Eigen::VectorXd::Zero(50), q, cfg);
  EXPECT_EQ(r.report.reason, Termination::max_iters);
  EXPECT_EQ(r.report.iterations, 3);
  EXPECT_EQ(r.report.history.size(), 4u);
}

TEST(Minimize, InfiniteTrialsAreRejected) {
  // objective undefined (reported as +inf) beyond x = 1
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    if (x[0] > 1.0) {
      g.setZero();
      return std::numeric_limits<double>::infinity();
    }
    g[0] = -1.0 / (1.0 - x[0] + 1e-3) + 2 * x[0];
    return std::log(1.0 - x[0] + 1e-3) + x[0] * x[0];
  };
  const MinimizeResult r = minimize(Eigen::VectorXd::Zero(1), f, OptimizerConfig{});
  EXPECT_LE(r.x[0], 1.0);
  for (double h : r.report.history) EXPECT_TRUE(std::isfinite(h));
}

TEST(Minimize, RejectsNonFiniteStart) {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = x;
    return x.squaredNorm();
  };
  Eigen::VectorXd x0(2);
  x0 << NAN, 0;
  EXPECT_THROW(minimize(x0, f, OptimizerConfig{}), std::runtime_error);
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.history = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.backtrack = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.max_iters = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
