#include "pvar/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace pvar {

namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const std::deque<CurvaturePair>& mem,
                         const Eigen::VectorXd& g) {
  Eigen::VectorXd d = -g;
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * mem[k].s.dot(d);
    d -= alpha[k] * mem[k].y;
  }
  if (!mem.empty()) {
    const auto& last = mem.back();
    d *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * mem[k].y.dot(d);
    d += (alpha[k] - beta) * mem[k].s;
  }
  return d;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (history < 1) throw std::invalid_argument("history must be >= 1");
  if (!(armijo > 0.0 && armijo < 1.0))
    throw std::invalid_argument("armijo must lie in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("backtrack must lie in (0,1)");
  if (max_backtracks < 1) throw std::invalid_argument("max_backtracks must be >= 1");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be > 0");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iters: return "max_iters";
    case Termination::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

MinimizeResult minimize(Eigen::VectorXd x0, const Oracle& oracle,
                        const OptimizerConfig& cfg,
                        const IterationCallback& on_iteration) {
  cfg.validate();
  MinimizeResult out;
  OptimReport& rep = out.report;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(x.size());
  double f = oracle(x, g);
  rep.evaluations = 1;
  if (!std::isfinite(f) || !g.allFinite())
    throw std::runtime_error("objective is not finite at the start point");
  rep.history.push_back(f);

  std::deque<CurvaturePair> mem;
  Eigen::VectorXd x_trial(x.size());
  Eigen::VectorXd g_trial(x.size());
  rep.reason = Termination::max_iters;

  if (g.norm() < cfg.grad_tol) rep.reason = Termination::converged;

  while (rep.reason != Termination::converged && rep.iterations < cfg.max_iters) {
    bool steepest = mem.empty();
    Eigen::VectorXd d = steepest ? Eigen::VectorXd(-g) : two_loop(mem, g);
    if (!(g.dot(d) < 0.0)) {
      mem.clear();
      steepest = true;
      d = -g;
    }

    double f_trial = 0.0;
    double step = 0.0;
    bool accepted = false;
    for (;;) {
      step = steepest ? std::min(1.0, 1.0 / g.norm()) : 1.0;
      const double slope = g.dot(d);
      for (int b = 0; b < cfg.max_backtracks; ++b, step *= cfg.backtrack) {
        x_trial = x + step * d;
        f_trial = oracle(x_trial, g_trial);
        ++rep.evaluations;
        if (std::isfinite(f_trial) && g_trial.allFinite() &&
            f_trial <= f + cfg.armijo * step * slope && f_trial < f) {
          accepted = true;
          break;
        }
      }
      if (accepted || steepest) break;
      mem.clear();
      steepest = true;
      d = -g;
    }
    if (!accepted) {
      rep.reason = Termination::line_search_failure;
      break;
    }

    CurvaturePair pair{x_trial - x, g_trial - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-12 * pair.s.norm() * pair.y.norm() && sy > 0.0) {
      pair.rho = 1.0 / sy;
      mem.push_back(std::move(pair));
      if (static_cast<int>(mem.size()) > cfg.history) mem.pop_front();
    }

    const double f_prev = f;
    x.swap(x_trial);
    g.swap(g_trial);
    f = f_trial;
    ++rep.iterations;
    rep.history.push_back(f);
    if (on_iteration) on_iteration(rep.iterations, x, f);

    const double scale = std::max({std::abs(f_prev), std::abs(f), 1e-300});
    if (g.norm() < cfg.grad_tol || std::abs(f_prev - f) <= cfg.rel_tol * scale)
      rep.reason = Termination::converged;
  }

  rep.final_grad_norm = g.norm();
  out.x = std::move(x);
  return out;
}

}  // namespace pvar
