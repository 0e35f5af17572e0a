#include "pvar/registration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace pvar {

Eigen::VectorXd flatten(std::span<const Vec3> v) {
  Eigen::VectorXd x(3 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x.segment<3>(3 * i) = v[i];
  return x;
}

Points unflatten(const Eigen::VectorXd& x) {
  Points v(x.size() / 3);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.segment<3>(3 * i);
  return v;
}

RegistrationResult register_shapes(const DiscreteShape& source, const DiscreteShape& target,
                                   const RegistrationConfig& cfg, const LogSink& log) {
  const auto t0 = std::chrono::steady_clock::now();
  RegistrationResult res;
  res.resolved = resolve(cfg, target);
  res.alignment_offset = barycenter(target) - barycenter(source);
  res.aligned_source = translate(source, res.alignment_offset);

  const ObjectiveConfig& ocfg = res.resolved;
  const DiscreteShape& src = res.aligned_source;
  ObjectiveTerms last_terms;

  const Oracle oracle = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    try {
      const ObjectiveGradient og = objective_gradient(unflatten(x), src, target, ocfg);
      grad = flatten(og.grad);
      last_terms = og.terms;
      return og.terms.total;
    } catch (const GeometryError&) {
    } catch (const ShootingError&) {
    }
    grad.setZero();
    return std::numeric_limits<double>::infinity();
  };

  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(3 * src.vertex_count());
  const IterationCallback on_iter = [&](int it, const Eigen::VectorXd&, double f) {
    res.terms.push_back(last_terms);
    if (log) {
      std::ostringstream os;
      os << "iter " << it << " J=" << f << " data=" << last_terms.data
         << " reg=" << last_terms.regularization;
      log(os.str());
    }
  };

  // capture the split at the start point
  {
    Eigen::VectorXd g(x0.size());
    const double f = oracle(x0, g);
    if (log) {
      std::ostringstream os;
      os << "start J=" << f << " variant=" << to_string(ocfg.variant)
         << " sigma_w=" << ocfg.data.kernel.sigma_w << " sigma0=" << ocfg.shooting.kernel.sigma0
         << " lambda=" << ocfg.lambda;
      log(os.str());
    }
    res.terms.push_back(last_terms);
  }

  MinimizeResult mr = minimize(x0, oracle, cfg.optimizer, on_iter);
  res.report = std::move(mr.report);
  res.momenta = unflatten(mr.x);
  res.trajectory = shoot(src.vertices(), res.momenta, ocfg.shooting);
  res.deformed = deformed_shape(src, res.trajectory);

  const auto& k = ocfg.shooting.kernel;
  const double h0 = hamiltonian(res.trajectory.q.front(), res.trajectory.p.front(), k);
  const double h1 = hamiltonian(res.trajectory.q.back(), res.trajectory.p.back(), k);
  res.hamiltonian_drift = std::abs(h1 - h0) / std::max(h0, 1e-12);
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (log) {
    std::ostringstream os;
    os << "done: " << to_string(res.report.reason) << " after " << res.report.iterations
       << " iterations, |grad|=" << res.report.final_grad_norm
       << ", hamiltonian drift=" << res.hamiltonian_drift;
    log(os.str());
  }
  return res;
}

nlohmann::json summary_json(const RegistrationResult& r) {
  using nlohmann::json;
  json j;
  j["variant"] = std::string(to_string(r.resolved.variant));
  j["resolved"] = {{"sigma_w", r.resolved.data.kernel.sigma_w},
                   {"epsilon", r.resolved.data.epsilon},
                   {"lambda", r.resolved.lambda},
                   {"sigma0", r.resolved.shooting.kernel.sigma0},
                   {"scales", r.resolved.shooting.kernel.scales},
                   {"time_steps", r.resolved.shooting.time_steps}};
  j["alignment_offset"] = {r.alignment_offset.x(), r.alignment_offset.y(),
                           r.alignment_offset.z()};
  j["termination"] = std::string(to_string(r.report.reason));
  j["iterations"] = r.report.iterations;
  j["evaluations"] = r.report.evaluations;
  j["final_grad_norm"] = r.report.final_grad_norm;
  j["objective_history"] = r.report.history;
  json split = json::array();
  for (const auto& t : r.terms)
    split.push_back({{"total", t.total}, {"data", t.data}, {"regularization", t.regularization}});
  j["objective_split"] = split;
  j["hamiltonian_drift"] = r.hamiltonian_drift;
  j["wall_time_s"] = r.wall_time_s;
  json mom = json::array();
  for (const auto& p : r.momenta) mom.push_back({p.x(), p.y(), p.z()});
  j["momenta"] = mom;
  return j;
}

}  // namespace pvar
