#include "pvar/deformation.hpp"

#include <cmath>

namespace pvar {

namespace {

struct Phase {
  Points q;
  Momenta p;
};

bool all_finite(std::span<const Vec3> pts) {
  for (const auto& v : pts)
    if (!v.allFinite()) return false;
  return true;
}

Points axpy(std::span<const Vec3> y, double h, std::span<const Vec3> k) {
  Points out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

void add_scaled(Points& acc, double h, std::span<const Vec3> k) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += h * k[i];
}

Phase hamiltonian_field(const Phase& s, const DeformationKernelConfig& cfg) {
  const std::size_t n = s.q.size();
  Phase d;
  d.q = velocity_at(s.q, s.q, s.p, cfg);
  d.p.assign(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vec3 dq = s.q[i] - s.q[j];
      const KernelTerms kt = deformation_kernel_terms(dq.squaredNorm(), cfg);
      d.p[i] += (s.p[i].dot(s.p[j]) * kt.g) * dq;
    }
  }
  return d;
}

// Adjoint of hamiltonian_field at state s applied to output cotangent `bar`.
Phase hamiltonian_field_vjp(const Phase& s, const Phase& bar,
                            const DeformationKernelConfig& cfg) {
  const std::size_t n = s.q.size();
  Phase out{Points(n, Vec3::Zero()), Momenta(n, Vec3::Zero())};
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3 dq = s.q[a] - s.q[j];
      const KernelTerms kt = deformation_kernel_terms(dq.squaredNorm(), cfg);
      out.p[a] += kt.value * bar.q[j];
      if (a == j) continue;
      const Vec3 dl = bar.p[a] - bar.p[j];
      const double cross = dl.dot(dq);
      const double pp = s.p[a].dot(s.p[j]);
      out.p[a] += (kt.g * cross) * s.p[j];
      out.q[a] += (-kt.g * (bar.q[a].dot(s.p[j]) + bar.q[j].dot(s.p[a]))) * dq;
      out.q[a] += pp * (kt.g * dl - (kt.h * cross) * dq);
    }
  }
  return out;
}

Phase advance(const Phase& s, double h, const Phase& k) {
  return {axpy(s.q, h, k.q), axpy(s.p, h, k.p)};
}

// One RK4 step of the Hamiltonian system, optionally carrying extra points
// through the same stages.
Phase rk4_step(const Phase& s, double h, const DeformationKernelConfig& cfg,
               Points* extra = nullptr) {
  const Phase k1 = hamiltonian_field(s, cfg);
  const Phase s2 = advance(s, 0.5 * h, k1);
  const Phase k2 = hamiltonian_field(s2, cfg);
  const Phase s3 = advance(s, 0.5 * h, k2);
  const Phase k3 = hamiltonian_field(s3, cfg);
  const Phase s4 = advance(s, h, k3);
  const Phase k4 = hamiltonian_field(s4, cfg);

  if (extra != nullptr) {
    const Points& x = *extra;
    const Points v1 = velocity_at(x, s.q, s.p, cfg);
    const Points x2 = axpy(x, 0.5 * h, v1);
    const Points v2 = velocity_at(x2, s2.q, s2.p, cfg);
    const Points x3 = axpy(x, 0.5 * h, v2);
    const Points v3 = velocity_at(x3, s3.q, s3.p, cfg);
    const Points x4 = axpy(x, h, v3);
    const Points v4 = velocity_at(x4, s4.q, s4.p, cfg);
    Points next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      next[i] = x[i] + (h / 6.0) * (v1[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
    *extra = std::move(next);
  }

  Phase next{Points(s.q.size()), Momenta(s.p.size())};
  for (std::size_t i = 0; i < s.q.size(); ++i) {
    next.q[i] = s.q[i] + (h / 6.0) * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
    next.p[i] = s.p[i] + (h / 6.0) * (k1.p[i] + 2.0 * k2.p[i] + 2.0 * k3.p[i] + k4.p[i]);
  }
  return next;
}

// Reverse-mode pass through one RK4 step starting at s; `bar` is the
// cotangent of the step output and is overwritten with that of its input.
void rk4_step_vjp(const Phase& s, double h, const DeformationKernelConfig& cfg,
                  Phase& bar) {
  const Phase k1 = hamiltonian_field(s, cfg);
  const Phase s2 = advance(s, 0.5 * h, k1);
  const Phase k2 = hamiltonian_field(s2, cfg);
  const Phase s3 = advance(s, 0.5 * h, k2);
  const Phase k3 = hamiltonian_field(s3, cfg);
  const Phase s4 = advance(s, h, k3);

  const std::size_t n = s.q.size();
  auto scaled = [&](double c) {
    return Phase{axpy(Points(n, Vec3::Zero()), c, bar.q),
                 axpy(Momenta(n, Vec3::Zero()), c, bar.p)};
  };
  Phase k1_bar = scaled(h / 6.0);
  Phase k2_bar = scaled(h / 3.0);
  Phase k3_bar = scaled(h / 3.0);
  const Phase k4_bar = scaled(h / 6.0);

  const Phase s4_bar = hamiltonian_field_vjp(s4, k4_bar, cfg);
  add_scaled(bar.q, 1.0, s4_bar.q);
  add_scaled(bar.p, 1.0, s4_bar.p);
  add_scaled(k3_bar.q, h, s4_bar.q);
  add_scaled(k3_bar.p, h, s4_bar.p);

  const Phase s3_bar = hamiltonian_field_vjp(s3, k3_bar, cfg);
  add_scaled(bar.q, 1.0, s3_bar.q);
  add_scaled(bar.p, 1.0, s3_bar.p);
  add_scaled(k2_bar.q, 0.5 * h, s3_bar.q);
  add_scaled(k2_bar.p, 0.5 * h, s3_bar.p);

  const Phase s2_bar = hamiltonian_field_vjp(s2, k2_bar, cfg);
  add_scaled(bar.q, 1.0, s2_bar.q);
  add_scaled(bar.p, 1.0, s2_bar.p);
  add_scaled(k1_bar.q, 0.5 * h, s2_bar.q);
  add_scaled(k1_bar.p, 0.5 * h, s2_bar.p);

  const Phase s1_bar = hamiltonian_field_vjp(s, k1_bar, cfg);
  add_scaled(bar.q, 1.0, s1_bar.q);
  add_scaled(bar.p, 1.0, s1_bar.p);
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": size mismatch");
}

Points integrate_extra(std::span<const Vec3> extra, const Trajectory& traj,
                       const ShootingConfig& cfg, bool reverse) {
  cfg.validate();
  const int steps = traj.steps();
  if (steps < 1) throw std::invalid_argument("trajectory has no steps");
  const double h = 1.0 / steps;
  Points x(extra.begin(), extra.end());
  for (int k = 0; k < steps; ++k) {
    const int n = reverse ? steps - k : k;
    const Phase s{traj.q[n], traj.p[n]};
    rk4_step(s, reverse ? -h : h, cfg.kernel, &x);
    if (!all_finite(x)) throw ShootingError("non-finite point during flow", n);
  }
  return x;
}

}  // namespace

void ShootingConfig::validate() const {
  if (time_steps < 1) throw std::invalid_argument("time_steps must be >= 1");
  kernel.validate();
}

void ObjectiveConfig::validate() const {
  shooting.validate();
  data.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be a non-negative finite number");
}

Points velocity_at(std::span<const Vec3> points, std::span<const Vec3> q,
                   std::span<const Vec3> p, const DeformationKernelConfig& cfg) {
  check_sizes(q.size(), p.size(), "velocity_at");
  Points v(points.size(), Vec3::Zero());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      v[i] += deformation_kernel(points[i], q[j], cfg) * p[j];
  return v;
}

double hamiltonian(std::span<const Vec3> q, std::span<const Vec3> p,
                   const DeformationKernelConfig& cfg) {
  check_sizes(q.size(), p.size(), "hamiltonian");
  const Points v = velocity_at(q, q, p, cfg);
  double h = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) h += p[i].dot(v[i]);
  return 0.5 * h;
}

Trajectory shoot(std::span<const Vec3> q0, std::span<const Vec3> p0,
                 const ShootingConfig& cfg) {
  cfg.validate();
  check_sizes(q0.size(), p0.size(), "shoot");
  Trajectory traj;
  traj.q.reserve(cfg.time_steps + 1);
  traj.p.reserve(cfg.time_steps + 1);
  Phase s{Points(q0.begin(), q0.end()), Momenta(p0.begin(), p0.end())};
  if (!all_finite(s.q) || !all_finite(s.p))
    throw ShootingError("non-finite initial state", 0);
  const double h = 1.0 / cfg.time_steps;
  traj.q.push_back(s.q);
  traj.p.push_back(s.p);
  for (int k = 0; k < cfg.time_steps; ++k) {
    s = rk4_step(s, h, cfg.kernel);
    if (!all_finite(s.q) || !all_finite(s.p))
      throw ShootingError("non-finite state at step " + std::to_string(k + 1), k + 1);
    traj.q.push_back(s.q);
    traj.p.push_back(s.p);
  }
  return traj;
}

Points flow_points(std::span<const Vec3> extra, const Trajectory& traj,
                   const ShootingConfig& cfg) {
  return integrate_extra(extra, traj, cfg, false);
}

Points flow_points_reverse(std::span<const Vec3> extra, const Trajectory& traj,
                           const ShootingConfig& cfg) {
  return integrate_extra(extra, traj, cfg, true);
}

DiscreteShape deformed_shape(const DiscreteShape& source, const Trajectory& traj) {
  return source.with_vertices(traj.q.back());
}

ObjectiveTerms objective(std::span<const Vec3> p0, const DiscreteShape& source,
                         const DiscreteShape& target, const ObjectiveConfig& cfg) {
  cfg.validate();
  const Trajectory traj = shoot(source.vertices(), p0, cfg.shooting);
  ObjectiveTerms t;
  t.regularization =
      2.0 * cfg.lambda * hamiltonian(source.vertices(), p0, cfg.shooting.kernel);
  t.data = dissimilarity(cfg.variant, deformed_shape(source, traj).atoms(),
                         target.atoms(), cfg.data);
  t.total = t.regularization + t.data;
  return t;
}

ObjectiveGradient objective_gradient(std::span<const Vec3> p0,
                                     const DiscreteShape& source,
                                     const DiscreteShape& target,
                                     const ObjectiveConfig& cfg) {
  cfg.validate();
  const Points& q0 = source.vertices();
  const Trajectory traj = shoot(q0, p0, cfg.shooting);
  const VertexGradients data =
      grad_source_vertices(cfg.variant, deformed_shape(source, traj), target, cfg.data);

  ObjectiveGradient out;
  out.terms.data = data.value;
  out.terms.regularization =
      2.0 * cfg.lambda * hamiltonian(q0, p0, cfg.shooting.kernel);
  out.terms.total = out.terms.data + out.terms.regularization;

  const std::size_t n = q0.size();
  Phase bar{data.grads, Momenta(n, Vec3::Zero())};
  const double h = 1.0 / cfg.shooting.time_steps;
  for (int k = cfg.shooting.time_steps - 1; k >= 0; --k)
    rk4_step_vjp(Phase{traj.q[k], traj.p[k]}, h, cfg.shooting.kernel, bar);

  const Points reg = velocity_at(q0, q0, p0, cfg.shooting.kernel);
  out.grad = std::move(bar.p);
  for (std::size_t i = 0; i < n; ++i) out.grad[i] += 2.0 * cfg.lambda * reg[i];
  return out;
}

}  // namespace pvar
