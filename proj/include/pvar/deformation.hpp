#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvar/dissimilarity.hpp"
#include "pvar/geometry.hpp"
#include "pvar/kernels.hpp"

namespace pvar {

/// One momentum vector per control point (control points = source vertices).
using Momenta = Points;

class ShootingError : public std::runtime_error {
public:
  ShootingError(const std::string& what, int step)
      : std::runtime_error(what), step_(step) {}
  int step() const noexcept { return step_; }

private:
  int step_;
};

struct ShootingConfig {
  int time_steps = 10;
  DeformationKernelConfig kernel;
  void validate() const;
};

/// Control points and momenta at t = k / time_steps, k = 0..time_steps.
struct Trajectory {
  std::vector<Points> q;
  std::vector<Momenta> p;
  int steps() const { return static_cast<int>(q.size()) - 1; }
};

/// v(x) = sum_j K_V(x, q_j) p_j at every query point.
Points velocity_at(std::span<const Vec3> points, std::span<const Vec3> q,
                   std::span<const Vec3> p, const DeformationKernelConfig& cfg);

/// H(q,p) = 1/2 sum_ij <p_i,p_j> K_V(q_i,q_j).
double hamiltonian(std::span<const Vec3> q, std::span<const Vec3> p,
                   const DeformationKernelConfig& cfg);

/// Integrates dq/dt = dH/dp, dp/dt = -dH/dq on [0,1] with fixed-step RK4.
Trajectory shoot(std::span<const Vec3> q0, std::span<const Vec3> p0,
                 const ShootingConfig& cfg);

/// Advects arbitrary points through the velocity field of a trajectory with
/// the same RK4 stages as the control points. A point equal to a control
/// point follows it bitwise.
Points flow_points(std::span<const Vec3> extra, const Trajectory& traj,
                   const ShootingConfig& cfg);

/// Integrates the flow backwards from t = 1 to t = 0: approximately the
/// inverse of flow_points.
Points flow_points_reverse(std::span<const Vec3> extra, const Trajectory& traj,
                           const ShootingConfig& cfg);

/// Full registration objective J(p0) = 2 lambda H(q0,p0) + D(phi_1(S), T),
/// with control points q0 = source vertices and phi_1(S) rebuilt from the shot
/// vertices.
struct ObjectiveConfig {
  ShootingConfig shooting;
  DissimilarityConfig data;
  Variant variant = Variant::partial_normalized;
  double lambda = 1e-2;
  void validate() const;
};

struct ObjectiveTerms {
  double total = 0.0;
  double data = 0.0;
  double regularization = 0.0;
};

ObjectiveTerms objective(std::span<const Vec3> p0, const DiscreteShape& source,
                         const DiscreteShape& target, const ObjectiveConfig& cfg);

struct ObjectiveGradient {
  ObjectiveTerms terms;
  Momenta grad;
};

/// Exact gradient of the discrete objective: dissimilarity gradient at the
/// shot vertices, transported back through every RK4 stage, plus the
/// regularization gradient 2 lambda dH/dp0.
ObjectiveGradient objective_gradient(std::span<const Vec3> p0,
                                     const DiscreteShape& source,
                                     const DiscreteShape& target,
                                     const ObjectiveConfig& cfg);

/// Source shape carried by the endpoint of a trajectory.
DiscreteShape deformed_shape(const DiscreteShape& source, const Trajectory& traj);

}  // namespace pvar
