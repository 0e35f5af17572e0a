#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvar/config.hpp"
#include "pvar/deformation.hpp"
#include "pvar/optimizer.hpp"

namespace pvar {

struct RegistrationResult {
  ObjectiveConfig resolved;
  Vec3 alignment_offset = Vec3::Zero();
  /// Source after barycenter alignment; its vertices are the control points.
  DiscreteShape aligned_source;
  Momenta momenta;
  Trajectory trajectory;
  DiscreteShape deformed;
  OptimReport report;
  /// Objective split at the start point and at every accepted iterate.
  std::vector<ObjectiveTerms> terms;
  double hamiltonian_drift = 0.0;
  double wall_time_s = 0.0;
};

using LogSink = std::function<void(const std::string&)>;

/// Barycenter alignment, then L-BFGS over the initial momenta of geodesic
/// shooting. Evaluations that fail (degenerate deformed shape, non-finite
/// trajectory) count as +inf for the line search.
RegistrationResult register_shapes(const DiscreteShape& source, const DiscreteShape& target,
                                   const RegistrationConfig& cfg, const LogSink& log = {});

/// Machine-readable summary written by the `register` command.
nlohmann::json summary_json(const RegistrationResult& result);

Eigen::VectorXd flatten(std::span<const Vec3> v);
Points unflatten(const Eigen::VectorXd& x);

}  // namespace pvar
