#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "pvar/deformation.hpp"
#include "pvar/optimizer.hpp"
#include "pvar/synthetic.hpp"

namespace pvar {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// All registration hyperparameters. Absent length scales are derived from
/// the target in resolve():
///   sigma0  -> 0.5 x target bbox diagonal
///   sigma_w -> 0.1 x target bbox diagonal
struct RegistrationConfig {
  std::optional<double> sigma_w;
  double lambda = 1e-2;
  double epsilon = 1e-3;
  std::optional<double> sigma0;
  std::vector<double> scales{1.0, 4.0, 8.0, 16.0};
  int time_steps = 10;
  Variant variant = Variant::partial_normalized;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
};

inline constexpr double kDefaultSigma0Fraction = 0.5;
inline constexpr double kDefaultSigmaWFraction = 0.1;

/// Unknown keys are rejected so that typos do not silently fall back to
/// defaults. Throws ConfigError.
RegistrationConfig parse_registration_config(const nlohmann::json& j);
RegistrationConfig load_registration_config(const std::filesystem::path& path);
nlohmann::json to_json(const RegistrationConfig& cfg);

/// Objective configuration with defaults filled in from the target shape.
ObjectiveConfig resolve(const RegistrationConfig& cfg, const DiscreteShape& target);

/// Synthetic-experiment specification for the `synth` command.
struct SynthSpec {
  TreeSpec tree;
  std::vector<int> keep{0, 1, 2};
  double magnitude = 0.05;
  std::uint64_t deformation_seed = 11;
};

SynthSpec parse_synth_spec(const nlohmann::json& j);
SynthSpec load_synth_spec(const std::filesystem::path& path);

nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace pvar
