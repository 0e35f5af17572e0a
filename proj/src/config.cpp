#include "pvar/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "pvar/shape_io.hpp"

namespace pvar {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key))
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid value for '") + key + "': " + e.what());
  }
}

void positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string(name) + " must be a positive finite number");
}

}  // namespace

void RegistrationConfig::validate() const {
  if (sigma_w) positive(*sigma_w, "sigma_w");
  if (sigma0) positive(*sigma0, "sigma0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ConfigError("lambda must be a non-negative finite number");
  positive(epsilon, "epsilon");
  if (scales.empty()) throw ConfigError("scales must not be empty");
  for (double s : scales) positive(s, "every scale");
  if (time_steps < 1) throw ConfigError("time_steps must be >= 1");
  try {
    optimizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("optimizer: ") + e.what());
  }
}

RegistrationConfig parse_registration_config(const json& j) {
  reject_unknown(j,
                 {"sigma_w", "lambda", "epsilon", "sigma0", "scales", "time_steps", "variant",
                  "optimizer", "seed"},
                 "registration config");
  RegistrationConfig cfg;
  if (j.contains("sigma_w") && !j["sigma_w"].is_null()) cfg.sigma_w = get_as<double>(j, "sigma_w");
  if (j.contains("sigma0") && !j["sigma0"].is_null()) cfg.sigma0 = get_as<double>(j, "sigma0");
  if (j.contains("lambda")) cfg.lambda = get_as<double>(j, "lambda");
  if (j.contains("epsilon")) cfg.epsilon = get_as<double>(j, "epsilon");
  if (j.contains("scales")) cfg.scales = get_as<std::vector<double>>(j, "scales");
  if (j.contains("time_steps")) cfg.time_steps = get_as<int>(j, "time_steps");
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("variant")) {
    try {
      cfg.variant = parse_variant(get_as<std::string>(j, "variant"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    reject_unknown(o,
                   {"max_iters", "history", "armijo", "backtrack", "max_backtracks",
                    "grad_tol", "rel_tol"},
                   "optimizer config");
    auto& opt = cfg.optimizer;
    if (o.contains("max_iters")) opt.max_iters = get_as<int>(o, "max_iters");
    if (o.contains("history")) opt.history = get_as<int>(o, "history");
    if (o.contains("armijo")) opt.armijo = get_as<double>(o, "armijo");
    if (o.contains("backtrack")) opt.backtrack = get_as<double>(o, "backtrack");
    if (o.contains("max_backtracks")) opt.max_backtracks = get_as<int>(o, "max_backtracks");
    if (o.contains("grad_tol")) opt.grad_tol = get_as<double>(o, "grad_tol");
    if (o.contains("rel_tol")) opt.rel_tol = get_as<double>(o, "rel_tol");
  }
  cfg.validate();
  return cfg;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

RegistrationConfig load_registration_config(const std::filesystem::path& path) {
  return parse_registration_config(load_json(path));
}

json to_json(const RegistrationConfig& cfg) {
  json j;
  j["sigma_w"] = cfg.sigma_w ? json(*cfg.sigma_w) : json(nullptr);
  j["sigma0"] = cfg.sigma0 ? json(*cfg.sigma0) : json(nullptr);
  j["lambda"] = cfg.lambda;
  j["epsilon"] = cfg.epsilon;
  j["scales"] = cfg.scales;
  j["time_steps"] = cfg.time_steps;
  j["variant"] = std::string(to_string(cfg.variant));
  j["seed"] = cfg.seed;
  j["optimizer"] = {{"max_iters", cfg.optimizer.max_iters},
                    {"history", cfg.optimizer.history},
                    {"armijo", cfg.optimizer.armijo},
                    {"backtrack", cfg.optimizer.backtrack},
                    {"max_backtracks", cfg.optimizer.max_backtracks},
                    {"grad_tol", cfg.optimizer.grad_tol},
                    {"rel_tol", cfg.optimizer.rel_tol}};
  return j;
}

ObjectiveConfig resolve(const RegistrationConfig& cfg, const DiscreteShape& target) {
  cfg.validate();
  const double diag = bounding_box(target.vertices()).diagonal();
  ObjectiveConfig out;
  out.variant = cfg.variant;
  out.lambda = cfg.lambda;
  out.data.epsilon = cfg.epsilon;
  out.data.kernel.sigma_w = cfg.sigma_w.value_or(kDefaultSigmaWFraction * diag);
  out.shooting.time_steps = cfg.time_steps;
  out.shooting.kernel.sigma0 = cfg.sigma0.value_or(kDefaultSigma0Fraction * diag);
  out.shooting.kernel.scales = cfg.scales;
  try {
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

SynthSpec parse_synth_spec(const json& j) {
  reject_unknown(j,
                 {"branches", "points_per_branch", "depth", "length_scale", "seed", "keep",
                  "magnitude", "deformation_seed"},
                 "synth spec");
  SynthSpec s;
  if (j.contains("branches")) s.tree.branches = get_as<int>(j, "branches");
  if (j.contains("points_per_branch"))
    s.tree.points_per_branch = get_as<int>(j, "points_per_branch");
  if (j.contains("depth")) s.tree.depth = get_as<int>(j, "depth");
  if (j.contains("length_scale")) s.tree.length_scale = get_as<double>(j, "length_scale");
  if (j.contains("seed")) s.tree.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("keep")) s.keep = get_as<std::vector<int>>(j, "keep");
  if (j.contains("magnitude")) s.magnitude = get_as<double>(j, "magnitude");
  if (j.contains("deformation_seed"))
    s.deformation_seed = get_as<std::uint64_t>(j, "deformation_seed");
  try {
    s.tree.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (s.keep.empty()) throw ConfigError("keep must not be empty");
  for (int k : s.keep)
    if (k < 0 || k >= s.tree.branches)
      throw ConfigError("keep label " + std::to_string(k) + " is not a branch");
  positive(s.magnitude, "magnitude");
  return s;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return parse_synth_spec(load_json(path));
}

}  // namespace pvar
