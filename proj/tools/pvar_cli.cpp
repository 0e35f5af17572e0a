// Command-line front end: register, distance, synth, check.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pvar/checks.hpp"
#include "pvar/config.hpp"
#include "pvar/registration.hpp"
#include "pvar/shape_io.hpp"
#include "pvar/synthetic.hpp"

namespace fs = std::filesystem;
using namespace pvar;

namespace {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kConfig = 3,
  kIo = 4,
  kParse = 5,
  kRuntime = 6,
};

struct Options {
  std::string source, target, config, output, variant;
  std::optional<std::uint64_t> seed;
};

RegistrationConfig load_config(const Options& o) {
  RegistrationConfig cfg = o.config.empty() ? RegistrationConfig{}
                                            : load_registration_config(o.config);
  if (!o.variant.empty()) {
    try {
      cfg.variant = parse_variant(o.variant);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  return cfg;
}

std::string shape_extension(const DiscreteShape& s) { return s.is_mesh() ? ".obj" : ".vtk"; }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
}

int cmd_register(const Options& o) {
  const RegistrationConfig cfg = load_config(o);
  const DiscreteShape source = read_shape(o.source);
  const DiscreteShape target = read_shape(o.target);
  if (source.is_mesh() != target.is_mesh())
    throw ConfigError("source and target must both be curves or both be meshes");
  const fs::path out(o.output);
  ensure_dir(out);

  std::ostringstream log;
  const RegistrationResult r = register_shapes(source, target, cfg, [&](const std::string& line) {
    log << line << '\n';
    std::cerr << line << '\n';
  });

  const std::string ext = shape_extension(source);
  write_shape(r.deformed, out / ("deformed" + ext));
  const fs::path steps = out / "steps";
  ensure_dir(steps);
  for (int s = 0; s <= r.trajectory.steps(); ++s) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%03d", s);
    write_shape(r.aligned_source.with_vertices(r.trajectory.q[s]), steps / (name + ext));
  }
  nlohmann::json summary = summary_json(r);
  summary["config"] = to_json(cfg);
  write_file_atomic(out / "result.json", summary.dump(2) + "\n");
  write_file_atomic(out / "register.log", log.str());
  std::cout << "termination " << to_string(r.report.reason) << ", iterations "
            << r.report.iterations << ", objective " << r.report.history.front() << " -> "
            << r.report.history.back() << "\n";
  return kOk;
}

int cmd_distance(const Options& o) {
  const RegistrationConfig cfg = load_config(o);
  const DiscreteShape source = read_shape(o.source);
  const DiscreteShape target = read_shape(o.target);
  const ObjectiveConfig resolved = resolve(cfg, target);
  std::cout << "sigma_w " << format_double(resolved.data.kernel.sigma_w) << "\n";
  for (Variant v : kAllVariants)
    std::cout << to_string(v) << ' '
              << format_double(dissimilarity(v, source.atoms(), target.atoms(), resolved.data))
              << "\n";
  return kOk;
}

nlohmann::json points_json(const Points& pts) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& p : pts) a.push_back({p.x(), p.y(), p.z()});
  return a;
}

int cmd_synth(const Options& o) {
  SynthSpec spec = o.config.empty() ? SynthSpec{} : load_synth_spec(o.config);
  if (o.seed) spec.deformation_seed = *o.seed;
  const fs::path out(o.output);
  ensure_dir(out);

  const Polylines tree = make_tree(spec.tree);
  const Polylines trimmed = trim_tree(tree, spec.keep);
  const DeformedSample sample = random_diffeo(trimmed, spec.magnitude, spec.deformation_seed);

  write_shape(DiscreteShape(tree), out / "full_tree.vtk");
  write_shape(DiscreteShape(trimmed), out / "trimmed_tree.vtk");
  write_shape(DiscreteShape(sample.shape), out / "deformed_source.vtk");

  const GroundTruth& gt = sample.truth;
  nlohmann::json j;
  j["magnitude"] = gt.magnitude;
  j["seed"] = gt.seed;
  j["keep"] = spec.keep;
  j["shooting"] = {{"sigma0", gt.shooting.kernel.sigma0},
                   {"scales", gt.shooting.kernel.scales},
                   {"time_steps", gt.shooting.time_steps}};
  j["momenta"] = points_json(gt.momenta);
  j["original"] = points_json(gt.original);
  j["deformed"] = points_json(gt.deformed);
  write_file_atomic(out / "ground_truth.json", j.dump(2) + "\n");
  std::cout << "wrote " << tree.vertices.size() << "-vertex tree, " << trimmed.vertices.size()
            << "-vertex trimmed source to " << out.string() << "\n";
  return kOk;
}

int cmd_check(const Options& o) {
  const RegistrationConfig cfg = load_config(o);
  const auto results = run_builtin_checks(cfg);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-4s  %-34s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-matching varifold registration of curves and surfaces"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--variant", o.variant,
                    "varifold_distance | naive_half | partial | partial_normalized");
    sub->add_option("--seed", o.seed, "Random seed override");
  };

  CLI::App* reg = app.add_subcommand("register", "Register a source shape onto a target");
  reg->add_option("--source", o.source, "Source shape (.vtk curves or .obj mesh)")->required();
  reg->add_option("--target", o.target, "Target shape")->required();
  reg->add_option("--output", o.output, "Output directory")->required();
  common(reg);

  CLI::App* dist = app.add_subcommand("distance", "Print every dissimilarity between two shapes");
  dist->add_option("--source", o.source, "Source shape")->required();
  dist->add_option("--target", o.target, "Target shape")->required();
  common(dist);

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic tree experiment");
  synth->add_option("--config", o.config, "JSON tree/deformation specification");
  synth->add_option("--output", o.output, "Output directory")->required();
  synth->add_option("--seed", o.seed, "Deformation seed override");

  CLI::App* check = app.add_subcommand("check", "Run the built-in verification suite");
  common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (reg->parsed()) return cmd_register(o);
    if (dist->parsed()) return cmd_distance(o);
    if (synth->parsed()) return cmd_synth(o);
    return cmd_check(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
