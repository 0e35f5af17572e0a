#include "pvar/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Geometry>

namespace pvar {

namespace {

Vec3 any_perpendicular(const Vec3& t, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  for (;;) {
    const Vec3 r(n01(rng), n01(rng), n01(rng));
    const Vec3 c = t.cross(r);
    if (c.norm() > 1e-3 * r.norm()) return c.normalized();
  }
}

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis) * v;
}

double deg(double d) { return d * std::numbers::pi / 180.0; }

struct Branch {
  std::vector<int> vertex_ids;
  int level = 0;
};

}  // namespace

void TreeSpec::validate() const {
  if (branches < 1) throw std::invalid_argument("tree needs at least one branch");
  if (points_per_branch < 2)
    throw std::invalid_argument("points_per_branch must be >= 2");
  if (depth < 0 || depth > 20) throw std::invalid_argument("depth must lie in [0,20]");
  if (branches > (1L << (depth + 1)) - 1)
    throw std::invalid_argument("too many branches for the bifurcation depth");
  if (!(length_scale > 0.0) || !std::isfinite(length_scale))
    throw std::invalid_argument("length_scale must be positive");
}

Polylines make_tree(const TreeSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Polylines tree;
  std::vector<Branch> branches;
  const int n = spec.points_per_branch;

  for (int b = 0; b < spec.branches; ++b) {
    Vec3 start;
    Vec3 tangent;
    int start_id = -1;
    int level = 0;
    if (b == 0) {
      start = Vec3::Zero();
      tangent = Vec3::UnitZ();
    } else {
      const Branch& parent = branches[(b - 1) / 2];
      level = parent.level + 1;
      // first child continues from the tip, second grows from the side
      const int last = static_cast<int>(parent.vertex_ids.size()) - 1;
      const int at = (b % 2 == 1)
                         ? last
                         : std::clamp(static_cast<int>(std::lround(uniform(0.45, 0.75) * last)),
                                      1, last - 1 > 0 ? last - 1 : 1);
      start_id = parent.vertex_ids[at];
      start = tree.vertices[start_id];
      const Vec3 prev = tree.vertices[parent.vertex_ids[at - 1]];
      const Vec3 parent_dir = (start - prev).normalized();
      const Vec3 axis = any_perpendicular(parent_dir, rng);
      tangent = rotate(parent_dir, axis, deg(uniform(35.0, 55.0))).normalized();
    }

    const double length =
        spec.length_scale * std::pow(0.7, level) * (b == 0 ? 1.0 : uniform(0.85, 1.15));
    const Vec3 end_tangent =
        rotate(tangent, any_perpendicular(tangent, rng), deg(uniform(10.0, 25.0)));
    const Vec3 end = start + length * (tangent + end_tangent).normalized();

    Branch branch;
    branch.level = level;
    if (start_id < 0) {
      start_id = static_cast<int>(tree.vertices.size());
      tree.vertices.push_back(start);
    }
    branch.vertex_ids.push_back(start_id);
    for (int k = 1; k < n; ++k) {
      const double s = static_cast<double>(k) / (n - 1);
      const double s2 = s * s;
      const double s3 = s2 * s;
      const Vec3 p = (2 * s3 - 3 * s2 + 1) * start + (s3 - 2 * s2 + s) * length * tangent +
                     (-2 * s3 + 3 * s2) * end + (s3 - s2) * length * end_tangent;
      const int id = static_cast<int>(tree.vertices.size());
      tree.vertices.push_back(p);
      tree.edges.push_back({branch.vertex_ids.back(), id});
      tree.labels.push_back(b);
      branch.vertex_ids.push_back(id);
    }
    branches.push_back(std::move(branch));
  }
  return tree;
}

Polylines trim_tree(const Polylines& tree, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("trim_tree: empty keep set");
  if (tree.labels.size() != tree.edges.size())
    throw std::invalid_argument("trim_tree: tree has no branch labels");
  for (int label : keep)
    if (std::find(tree.labels.begin(), tree.labels.end(), label) == tree.labels.end())
      throw std::invalid_argument("trim_tree: unknown label " + std::to_string(label));

  auto kept = [&](int label) {
    return std::find(keep.begin(), keep.end(), label) != keep.end();
  };
  std::vector<int> remap(tree.vertices.size(), -1);
  for (std::size_t e = 0; e < tree.edges.size(); ++e)
    if (kept(tree.labels[e]))
      for (int v : tree.edges[e]) remap[v] = 0;

  Polylines out;
  for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
    if (remap[v] < 0) continue;
    remap[v] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(tree.vertices[v]);
  }
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    if (!kept(tree.labels[e])) continue;
    out.edges.push_back({remap[tree.edges[e][0]], remap[tree.edges[e][1]]});
    out.labels.push_back(tree.labels[e]);
  }
  return out;
}

DeformedSample random_diffeo(const Polylines& shape, double magnitude,
                             std::uint64_t seed, double kernel_fraction) {
  if (!(magnitude > 0.0) || !std::isfinite(magnitude))
    throw std::invalid_argument("random_diffeo: magnitude must be positive");
  if (!(kernel_fraction > 0.0))
    throw std::invalid_argument("random_diffeo: kernel fraction must be positive");
  const double diag = bounding_box(shape.vertices).diagonal();

  GroundTruth truth;
  truth.magnitude = magnitude;
  truth.seed = seed;
  truth.original = shape.vertices;
  truth.shooting.time_steps = 20;
  truth.shooting.kernel.sigma0 = kernel_fraction * diag;
  truth.shooting.kernel.scales = {1.0};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, magnitude * diag);
  truth.momenta.resize(shape.vertices.size());
  for (auto& m : truth.momenta) m = Vec3(normal(rng), normal(rng), normal(rng));

  Trajectory traj;
  try {
    traj = shoot(truth.original, truth.momenta, truth.shooting);
  } catch (const ShootingError& e) {
    throw std::runtime_error(std::string("random_diffeo: magnitude too large: ") +
                             e.what());
  }
  truth.deformed = traj.q.back();

  DeformedSample out;
  out.shape = shape;
  out.shape.vertices = truth.deformed;
  out.truth = std::move(truth);
  return out;
}

TriMesh make_sphere(int rings, int segments, double radius, const Vec3& center) {
  if (rings < 2 || segments < 3 || !(radius > 0.0))
    throw std::invalid_argument("make_sphere: invalid resolution or radius");
  TriMesh m;
  m.vertices.push_back(center + Vec3(0, 0, radius));
  for (int r = 1; r < rings; ++r) {
    const double theta = std::numbers::pi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      m.vertices.push_back(center + radius * Vec3(std::sin(theta) * std::cos(phi),
                                                  std::sin(theta) * std::sin(phi),
                                                  std::cos(theta)));
    }
  }
  const int south = static_cast<int>(m.vertices.size());
  m.vertices.push_back(center - Vec3(0, 0, radius));

  auto ring_vertex = [&](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) m.faces.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
  for (int r = 1; r < rings - 1; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      const int c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      m.faces.push_back({a, c, d});
      m.faces.push_back({a, d, b});
    }
  }
  for (int s = 0; s < segments; ++s)
    m.faces.push_back({south, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
  return m;
}

}  // namespace pvar
