#pragma once

#include <cstdint>
#include <span>

#include "pvar/deformation.hpp"
#include "pvar/geometry.hpp"

namespace pvar {

/// Parameters of a synthetic tree of 3D curves. Branch 0 is a trunk along +z;
/// branch b > 0 grows from branch (b-1)/2, so `depth` bounds the number of
/// bifurcation levels and `branches` must not exceed 2^(depth+1) - 1.
struct TreeSpec {
  int branches = 6;
  int points_per_branch = 12;
  int depth = 2;
  double length_scale = 1.0;
  std::uint64_t seed = 7;
  void validate() const;
};

/// Connected tree of smooth (cubic Hermite) branches, one label per branch.
/// A child branch shares its first vertex with the parent.
Polylines make_tree(const TreeSpec& spec);

/// Keeps the edges whose label is in `keep`; kept vertex coordinates are
/// copied bitwise, in their original order.
Polylines trim_tree(const Polylines& tree, std::span<const int> keep);

/// Record of a generated deformation: the momenta at the original vertices
/// and the kernel they were shot with.
struct GroundTruth {
  Momenta momenta;
  Points original;
  Points deformed;
  ShootingConfig shooting;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

struct DeformedSample {
  Polylines shape;
  GroundTruth truth;
};

/// Width of the single-Gaussian kernel of the generated deformation, as a
/// fraction of the bounding-box diagonal.
inline constexpr double kGroundTruthKernelFraction = 0.1;

/// Random diffeomorphism of a curve set: i.i.d. Gaussian momenta with
/// standard deviation `magnitude` x bbox diagonal at every vertex, shot
/// through a single-Gaussian kernel of width kGroundTruthKernelFraction x
/// diagonal with 20 RK4 steps.
DeformedSample random_diffeo(const Polylines& shape, double magnitude,
                             std::uint64_t seed,
                             double kernel_fraction = kGroundTruthKernelFraction);

/// Latitude/longitude sphere with outward normals, for mesh tests.
TriMesh make_sphere(int rings, int segments, double radius,
                    const Vec3& center = Vec3::Zero());

}  // namespace pvar
