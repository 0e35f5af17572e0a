#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace pvar {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Points = std::vector<Vec3>;

/// Raised for invalid shapes. `index()` names the offending edge/face when
/// there is one, and is -1 otherwise.
class GeometryError : public std::runtime_error {
public:
  explicit GeometryError(const std::string& what, long index = -1)
      : std::runtime_error(what), index_(index) {}
  long index() const noexcept { return index_; }

private:
  long index_;
};

/// One discrete varifold particle: a point in R^3 paired with a unit
/// direction (tangent for curves, normal for surfaces) and a positive mass.
struct Atom {
  Vec3 position;
  Vec3 direction;
  double weight = 0.0;
};
using Atoms = std::vector<Atom>;

/// Union of polylines stored as an edge list. Edge orientation follows the
/// vertex order of each pair. `labels` is either empty or holds one curve
/// label per edge.
struct Polylines {
  Points vertices;
  std::vector<std::array<int, 2>> edges;
  std::vector<int> labels;
};

/// Triangle mesh. Consistent face orientation is the caller's responsibility.
struct TriMesh {
  Points vertices;
  std::vector<std::array<int, 3>> faces;
};

struct BoundingBox {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  double diagonal() const { return (hi - lo).norm(); }
};

BoundingBox bounding_box(std::span<const Vec3> points);

/// One atom per edge: midpoint, normalized edge vector, edge length.
/// Throws GeometryError naming the edge on out-of-range indices or edges
/// shorter than 1e-12 of the bounding-box diagonal.
Atoms discretize_curves(const Polylines& shape);

/// One atom per face: centroid, unit normal (b-a)x(c-a), area.
Atoms discretize_mesh(const TriMesh& shape);

/// Gradient of a scalar with respect to the fields of one atom. The
/// direction component is taken with the direction treated as a free vector
/// in R^3; the pullback projects it onto the tangent space of the sphere.
struct AtomGradient {
  Vec3 position = Vec3::Zero();
  Vec3 direction = Vec3::Zero();
  double weight = 0.0;
};

/// A curve set or triangle mesh together with its atoms. Atoms are rebuilt
/// whenever vertices change, so an instance is always self-consistent.
class DiscreteShape {
public:
  DiscreteShape() = default;
  explicit DiscreteShape(Polylines curves);
  explicit DiscreteShape(TriMesh mesh);

  bool is_mesh() const { return std::holds_alternative<TriMesh>(geometry_); }
  bool empty() const { return atoms_.empty(); }

  const Points& vertices() const;
  std::size_t vertex_count() const { return vertices().size(); }
  const Atoms& atoms() const { return atoms_; }
  double total_mass() const;

  const Polylines& curves() const;
  const TriMesh& mesh() const;

  /// Same connectivity, new vertex positions.
  DiscreteShape with_vertices(Points vertices) const;

  /// Chain rule from per-atom gradients to per-vertex gradients, through
  /// midpoint/centroid, normalization and length/area.
  Points pull_back(std::span<const AtomGradient> atom_grads) const;

private:
  std::variant<Polylines, TriMesh> geometry_;
  Atoms atoms_;
};

/// Mass-weighted mean of atom positions.
Vec3 barycenter(const DiscreteShape& shape);

DiscreteShape translate(const DiscreteShape& shape, const Vec3& offset);

/// Translates `source` so that its barycenter coincides with `target`'s.
DiscreteShape align_barycenters(const DiscreteShape& source,
                                const DiscreteShape& target);

/// x -> R x + t. R must be a rotation (orthogonal, det +1) within 1e-9.
DiscreteShape apply_rigid(const DiscreteShape& shape, const Mat3& rotation,
                          const Vec3& translation);

}  // namespace pvar
