#include "pvar/geometry.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace pvar {

namespace {

constexpr double kDegenerateTol = 1e-12;

template <std::size_t N>
void check_indices(const std::array<int, N>& cell, std::size_t n_vertices,
                   std::size_t cell_index, const char* kind) {
  for (int v : cell) {
    if (v < 0 || static_cast<std::size_t>(v) >= n_vertices) {
      throw GeometryError(std::string(kind) + " " + std::to_string(cell_index) +
                              " references vertex " + std::to_string(v) +
                              " out of range",
                          static_cast<long>(cell_index));
    }
  }
}

}  // namespace

BoundingBox bounding_box(std::span<const Vec3> points) {
  BoundingBox box;
  if (points.empty()) return box;
  box.lo = points.front();
  box.hi = points.front();
  for (const auto& p : points) {
    box.lo = box.lo.cwiseMin(p);
    box.hi = box.hi.cwiseMax(p);
  }
  return box;
}

Atoms discretize_curves(const Polylines& shape) {
  if (!shape.labels.empty() && shape.labels.size() != shape.edges.size())
    throw GeometryError("label count does not match edge count");
  if (shape.edges.empty() && !shape.vertices.empty())
    throw GeometryError("polylines with vertices but no edges");

  const double tol = kDegenerateTol * bounding_box(shape.vertices).diagonal();
  Atoms atoms;
  atoms.reserve(shape.edges.size());
  for (std::size_t e = 0; e < shape.edges.size(); ++e) {
    const auto& edge = shape.edges[e];
    check_indices(edge, shape.vertices.size(), e, "edge");
    const Vec3& a = shape.vertices[edge[0]];
    const Vec3& b = shape.vertices[edge[1]];
    const Vec3 d = b - a;
    const double len = d.norm();
    if (!(len > tol))
      throw GeometryError("degenerate edge " + std::to_string(e),
                          static_cast<long>(e));
    atoms.push_back({0.5 * (a + b), d / len, len});
  }
  return atoms;
}

Atoms discretize_mesh(const TriMesh& shape) {
  if (shape.faces.empty() && !shape.vertices.empty())
    throw GeometryError("mesh with vertices but no faces");

  const double diag = bounding_box(shape.vertices).diagonal();
  const double tol = kDegenerateTol * diag * diag;
  Atoms atoms;
  atoms.reserve(shape.faces.size());
  for (std::size_t f = 0; f < shape.faces.size(); ++f) {
    const auto& face = shape.faces[f];
    check_indices(face, shape.vertices.size(), f, "face");
    const Vec3& a = shape.vertices[face[0]];
    const Vec3& b = shape.vertices[face[1]];
    const Vec3& c = shape.vertices[face[2]];
    const Vec3 n = (b - a).cross(c - a);
    const double twice_area = n.norm();
    if (!(0.5 * twice_area > tol))
      throw GeometryError("degenerate face " + std::to_string(f),
                          static_cast<long>(f));
    atoms.push_back({(a + b + c) / 3.0, n / twice_area, 0.5 * twice_area});
  }
  return atoms;
}

DiscreteShape::DiscreteShape(Polylines curves)
    : geometry_(std::move(curves)),
      atoms_(discretize_curves(std::get<Polylines>(geometry_))) {}

DiscreteShape::DiscreteShape(TriMesh mesh)
    : geometry_(std::move(mesh)),
      atoms_(discretize_mesh(std::get<TriMesh>(geometry_))) {}

const Points& DiscreteShape::vertices() const {
  return std::visit([](const auto& g) -> const Points& { return g.vertices; },
                    geometry_);
}

double DiscreteShape::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight;
  return m;
}

const Polylines& DiscreteShape::curves() const {
  if (is_mesh()) throw GeometryError("shape is a mesh, not a curve set");
  return std::get<Polylines>(geometry_);
}

const TriMesh& DiscreteShape::mesh() const {
  if (!is_mesh()) throw GeometryError("shape is a curve set, not a mesh");
  return std::get<TriMesh>(geometry_);
}

DiscreteShape DiscreteShape::with_vertices(Points vertices) const {
  if (vertices.size() != vertex_count())
    throw GeometryError("vertex count mismatch");
  if (is_mesh()) {
    TriMesh m{std::move(vertices), mesh().faces};
    return DiscreteShape(std::move(m));
  }
  Polylines c{std::move(vertices), curves().edges, curves().labels};
  return DiscreteShape(std::move(c));
}

Points DiscreteShape::pull_back(std::span<const AtomGradient> atom_grads) const {
  if (atom_grads.size() != atoms_.size())
    throw GeometryError("atom gradient count mismatch");
  Points grad(vertex_count(), Vec3::Zero());
  const Points& verts = vertices();

  if (!is_mesh()) {
    const auto& edges = curves().edges;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const Atom& atom = atoms_[e];
      const AtomGradient& g = atom_grads[e];
      const Vec3& u = atom.direction;
      // d(edge vector) of (midpoint, d/|d|, |d|)
      const Vec3 g_edge =
          (g.direction - u.dot(g.direction) * u) / atom.weight + g.weight * u;
      grad[edges[e][0]] += 0.5 * g.position - g_edge;
      grad[edges[e][1]] += 0.5 * g.position + g_edge;
    }
    return grad;
  }

  const auto& faces = mesh().faces;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Atom& atom = atoms_[f];
    const AtomGradient& g = atom_grads[f];
    const Vec3& u = atom.direction;
    const Vec3& a = verts[faces[f][0]];
    const Vec3 e1 = verts[faces[f][1]] - a;
    const Vec3 e2 = verts[faces[f][2]] - a;
    const double twice_area = 2.0 * atom.weight;
    // gradient with respect to the raw cross product n = e1 x e2
    const Vec3 g_n =
        (g.direction - u.dot(g.direction) * u) / twice_area + 0.5 * g.weight * u;
    const Vec3 g_e1 = e2.cross(g_n);
    const Vec3 g_e2 = g_n.cross(e1);
    const Vec3 g_c = g.position / 3.0;
    grad[faces[f][0]] += g_c - g_e1 - g_e2;
    grad[faces[f][1]] += g_c + g_e1;
    grad[faces[f][2]] += g_c + g_e2;
  }
  return grad;
}

Vec3 barycenter(const DiscreteShape& shape) {
  if (shape.empty()) throw GeometryError("barycenter of an empty shape");
  Vec3 acc = Vec3::Zero();
  double mass = 0.0;
  for (const auto& a : shape.atoms()) {
    acc += a.weight * a.position;
    mass += a.weight;
  }
  return acc / mass;
}

DiscreteShape translate(const DiscreteShape& shape, const Vec3& offset) {
  Points moved = shape.vertices();
  for (auto& v : moved) v += offset;
  return shape.with_vertices(std::move(moved));
}

DiscreteShape align_barycenters(const DiscreteShape& source,
                                const DiscreteShape& target) {
  return translate(source, barycenter(target) - barycenter(source));
}

DiscreteShape apply_rigid(const DiscreteShape& shape, const Mat3& rotation,
                          const Vec3& translation) {
  constexpr double tol = 1e-9;
  const double ortho_err =
      (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho_err <= tol) || !(std::abs(rotation.determinant() - 1.0) <= tol))
    throw GeometryError("apply_rigid: matrix is not a proper rotation");
  Points moved = shape.vertices();
  for (auto& v : moved) v = rotation * v + translation;
  return shape.with_vertices(std::move(moved));
}

}  // namespace pvar
