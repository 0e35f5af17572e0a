#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Geometry>

#include <ostream>

#include "pvar/dissimilarity.hpp"
#include "pvar/geometry.hpp"

namespace pvar {
// readable parameter names in test output
inline void PrintTo(Variant v, std::ostream* os) { *os << to_string(v); }
}  // namespace pvar

namespace pvar::testing {

// Smooth-ish random open curve: a correlated random walk.
inline Polylines random_curve(int n_vertices, std::mt19937_64& rng, double step = 0.1,
                              const Vec3& start = Vec3::Zero()) {
  std::normal_distribution<double> n01;
  Polylines c;
  c.vertices.push_back(start);
  Vec3 dir = Vec3(n01(rng), n01(rng), n01(rng)).normalized();
  for (int i = 1; i < n_vertices; ++i) {
    dir = (dir + 0.7 * Vec3(n01(rng), n01(rng), n01(rng))).normalized();
    c.vertices.push_back(c.vertices.back() + step * (0.5 + std::abs(n01(rng)) * 0.5) * dir);
    c.edges.push_back({i - 1, i});
  }
  return c;
}

// Two curves sharing no vertex, as one Polylines.
inline Polylines random_curve_pair(int n_each, std::mt19937_64& rng) {
  Polylines a = random_curve(n_each, rng);
  const Polylines b = random_curve(n_each, rng, 0.1, Vec3(0.1, 0.2, 0.0));
  const int off = static_cast<int>(a.vertices.size());
  for (const auto& v : b.vertices) a.vertices.push_back(v);
  for (const auto& e : b.edges) a.edges.push_back({e[0] + off, e[1] + off});
  return a;
}

// Randomly jittered closed surface (octahedron refined once), away from
// degenerate faces.
inline TriMesh random_mesh(std::mt19937_64& rng, double jitter = 0.05,
                           const Vec3& center = Vec3::Zero()) {
  std::normal_distribution<double> n01;
  TriMesh m;
  m.vertices = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};
  m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
             {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  TriMesh r;
  r.vertices = m.vertices;
  auto mid = [&](int a, int b) {
    r.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
    return static_cast<int>(r.vertices.size()) - 1;
  };
  // midpoints are shared between the two faces of an edge
  std::vector<std::pair<std::pair<int, int>, int>> cache;
  auto edge_mid = [&](int a, int b) {
    const std::pair<int, int> key = std::minmax(a, b);
    for (const auto& [k, v] : cache)
      if (k == key) return v;
    const int id = mid(a, b);
    cache.push_back({key, id});
    return id;
  };
  for (const auto& f : m.faces) {
    const int ab = edge_mid(f[0], f[1]), bc = edge_mid(f[1], f[2]), ca = edge_mid(f[2], f[0]);
    r.faces.push_back({f[0], ab, ca});
    r.faces.push_back({ab, f[1], bc});
    r.faces.push_back({ca, bc, f[2]});
    r.faces.push_back({ab, bc, ca});
  }
  for (auto& v : r.vertices) v = 0.5 * v + jitter * Vec3(n01(rng), n01(rng), n01(rng)) + center;
  return r;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  const Eigen::Quaterniond q(n01(rng), n01(rng), n01(rng), n01(rng));
  return q.normalized().toRotationMatrix();
}

// Central differences over every coordinate of a point list.
template <class F>
Points central_diff(const Points& x, double h, F&& f) {
  Points g(x.size(), Vec3::Zero());
  Points probe = x;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      probe[i][c] = x[i][c] + h;
      const double fp = f(probe);
      probe[i][c] = x[i][c] - h;
      const double fm = f(probe);
      probe[i][c] = x[i][c];
      g[i][c] = (fp - fm) / (2 * h);
    }
  return g;
}

// max_i |a_i - b_i| / max_i |b_i| over all coordinates.
inline double relative_error(const Points& a, const Points& b) {
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, (a[i] - b[i]).cwiseAbs().maxCoeff());
    scale = std::max(scale, b[i].cwiseAbs().maxCoeff());
  }
  return diff / std::max(scale, 1e-300);
}

}  // namespace pvar::testing
