#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "pvar/dissimilarity.hpp"
#include "pvar/synthetic.hpp"

using namespace pvar;

TEST(Tree, DefaultShape) {
  const Polylines t = make_tree(TreeSpec{});
  EXPECT_EQ(t.edges.size(), 6u * 11u);
  EXPECT_EQ(t.vertices.size(), 1u + 6u * 11u);
  std::set<int> labels(t.labels.begin(), t.labels.end());
  EXPECT_EQ(labels, (std::set<int>{0, 1, 2, 3, 4, 5}));
  EXPECT_NO_THROW(DiscreteShape{t});
}

TEST(Tree, DeterministicPerSeed) {
  TreeSpec a;
  const Polylines t1 = make_tree(a), t2 = make_tree(a);
  ASSERT_EQ(t1.vertices.size(), t2.vertices.size());
  for (std::size_t i = 0; i < t1.vertices.size(); ++i) EXPECT_EQ(t1.vertices[i], t2.vertices[i]);
  a.seed = 8;
  EXPECT_NE(make_tree(a).vertices.back(), t1.vertices.back());
}

TEST(Tree, SpecValidation) {
  TreeSpec s;
  s.branches = 8;  // more than 2^(2+1)-1
  EXPECT_THROW(make_tree(s), std::invalid_argument);
  s = {};
  s.points_per_branch = 1;
  EXPECT_THROW(make_tree(s), std::invalid_argument);
  s = {};
  s.length_scale = 0;
  EXPECT_THROW(make_tree(s), std::invalid_argument);
}

TEST(Trim, KeepsBitwiseCopiesAndIsSubMultiset) {
  const Polylines full = make_tree(TreeSpec{});
  const int keep[] = {0, 1, 2};
  const Polylines trimmed = trim_tree(full, keep);
  EXPECT_EQ(trimmed.edges.size(), 33u);
  for (const auto& v : trimmed.vertices)
    EXPECT_NE(std::find(full.vertices.begin(), full.vertices.end(), v), full.vertices.end());
  const VarifoldKernelConfig k{0.2};
  const DiscreteShape s(trimmed), t(full);
  EXPECT_EQ(partial_dissimilarity(s.atoms(), t.atoms(), k), 0.0);
  EXPECT_GT(partial_dissimilarity(t.atoms(), s.atoms(), k), 0.0);
}

TEST(Trim, RejectsUnknownLabelsAndEmptyKeep) {
  const Polylines full = make_tree(TreeSpec{});
  const int bad[] = {0, 9};
  EXPECT_THROW(trim_tree(full, bad), std::invalid_argument);
  EXPECT_THROW(trim_tree(full, std::span<const int>{}), std::invalid_argument);
}

TEST(RandomDiffeo, DisplacementWithinExpectedRange) {
  const Polylines full = make_tree(TreeSpec{});
  const int keep[] = {0, 1, 2};
  const Polylines trimmed = trim_tree(full, keep);
  const DeformedSample d = random_diffeo(trimmed, 0.05, 11);
  const double diag = bounding_box(trimmed.vertices).diagonal();
  double mean = 0;
  for (std::size_t i = 0; i < trimmed.vertices.size(); ++i)
    mean += (d.shape.vertices[i] - trimmed.vertices[i]).norm();
  mean /= trimmed.vertices.size();
  EXPECT_GT(mean, 0.01 * diag);
  EXPECT_LT(mean, 0.2 * diag);
  EXPECT_EQ(d.shape.edges, trimmed.edges);
  EXPECT_NO_THROW(DiscreteShape{d.shape});
}

TEST(RandomDiffeo, IsInvertibleByReverseFlow) {
  const Polylines full = make_tree(TreeSpec{});
  const DeformedSample d = random_diffeo(full, 0.05, 3);
  const Trajectory tr = shoot(d.truth.original, d.truth.momenta, d.truth.shooting);
  const Points back = flow_points_reverse(d.truth.deformed, tr, d.truth.shooting);
  const double diag = bounding_box(full.vertices).diagonal();
  for (std::size_t i = 0; i < back.size(); ++i)
    EXPECT_LT((back[i] - full.vertices[i]).norm(), 1e-6 * diag);
}

TEST(RandomDiffeo, RejectsBadMagnitude) {
  const Polylines full = make_tree(TreeSpec{});
  EXPECT_THROW(random_diffeo(full, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(random_diffeo(full, -1.0, 1), std::invalid_argument);
}

TEST(Sphere, OutwardNormalsAndArea) {
  const TriMesh m = make_sphere(24, 48, 2.0);
  const DiscreteShape s(m);
  for (const auto& a : s.atoms()) EXPECT_GT(a.direction.dot(a.position), 0.0);
  EXPECT_NEAR(s.total_mass(), 4 * M_PI * 4.0, 0.02 * 4 * M_PI * 4.0);
}
