#include <random>

#include <gtest/gtest.h>

#include "pvar/checks.hpp"
#include "pvar/registration.hpp"
#include "pvar/synthetic.hpp"
#include "support.hpp"

using namespace pvar;

TEST(Register, IdenticalShapesNeedNoDeformation) {
  std::mt19937_64 rng(1);
  const DiscreteShape s(pvar::testing::random_curve(20, rng));
  RegistrationConfig cfg;
  cfg.variant = Variant::varifold_distance;
  const RegistrationResult r = register_shapes(s, s, cfg);
  const double ss = varifold_inner(s.atoms(), s.atoms(), r.resolved.data.kernel);
  EXPECT_LT(r.report.history.back(), 1e-6 * ss);
  for (const auto& p : r.momenta) EXPECT_LT(p.norm(), 1e-6);
}

TEST(Register, TranslatedSourceIsAligned) {
  std::mt19937_64 rng(2);
  const DiscreteShape t(pvar::testing::random_curve(15, rng));
  const DiscreteShape s = translate(t, Vec3(5, 0, 0));
  RegistrationConfig cfg;
  cfg.variant = Variant::varifold_distance;
  cfg.optimizer.max_iters = 5;
  const RegistrationResult r = register_shapes(s, t, cfg);
  EXPECT_TRUE(r.alignment_offset.isApprox(Vec3(-5, 0, 0), 1e-12));
  for (std::size_t i = 0; i < t.vertex_count(); ++i)
    EXPECT_LT((r.aligned_source.vertices()[i] - t.vertices()[i]).norm(), 1e-12);
}

TEST(Register, HistoryAndSplitAreConsistent) {
  const Polylines full = make_tree(TreeSpec{});
  const int keep[] = {0, 1, 2};
  const DiscreteShape src(random_diffeo(trim_tree(full, keep), 0.05, 11).shape);
  RegistrationConfig cfg;
  cfg.optimizer.max_iters = 20;
  const RegistrationResult r = register_shapes(src, DiscreteShape(full), cfg);
  ASSERT_EQ(r.report.history.size(), static_cast<std::size_t>(r.report.iterations) + 1);
  ASSERT_EQ(r.terms.size(), r.report.history.size());
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    EXPECT_NEAR(r.terms[i].total, r.report.history[i], 1e-12 * r.report.history[0]);
    if (i > 0) {
      EXPECT_LE(r.report.history[i], r.report.history[i - 1]);
    }
  }
  EXPECT_LT(r.hamiltonian_drift, 1e-3);
  EXPECT_EQ(r.trajectory.steps(), 10);
  const auto j = summary_json(r);
  EXPECT_EQ(j["objective_history"].size(), r.report.history.size());
  EXPECT_EQ(j["momenta"].size(), src.vertex_count());
}

TEST(Checks, DefaultConfigPasses) {
  for (const auto& c : run_builtin_checks(RegistrationConfig{}))
    EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Checks, SingleStepFailsDrift) {
  RegistrationConfig cfg;
  cfg.time_steps = 1;
  bool drift_failed = false;
  for (const auto& c : run_builtin_checks(cfg))
    if (c.name == "hamiltonian_drift") drift_failed = !c.passed;
  EXPECT_TRUE(drift_failed);
}

TEST(Checks, InvalidConfigIsRejected) {
  RegistrationConfig cfg;
  cfg.epsilon = 0.0;
  EXPECT_THROW(run_builtin_checks(cfg), ConfigError);
}
