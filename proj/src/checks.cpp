#include "pvar/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pvar/dissimilarity.hpp"
#include "pvar/synthetic.hpp"

namespace pvar {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// Open random walk with roughly unit-length steps of size `step`.
Polylines random_walk(int n, double step, const Vec3& start, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Polylines c;
  c.vertices.push_back(start);
  Vec3 dir(1, 0, 0);
  for (int i = 1; i < n; ++i) {
    dir = (dir + 0.6 * Vec3(n01(rng), n01(rng), n01(rng))).normalized();
    c.vertices.push_back(c.vertices.back() + step * dir);
    c.edges.push_back({i - 1, i});
  }
  return c;
}

double max_diff_ratio(const Points& analytic, const Points& reference) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, (analytic[i] - reference[i]).cwiseAbs().maxCoeff());
    scale = std::max(scale, reference[i].cwiseAbs().maxCoeff());
  }
  return diff / std::max(scale, 1e-300);
}

// Central differences over every vertex coordinate.
template <class F>
Points central_differences(const Points& x, double h, F&& f) {
  Points g(x.size(), Vec3::Zero());
  Points probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      probe[i][c] = x[i][c] + h;
      const double fp = f(probe);
      probe[i][c] = x[i][c] - h;
      const double fm = f(probe);
      probe[i][c] = x[i][c];
      g[i][c] = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

CheckResult dissimilarity_fd(Variant v, const DiscreteShape& s, const DiscreteShape& t,
                             const DissimilarityConfig& dcfg) {
  const double h = 1e-5 * bounding_box(s.vertices()).diagonal();
  const VertexGradients vg = grad_source_vertices(v, s, t, dcfg);
  const Points fd = central_differences(s.vertices(), h, [&](const Points& x) {
    return dissimilarity(v, s.with_vertices(x).atoms(), t.atoms(), dcfg);
  });
  const double err = max_diff_ratio(vg.grads, fd);
  return {"gradient_fd_" + std::string(to_string(v)), err < 1e-5,
          "relative error " + fmt(err) + " (< 1e-5)"};
}

}  // namespace

std::vector<CheckResult> run_builtin_checks(const RegistrationConfig& cfg) {
  cfg.validate();
  std::vector<CheckResult> out;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> n01;

  // Gradient checks on a pair of random curves.
  const DiscreteShape src(random_walk(20, 0.1, Vec3::Zero(), rng));
  const DiscreteShape tgt(random_walk(30, 0.1, Vec3(0.05, 0.05, 0.0), rng));
  const ObjectiveConfig ocfg = resolve(cfg, tgt);
  for (Variant v : kAllVariants) out.push_back(dissimilarity_fd(v, src, tgt, ocfg.data));

  {
    const double diag = bounding_box(src.vertices()).diagonal();
    Momenta p0(src.vertex_count());
    for (auto& p : p0) p = 0.02 * diag * Vec3(n01(rng), n01(rng), n01(rng));
    const ObjectiveGradient og = objective_gradient(p0, src, tgt, ocfg);
    const Points fd = central_differences(p0, 1e-6 * diag, [&](const Points& p) {
      return objective(p, src, tgt, ocfg).total;
    });
    const double err = max_diff_ratio(og.grad, fd);
    out.push_back({"objective_gradient_fd", err < 1e-4,
                   "relative error " + fmt(err) + " (< 1e-4)"});
  }

  // Shooting a synthetic tree with momenta of desk-scale magnitude.
  const Polylines tree = make_tree(TreeSpec{});
  const DiscreteShape full(tree);
  const double diag = bounding_box(tree.vertices).diagonal();
  {
    Momenta p0(tree.vertices.size());
    // mean displacement around a tenth of the diagonal
    for (auto& p : p0) p = 0.005 * diag * Vec3(n01(rng), n01(rng), n01(rng));
    const ObjectiveConfig tcfg = resolve(cfg, full);
    const Trajectory traj = shoot(tree.vertices, p0, tcfg.shooting);
    const auto& k = tcfg.shooting.kernel;
    const double h0 = hamiltonian(traj.q.front(), traj.p.front(), k);
    double drift = 0.0;
    for (int s = 1; s <= traj.steps(); ++s)
      drift = std::max(drift, std::abs(hamiltonian(traj.q[s], traj.p[s], k) - h0) /
                                  std::max(h0, 1e-12));
    out.push_back({"hamiltonian_drift", drift < 1e-3,
                   "relative drift " + fmt(drift) + " over " +
                       std::to_string(tcfg.shooting.time_steps) + " steps (< 1e-3)"});

    Points extra(25);
    const BoundingBox box = bounding_box(tree.vertices);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (auto& e : extra)
      e = box.lo + (box.hi - box.lo).cwiseProduct(Vec3(u01(rng), u01(rng), u01(rng)));
    const Points back =
        flow_points_reverse(flow_points(extra, traj, tcfg.shooting), traj, tcfg.shooting);
    double err = 0.0;
    for (std::size_t i = 0; i < extra.size(); ++i)
      err = std::max(err, (back[i] - extra[i]).norm());
    out.push_back({"flow_invertibility", err < 1e-6 * diag,
                   "round trip " + fmt(err / diag) + " x bbox diagonal (< 1e-6)"});
  }

  const ObjectiveConfig tree_cfg = resolve(cfg, full);
  const VarifoldKernelConfig& kern = tree_cfg.data.kernel;

  // Inclusion: a trimmed tree is a sub-multiset of the full one.
  {
    const int keep[] = {0, 1, 2};
    const DiscreteShape trimmed(trim_tree(tree, keep));
    const double inc = partial_dissimilarity(trimmed.atoms(), full.atoms(), kern);
    const double rev = partial_dissimilarity(full.atoms(), trimmed.atoms(), kern);
    out.push_back({"inclusion_zero", inc == 0.0 && rev > 0.0,
                   "partial(trimmed, full) = " + fmt(inc) + ", reversed = " + fmt(rev)});
  }

  // Monotonicity under random subsets of the source atoms.
  {
    const int keep[] = {0, 2, 5};
    const DiscreteShape target(trim_tree(tree, keep));
    const Atoms& all = full.atoms();
    const double whole = partial_dissimilarity(all, target.atoms(), kern);
    std::bernoulli_distribution coin(0.5);
    double worst = -INFINITY;
    for (int trial = 0; trial < 20; ++trial) {
      Atoms subset;
      for (const auto& a : all)
        if (coin(rng)) subset.push_back(a);
      if (subset.empty()) subset.push_back(all.front());
      worst = std::max(worst, partial_dissimilarity(subset, target.atoms(), kern) - whole);
    }
    out.push_back({"subset_monotone", worst <= 1e-12,
                   "max partial(S', T) - partial(S, T) = " + fmt(worst) + " (<= 1e-12)"});
  }

  // Shifted segments: disjoint shapes with zero partial dissimilarity.
  {
    constexpr double alpha = 0.1, beta = 1.0, shift = 0.01, sigma = 0.5;
    constexpr int ns = 20, nt = 200;
    auto segment = [](double len, double y, int n) {
      Polylines c;
      for (int i = 0; i <= n; ++i) {
        c.vertices.push_back(Vec3(-0.5 * len + len * i / n, y, 0.0));
        if (i > 0) c.edges.push_back({i - 1, i});
      }
      return c;
    };
    const DiscreteShape s(segment(alpha, shift, ns));
    const DiscreteShape t(segment(beta, 0.0, nt));
    const VarifoldKernelConfig k{sigma};
    const double d = partial_dissimilarity(s.atoms(), t.atoms(), k);
    const double ss = varifold_inner(s.atoms(), s.atoms(), k);
    const double dn =
        partial_normalized_dissimilarity(s.atoms(), t.atoms(), k, cfg.epsilon);
    out.push_back({"shifted_segment_zero", d < 1e-10 * ss,
                   "partial = " + fmt(d) + ", <S,S> = " + fmt(ss) +
                       ", normalized = " + fmt(dn)});
  }
  return out;
}

}  // namespace pvar
