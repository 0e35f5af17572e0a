#include "pvar/dissimilarity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pvar {

namespace {

// Compensated summation. Kernel sums over a sub-multiset of atoms must not
// exceed the sum over the full multiset through rounding alone, otherwise
// the partial terms would report spurious positive residuals.
class NeumaierSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_non_empty(std::span<const Atom> s, std::span<const Atom> t) {
  if (s.empty() || t.empty())
    throw std::invalid_argument("dissimilarity of an empty shape");
}

Eigen::MatrixXd kernel_matrix(std::span<const Atom> a, std::span<const Atom> b,
                              const VarifoldKernelConfig& cfg) {
  const double inv_var = 1.0 / (cfg.sigma_w * cfg.sigma_w);
  Eigen::MatrixXd k(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      k(i, j) = std::exp(-(a[i].position - b[j].position).squaredNorm() * inv_var) *
                std::exp(a[i].direction.dot(b[j].direction));
  return k;
}

// omega_B evaluated at every atom of A, given k(i,j) = k(a_i, b_j).
Eigen::VectorXd omega_values(const Eigen::MatrixXd& k, std::span<const Atom> b) {
  Eigen::VectorXd out(k.rows());
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    NeumaierSum acc;
    for (Eigen::Index j = 0; j < k.cols(); ++j) acc.add(b[j].weight * k(i, j));
    out(i) = acc.value();
  }
  return out;
}

double weighted_sum(std::span<const Atom> a, const Eigen::VectorXd& values) {
  NeumaierSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i].weight * values(i));
  return acc.value();
}

double g_threshold(double s) {
  const double p = s > 0.0 ? s : 0.0;
  return p * p;
}

double g_threshold_derivative(double s) { return s > 0.0 ? 2.0 * s : 0.0; }

// The gradient of every variant with respect to source atom a has the form
//   d/dw_a = own_a + sum_i a_i k_ia
//   d/dx_a = sum_j (a_a w_j + a_j w_a) d_xa k_aj - c_a sum_l b_al d_xa k_al
//   d/du_a = same with d_ua in place of d_xa
// so each variant only needs to supply these coefficients.
struct Coefficients {
  double value = 0.0;
  Eigen::VectorXd own;
  Eigen::VectorXd self;
  Eigen::VectorXd cross;
  Eigen::MatrixXd target;
};

struct Evaluation {
  Eigen::MatrixXd kss;
  Eigen::MatrixXd kst;
  Eigen::VectorXd omega_s;
  Eigen::VectorXd omega_t;
};

Evaluation evaluate(std::span<const Atom> s, std::span<const Atom> t,
                    const VarifoldKernelConfig& cfg) {
  Evaluation ev;
  ev.kss = kernel_matrix(s, s, cfg);
  ev.kst = kernel_matrix(s, t, cfg);
  ev.omega_s = omega_values(ev.kss, s);
  ev.omega_t = omega_values(ev.kst, t);
  return ev;
}

Eigen::VectorXd weights_of(std::span<const Atom> a) {
  Eigen::VectorXd w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) w(i) = a[i].weight;
  return w;
}

// alpha_s <S,S> - alpha_t <S,T> + constant
Coefficients inner_product_coefficients(std::span<const Atom> s,
                                        std::span<const Atom> t,
                                        const Evaluation& ev, double alpha_s,
                                        double alpha_t) {
  Coefficients c;
  const Eigen::VectorXd w = weights_of(s);
  c.own = alpha_s * ev.omega_s - alpha_t * ev.omega_t;
  c.self = alpha_s * w;
  c.cross = alpha_t * w;
  c.target = weights_of(t).transpose().replicate(s.size(), 1);
  return c;
}

Coefficients partial_coefficients(std::span<const Atom> s, std::span<const Atom> t,
                                  const Evaluation& ev) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Coefficients c;
  c.own.resize(n);
  c.self.resize(n);
  NeumaierSum total;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double f = ev.omega_s(i) - ev.omega_t(i);
    total.add(s[i].weight * g_threshold(f));
    c.own(i) = g_threshold(f);
    c.self(i) = s[i].weight * g_threshold_derivative(f);
  }
  c.value = total.value();
  c.cross = c.self;
  c.target = weights_of(t).transpose().replicate(n, 1);
  return c;
}

Coefficients partial_normalized_coefficients(std::span<const Atom> s,
                                             std::span<const Atom> t,
                                             const Evaluation& ev,
                                             const VarifoldKernelConfig& cfg,
                                             double epsilon) {
  const auto n = static_cast<Eigen::Index>(s.size());
  const auto m = static_cast<Eigen::Index>(t.size());
  const Eigen::VectorXd omega_tt = omega_values(kernel_matrix(t, t, cfg), t);

  Coefficients c;
  c.own.resize(n);
  c.self.resize(n);
  c.cross.resize(n);
  c.target.resize(n, m);
  NeumaierSum total;
  for (Eigen::Index i = 0; i < n; ++i) {
    NeumaierSum inner;
    NeumaierSum beta;
    for (Eigen::Index l = 0; l < m; ++l) {
      const double ratio = ev.omega_s(i) / omega_tt(l);
      const double capped = min_eps(ratio, epsilon);
      inner.add(t[l].weight * capped * ev.kst(i, l));
      beta.add(t[l].weight * min_eps_derivative(ratio, epsilon) * ev.kst(i, l) /
               omega_tt(l));
      c.target(i, l) = t[l].weight * capped;
    }
    const double f = ev.omega_s(i) - inner.value();
    total.add(s[i].weight * g_threshold(f));
    c.own(i) = g_threshold(f);
    c.cross(i) = s[i].weight * g_threshold_derivative(f);
    c.self(i) = c.cross(i) * (1.0 - beta.value());
  }
  c.value = total.value();
  return c;
}

std::vector<AtomGradient> assemble(std::span<const Atom> s, std::span<const Atom> t,
                                   const Evaluation& ev, const Coefficients& c,
                                   const VarifoldKernelConfig& cfg) {
  const double dk_scale = -2.0 / (cfg.sigma_w * cfg.sigma_w);
  std::vector<AtomGradient> grads(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) {
    AtomGradient& g = grads[a];
    double gw = c.own(a);
    for (std::size_t i = 0; i < s.size(); ++i) gw += c.self(i) * ev.kss(i, a);
    g.weight = gw;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double coef =
          (c.self(a) * s[j].weight + c.self(j) * s[a].weight) * ev.kss(a, j);
      g.position += coef * dk_scale * (s[a].position - s[j].position);
      g.direction += coef * s[j].direction;
    }
    for (std::size_t l = 0; l < t.size(); ++l) {
      const double coef = c.cross(a) * c.target(a, l) * ev.kst(a, l);
      g.position -= coef * dk_scale * (s[a].position - t[l].position);
      g.direction -= coef * t[l].direction;
    }
  }
  return grads;
}

double clamp_distance(double ss, double st, double tt) {
  const double d = ss - 2.0 * st + tt;
  if (d < 0.0 && d >= -1e-9 * (ss + tt)) return 0.0;
  return d;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::varifold_distance: return "varifold_distance";
    case Variant::naive_half: return "naive_half";
    case Variant::partial: return "partial";
    case Variant::partial_normalized: return "partial_normalized";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : kAllVariants)
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown dissimilarity variant '" + std::string(name) +
                              "'");
}

void DissimilarityConfig::validate() const {
  kernel.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be a positive finite number");
}

double omega(const Atom& query, std::span<const Atom> shape,
             const VarifoldKernelConfig& cfg) {
  if (shape.empty()) throw std::invalid_argument("omega of an empty shape");
  NeumaierSum acc;
  for (const auto& a : shape) acc.add(a.weight * varifold_kernel(query, a, cfg));
  return acc.value();
}

double varifold_inner(std::span<const Atom> s, std::span<const Atom> t,
                      const VarifoldKernelConfig& cfg) {
  require_non_empty(s, t);
  NeumaierSum acc;
  for (const auto& a : s)
    for (const auto& b : t) acc.add(a.weight * b.weight * varifold_kernel(a, b, cfg));
  return acc.value();
}

double varifold_distance_sq(std::span<const Atom> s, std::span<const Atom> t,
                            const VarifoldKernelConfig& cfg) {
  require_non_empty(s, t);
  return clamp_distance(varifold_inner(s, s, cfg), varifold_inner(s, t, cfg),
                        varifold_inner(t, t, cfg));
}

double naive_half(std::span<const Atom> s, std::span<const Atom> t,
                  const VarifoldKernelConfig& cfg) {
  require_non_empty(s, t);
  return varifold_inner(s, s, cfg) - varifold_inner(s, t, cfg);
}

double partial_dissimilarity(std::span<const Atom> s, std::span<const Atom> t,
                             const VarifoldKernelConfig& cfg) {
  require_non_empty(s, t);
  return partial_coefficients(s, t, evaluate(s, t, cfg)).value;
}

double min_eps(double s, double epsilon) {
  const double d = s - 1.0;
  return 0.5 * (s + 1.0 - std::sqrt(epsilon + d * d));
}

double min_eps_derivative(double s, double epsilon) {
  const double d = s - 1.0;
  return 0.5 * (1.0 - d / std::sqrt(epsilon + d * d));
}

double partial_normalized_dissimilarity(std::span<const Atom> s,
                                        std::span<const Atom> t,
                                        const VarifoldKernelConfig& cfg,
                                        double epsilon) {
  require_non_empty(s, t);
  return partial_normalized_coefficients(s, t, evaluate(s, t, cfg), cfg, epsilon)
      .value;
}

double dissimilarity(Variant variant, std::span<const Atom> s,
                     std::span<const Atom> t, const DissimilarityConfig& cfg) {
  switch (variant) {
    case Variant::varifold_distance: return varifold_distance_sq(s, t, cfg.kernel);
    case Variant::naive_half: return naive_half(s, t, cfg.kernel);
    case Variant::partial: return partial_dissimilarity(s, t, cfg.kernel);
    case Variant::partial_normalized:
      return partial_normalized_dissimilarity(s, t, cfg.kernel, cfg.epsilon);
  }
  throw std::invalid_argument("unknown variant");
}

AtomGradients dissimilarity_atom_gradient(Variant variant, std::span<const Atom> s,
                                          std::span<const Atom> t,
                                          const DissimilarityConfig& cfg) {
  require_non_empty(s, t);
  const Evaluation ev = evaluate(s, t, cfg.kernel);
  Coefficients c;
  switch (variant) {
    case Variant::varifold_distance: {
      c = inner_product_coefficients(s, t, ev, 1.0, 2.0);
      const double ss = weighted_sum(s, ev.omega_s);
      const double st = weighted_sum(s, ev.omega_t);
      const double tt = varifold_inner(t, t, cfg.kernel);
      c.value = clamp_distance(ss, st, tt);
      break;
    }
    case Variant::naive_half:
      c = inner_product_coefficients(s, t, ev, 1.0, 1.0);
      c.value = weighted_sum(s, ev.omega_s) - weighted_sum(s, ev.omega_t);
      break;
    case Variant::partial:
      c = partial_coefficients(s, t, ev);
      break;
    case Variant::partial_normalized:
      c = partial_normalized_coefficients(s, t, ev, cfg.kernel, cfg.epsilon);
      break;
  }
  return {c.value, assemble(s, t, ev, c, cfg.kernel)};
}

VertexGradients grad_source_vertices(Variant variant, const DiscreteShape& source,
                                     const DiscreteShape& target,
                                     const DissimilarityConfig& cfg) {
  AtomGradients ag =
      dissimilarity_atom_gradient(variant, source.atoms(), target.atoms(), cfg);
  return {ag.value, source.pull_back(ag.grads)};
}

}  // namespace pvar
