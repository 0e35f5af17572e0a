#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "pvar/geometry.hpp"
#include "pvar/kernels.hpp"

namespace pvar {

/// Data-attachment terms between a source shape S and a target shape T.
///
///   varifold_distance   |mu_S - mu_T|^2, symmetric
///   naive_half          <mu_S, mu_S - mu_T>, signed, kept as a diagnostic
///   partial             sum_i w_i g(omega_S(x_i) - omega_T(x_i))
///   partial_normalized  sum_i w_i g(omega_S(x_i) - sum_l W_l m_eps(omega_S(x_i)/omega_T(y_l)) k(x_i,y_l))
///
/// with g(s) = max(0,s)^2. omega_S(x_i) includes the self term i = j.
enum class Variant { varifold_distance, naive_half, partial, partial_normalized };

inline constexpr Variant kAllVariants[] = {
    Variant::varifold_distance, Variant::naive_half, Variant::partial,
    Variant::partial_normalized};

std::string_view to_string(Variant v);
/// Throws std::invalid_argument on an unknown name.
Variant parse_variant(std::string_view name);

struct DissimilarityConfig {
  VarifoldKernelConfig kernel;
  /// Smoothing of min(1, .) in the normalized term. Must be > 0.
  double epsilon = 1e-3;
  void validate() const;
};

/// Canonical function of `shape` evaluated at (query.position, query.direction).
double omega(const Atom& query, std::span<const Atom> shape,
             const VarifoldKernelConfig& cfg);

double varifold_inner(std::span<const Atom> s, std::span<const Atom> t,
                      const VarifoldKernelConfig& cfg);

/// Expanded squared distance; rounding negatives within 1e-9 of the
/// self-products are clamped to 0.
double varifold_distance_sq(std::span<const Atom> s, std::span<const Atom> t,
                            const VarifoldKernelConfig& cfg);

double naive_half(std::span<const Atom> s, std::span<const Atom> t,
                  const VarifoldKernelConfig& cfg);

double partial_dissimilarity(std::span<const Atom> s, std::span<const Atom> t,
                             const VarifoldKernelConfig& cfg);

/// Smooth min(1, s): (s + 1 - sqrt(eps + (s-1)^2)) / 2.
double min_eps(double s, double epsilon);
double min_eps_derivative(double s, double epsilon);

double partial_normalized_dissimilarity(std::span<const Atom> s,
                                        std::span<const Atom> t,
                                        const VarifoldKernelConfig& cfg,
                                        double epsilon);

double dissimilarity(Variant variant, std::span<const Atom> s,
                     std::span<const Atom> t, const DissimilarityConfig& cfg);

/// Value and exact gradient with respect to each source atom.
struct AtomGradients {
  double value = 0.0;
  std::vector<AtomGradient> grads;
};
AtomGradients dissimilarity_atom_gradient(Variant variant, std::span<const Atom> s,
                                          std::span<const Atom> t,
                                          const DissimilarityConfig& cfg);

/// Value and exact gradient with respect to the source vertices; T is held
/// constant.
struct VertexGradients {
  double value = 0.0;
  Points grads;
};
VertexGradients grad_source_vertices(Variant variant, const DiscreteShape& source,
                                     const DiscreteShape& target,
                                     const DissimilarityConfig& cfg);

}  // namespace pvar
