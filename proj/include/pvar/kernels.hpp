#pragma once

#include <vector>

#include "pvar/geometry.hpp"

namespace pvar {

/// Width of the spatial Gaussian in the varifold kernel.
struct VarifoldKernelConfig {
  double sigma_w = 1.0;
  void validate() const;
};

/// Multi-scale Gaussian deformation kernel: sum over s of
/// exp(-|x-y|^2 / (sigma0/s)^2), unit weights.
struct DeformationKernelConfig {
  double sigma0 = 1.0;
  std::vector<double> scales{1.0, 4.0, 8.0, 16.0};
  void validate() const;
};

/// exp(-|x-y|^2 / sigma_w^2)
double spatial_kernel(const Vec3& x, const Vec3& y, const VarifoldKernelConfig& cfg);

/// exp(<u,v>), the oriented directional kernel. Asserts unit inputs in debug.
double direction_kernel(const Vec3& u, const Vec3& v);

/// Product kernel on (position, direction) pairs.
double varifold_kernel(const Atom& a, const Atom& b, const VarifoldKernelConfig& cfg);

double deformation_kernel(const Vec3& x, const Vec3& y,
                          const DeformationKernelConfig& cfg);

/// Deformation kernel from a precomputed squared distance, together with
/// G = -dK/d(r2) * 2 and H = dG/d(r2) * -2, the factors that appear in the
/// Hamiltonian flow and its adjoint:
///   grad_x K(x,y) = -G (x - y)
///   grad_x G(x,y) = -H (x - y)
struct KernelTerms {
  double value = 0.0;
  double g = 0.0;
  double h = 0.0;
};
KernelTerms deformation_kernel_terms(double r2, const DeformationKernelConfig& cfg);

}  // namespace pvar
