#include "pvar/kernels.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace pvar {

void VarifoldKernelConfig::validate() const {
  if (!(sigma_w > 0.0) || !std::isfinite(sigma_w))
    throw std::invalid_argument("sigma_w must be a positive finite number");
}

void DeformationKernelConfig::validate() const {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
    throw std::invalid_argument("sigma0 must be a positive finite number");
  if (scales.empty()) throw std::invalid_argument("scales must not be empty");
  for (double s : scales)
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("scales must be positive finite numbers");
}

double spatial_kernel(const Vec3& x, const Vec3& y, const VarifoldKernelConfig& cfg) {
  return std::exp(-(x - y).squaredNorm() / (cfg.sigma_w * cfg.sigma_w));
}

double direction_kernel(const Vec3& u, const Vec3& v) {
  assert(std::abs(u.norm() - 1.0) < 1e-9 && std::abs(v.norm() - 1.0) < 1e-9);
  return std::exp(u.dot(v));
}

double varifold_kernel(const Atom& a, const Atom& b, const VarifoldKernelConfig& cfg) {
  return spatial_kernel(a.position, b.position, cfg) *
         direction_kernel(a.direction, b.direction);
}

double deformation_kernel(const Vec3& x, const Vec3& y,
                          const DeformationKernelConfig& cfg) {
  return deformation_kernel_terms((x - y).squaredNorm(), cfg).value;
}

KernelTerms deformation_kernel_terms(double r2, const DeformationKernelConfig& cfg) {
  KernelTerms t;
  for (double s : cfg.scales) {
    const double inv_var = (s * s) / (cfg.sigma0 * cfg.sigma0);
    const double e = std::exp(-r2 * inv_var);
    t.value += e;
    t.g += 2.0 * inv_var * e;
    t.h += 4.0 * inv_var * inv_var * e;
  }
  return t;
}

}  // namespace pvar
