#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration of complex-valued
// one-dimensional kernels.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>

namespace wgqed {

struct SpectralKernel {
  std::function<std::complex<double>(double)> evaluate;
  double lo = 0.0;
  double hi = 0.0;
  // Narrowest structure in the integrand; initial panels are at most a
  // quarter of this wide.
  double feature_scale = 1.0;
};

struct IntegralResult {
  std::complex<double> value;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct PanelPlan {
  double max_width = std::numeric_limits<double>::infinity();
};

/// Caps the panel width at pi / (4 tau_max) so that phase factors
/// exp(-i omega tau) with tau <= tau_max are sampled without aliasing.
PanelPlan oscillation_guard(const SpectralKernel& kernel, double tau_max);

struct QuadratureOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-9;
  std::size_t max_panels = 200000;
  PanelPlan plan{};
};

/// Panels are bisected in order of decreasing error until the total
/// estimate falls below max(abs_tol, rel_tol * |value|). Throws
/// IntegrationError (carrying the best value) when max_panels is reached.
IntegralResult integrate(const SpectralKernel& kernel, const QuadratureOptions& options);

/// Absolute-tolerance shorthand.
IntegralResult integrate(const SpectralKernel& kernel, double tol);

}  // namespace wgqed
