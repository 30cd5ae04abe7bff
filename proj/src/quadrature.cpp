#include "wgqed/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "wgqed/error.hpp"

namespace wgqed {

namespace {

using cplx = std::complex<double>;

constexpr double kPiOver4 = 0.785398163397448309615660845819875721;

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  cplx value;
  double error;
};

struct ByError {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.a > rhs.a;  // deterministic tie-break
  }
};

Panel gauss_kronrod(const SpectralKernel& kernel, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const cplx fc = kernel.evaluate(center);
  cplx kronrod = fc * kWgk[7];
  cplx gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const cplx f1 = kernel.evaluate(center - dx);
    const cplx f2 = kernel.evaluate(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

PanelPlan oscillation_guard(const SpectralKernel&, double tau_max) {
  PanelPlan plan;
  if (tau_max > 0.0) plan.max_width = kPiOver4 / tau_max;
  return plan;
}

IntegralResult integrate(const SpectralKernel& kernel, const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0) && !(options.rel_tol > 0.0)) {
    throw ConfigError("integrate: tolerance must be positive");
  }
  if (!(kernel.hi >= kernel.lo) || !std::isfinite(kernel.lo) || !std::isfinite(kernel.hi)) {
    throw ConfigError("integrate: malformed window");
  }
  IntegralResult result;
  const double length = kernel.hi - kernel.lo;
  if (length == 0.0) return result;

  double width = length;
  if (kernel.feature_scale > 0.0) width = std::min(width, 0.25 * kernel.feature_scale);
  width = std::min(width, options.plan.max_width);
  const auto n_initial = static_cast<std::size_t>(std::ceil(length / width));
  if (n_initial > options.max_panels) {
    throw ConfigError("integrate: initial panel count exceeds max_panels");
  }

  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  cplx total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i < n_initial; ++i) {
    const double a = kernel.lo + length * static_cast<double>(i) / static_cast<double>(n_initial);
    const double b = i + 1 == n_initial
                         ? kernel.hi
                         : kernel.lo + length * static_cast<double>(i + 1) /
                                           static_cast<double>(n_initial);
    Panel p = gauss_kronrod(kernel, a, b);
    total += p.value;
    total_error += p.error;
    heap.push(p);
  }
  result.evaluations = 15 * n_initial;

  auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };

  while (total_error > target()) {
    if (heap.size() >= options.max_panels) {
      std::ostringstream os;
      os << "integrate: no convergence after " << heap.size() << " panels (error estimate "
         << total_error << ", target " << target() << ")";
      throw IntegrationError(os.str(), total.real(), total.imag(), total_error);
    }
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw IntegrationError("integrate: panel width reached machine resolution", total.real(),
                             total.imag(), total_error);
    }
    Panel left = gauss_kronrod(kernel, worst.a, mid);
    Panel right = gauss_kronrod(kernel, mid, worst.b);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum in window order so the result does not depend on refinement history.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  result.value = 0.0;
  result.abs_error_estimate = 0.0;
  for (const auto& p : panels) {
    result.value += p.value;
    result.abs_error_estimate += p.error;
  }
  return result;
}

IntegralResult integrate(const SpectralKernel& kernel, double tol) {
  QuadratureOptions options;
  options.abs_tol = tol;
  options.rel_tol = 0.0;
  return integrate(kernel, options);
}

}  // namespace wgqed
