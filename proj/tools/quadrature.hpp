#pragma once

#include <cmath>
#include <functional>

// Small self-contained adaptive Simpson integrator for the denoise-check
// diagnostic table. The unit/acceptance suites use an independent
// Gauss-Kronrod oracle instead.
namespace mmce_tools {

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb,
                               double whole, double tol, int depth,
                               int force) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Forced levels stop the error estimate from aliasing on boundary layers
  // where three coarse samples happen to agree.
  if (force <= 0 && (depth <= 0 || std::abs(delta) <= 15.0 * tol)) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1,
                          force - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1,
                          force - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-14) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48, 10);
}

}  // namespace mmce_tools
