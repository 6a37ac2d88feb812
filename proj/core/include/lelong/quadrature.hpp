#pragma once

#include <functional>
#include <string_view>

namespace lelong {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  long max_evals = 200000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  long evals = 0;
  bool converged = false;
};

/// Evaluation cap from LELONG_MAX_EVALS, or 2e5 when unset.
long default_max_evals();
QuadratureOptions default_quadrature_options();

/// Globally adaptive 15-point Gauss-Kronrod on [a, b].
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = default_quadrature_options());

/// Integral over (0, upper] of an integrand with an integrable power or
/// logarithmic singularity at 0. Uses x = upper * e^{-s}, then maps
/// s in [0, inf) onto [0, 1).
QuadratureResult integrate_from_zero(const std::function<double(double)>& f, double upper,
                                     const QuadratureOptions& opts = default_quadrature_options());

/// Throws NumericalError when `res` did not converge.
double require_converged(const QuadratureResult& res, std::string_view what);

}  // namespace lelong
