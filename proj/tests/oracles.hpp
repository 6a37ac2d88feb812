#pragma once

// Reference computations that share no code with the library: Boost
// quadrature and plain finite differences.

#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

/// int_a^b f, endpoint singularities allowed.
inline double integrate(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : 0.0;
  }, a, b);
}

/// int_0^upper f(x) dx via x = upper e^{-s}, for slowly decaying singular tails.
inline double integrate_log(const std::function<double(double)>& f, double upper) {
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate([&](double s) {
    const double x = upper * std::exp(-s);
    if (x < 1e-280) return 0.0;
    const double v = f(x) * x;
    return std::isfinite(v) ? v : 0.0;
  });
}

/// Laplacian in R^{2p} of the radial function u, by central differences.
inline double radial_laplacian(const std::function<double(double)>& u, double rho, int p) {
  // Fourth-order stencils.
  const double h = 1e-3 * rho;
  const double u2 = u(rho + 2 * h), u1 = u(rho + h), u0 = u(rho), m1 = u(rho - h), m2 = u(rho - 2 * h);
  const double d2 = (-u2 + 16 * u1 - 30 * u0 + 16 * m1 - m2) / (12 * h * h);
  const double d1 = (-u2 + 8 * u1 - 8 * m1 + m2) / (12 * h);
  return d2 + (2.0 * p - 1.0) / rho * d1;
}

/// p = 1 mass of u [line] against (|w|^2)^k on {|w|^{2k} < r}:
/// int_0^{r^{1/(2k)}} u(rho) 4 k^2 rho^{2k-1} d rho.
inline double line_mass(const std::function<double(double)>& u, double k, double r) {
  const double top = std::pow(r, 1.0 / (2.0 * k));
  return integrate_log([&](double rho) { return u(rho) * 4.0 * k * k * std::pow(rho, 2.0 * k - 1.0); },
                       top);
}

/// Smooth current u(|z|) beta_0^{n-p} on C^n against |z|^2:
/// int_{|z|^2 < r} u (dd^c|z|^2)^n = int_0^{sqrt r} u(rho) 2^n 2n rho^{2n-1} d rho.
inline double smooth_mass(const std::function<double(double)>& u, int n, double r) {
  return integrate_log([&](double rho) { return u(rho) * std::pow(2.0, n) * 2.0 * n * std::pow(rho, 2 * n - 1); },
                       std::sqrt(r));
}

}  // namespace oracle
