#include "lelong/quadrature.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "lelong/errors.hpp"

namespace lelong {

namespace {

// QUADPACK qk15 abscissae and weights.
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

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double gauss = fc * kWg[3];
  double kron = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  Segment seg{a, b, kron * h, std::abs((kron - gauss) * h)};
  if (!std::isfinite(seg.value)) seg.error = std::numeric_limits<double>::infinity();
  return seg;
}

}  // namespace

long default_max_evals() {
  if (const char* env = std::getenv("LELONG_MAX_EVALS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 200000;
}

QuadratureOptions default_quadrature_options() {
  QuadratureOptions o;
  o.max_evals = default_max_evals();
  return o;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::vector<Segment> heap{kronrod(f, a, b)};
  res.evals = 15;
  double total = heap.front().value;
  double error = heap.front().error;
  auto done = [&] {
    return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  };
  long iter = 0;
  while (!done() && res.evals + 30 <= opts.max_evals) {
    std::pop_heap(heap.begin(), heap.end());
    const Segment worst = heap.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      std::push_heap(heap.begin(), heap.end());
      break;  // cannot split further
    }
    heap.pop_back();
    total -= worst.value;
    error -= worst.error;
    for (const Segment& half : {kronrod(f, worst.a, mid), kronrod(f, mid, worst.b)}) {
      heap.push_back(half);
      std::push_heap(heap.begin(), heap.end());
      total += half.value;
      error += half.error;
    }
    res.evals += 30;
    // Periodic exact re-summation keeps the running sums from drifting.
    if (++iter % 64 == 0 || !std::isfinite(error)) {
      total = 0.0;
      error = 0.0;
      for (const auto& seg : heap) {
        total += seg.value;
        error += seg.error;
      }
    }
  }
  total = 0.0;
  error = 0.0;
  for (const auto& seg : heap) {
    total += seg.value;
    error += seg.error;
  }
  res.value = total;
  res.abs_error = error;
  res.converged = std::isfinite(total) && done();
  return res;
}

QuadratureResult integrate_from_zero(const std::function<double(double)>& f, double upper,
                                     const QuadratureOptions& opts) {
  if (upper <= 0.0) return QuadratureResult{0.0, 0.0, 0, true};
  auto mapped = [&](double tau) {
    const double one_minus = 1.0 - tau;
    const double s = tau / one_minus;
    const double x = upper * std::exp(-s);
    if (x == 0.0) return 0.0;
    const double v = f(x) * x / (one_minus * one_minus);
    return std::isfinite(v) ? v : 0.0;
  };
  QuadratureResult res = integrate(mapped, 0.0, 1.0, opts);
  // The map stops contributing once x underflows. If the integrand in s has
  // not died out by then, the neglected tail is not small (or the integral
  // diverges): report that instead of a truncated value.
  double s_end = std::log(upper / std::numeric_limits<double>::min());
  double h_end = std::numeric_limits<double>::quiet_NaN();
  // Integrands built from |z|^2 can lose meaning before x underflows; probe
  // the deepest point where they are still finite.
  for (int i = 0; i < 32 && !std::isfinite(h_end); ++i, s_end *= 0.95) {
    const double x_end = upper * std::exp(-s_end);
    h_end = std::abs(f(x_end) * x_end);
  }
  const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(res.value));
  if (!std::isfinite(h_end) || h_end * s_end > tol) {
    res.converged = false;
    res.abs_error = std::max(res.abs_error, std::isfinite(h_end) ? h_end * s_end : h_end);
  }
  return res;
}

double require_converged(const QuadratureResult& res, std::string_view what) {
  if (!res.converged) {
    throw NumericalError("quadrature did not converge for " + std::string(what) +
                         " (error estimate " + std::to_string(res.abs_error) + " after " +
                         std::to_string(res.evals) + " evaluations)");
  }
  return res.value;
}

}  // namespace lelong
