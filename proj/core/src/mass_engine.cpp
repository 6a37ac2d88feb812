#include "lelong/mass_engine.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "lelong/errors.hpp"
#include "lelong/forms.hpp"
#include "lelong/mc_engine.hpp"

namespace lelong {

namespace {

// Upper incomplete gamma Gamma(a, x).
double upper_gamma(double a, double x) { return boost::math::tgamma(a, x); }

double sphere_area(int m) {
  // Area of the unit sphere S^{2m-1} in R^{2m}.
  double a = 2.0 * std::pow(std::numbers::pi, m);
  for (int i = 2; i < m; ++i) a /= i;
  return a;
}

void check_radius(const Weight& weight, double r, const char* what) {
  if (!(r > 0.0 && r < weight.domain_radius())) {
    throw InputError(std::string(what) + " = " + std::to_string(r) + " outside (0, R(phi) = " +
                     std::to_string(weight.domain_radius()) + ")");
  }
}

// s-level of the sublevel set {scale * s^k < r}.
double level(const RadialSetup& st, double r) { return std::pow(r / st.scale, 1.0 / st.k); }

double closed_mass(const RadialDensity& u, const RadialSetup& st, double r) {
  // Radial measure of beta_0^q ^ (dd^c s^k)^p on {s < S}: 2^m k^p S^{q+kp}.
  const double S = level(st, r);
  const double mu = st.q + st.k * st.p;
  const double pref = std::pow(2.0, st.m) * std::pow(st.k, st.p);
  double total = 0.0;
  for (const auto& mon : u.monomials()) {
    total += mon.coeff * pref * mu * std::pow(S, mon.exponent + mu) / (mon.exponent + mu);
  }
  if (u.log_coeff() != 0.0) {
    total += u.log_coeff() * pref * std::pow(S, mu) * (std::log(S) - 1.0 / mu);
  }
  for (const auto& lp : u.log_powers()) {
    if (lp.coeff == 0.0) continue;
    const double L = -std::log(S);
    total -= lp.coeff * pref * std::pow(mu, -lp.delta) * upper_gamma(lp.delta + 1.0, mu * L);
  }
  return std::pow(st.scale, st.p) * total;
}

double closed_ring(const RadialDensity& u, const RadialSetup& st, double r1, double r2) {
  // alpha_phi^p ^ beta_0^q has radial density k^p 2^m q s^{q-1}; zero when q = 0.
  if (st.q == 0 || r1 == r2) return 0.0;
  const double q = st.q;
  const double S1 = r1 > 0.0 ? level(st, r1) : 0.0;
  const double S2 = level(st, r2);
  const double pref = std::pow(2.0, st.m) * std::pow(st.k, st.p);
  double total = 0.0;
  for (const auto& mon : u.monomials()) {
    const double e = mon.exponent + q;
    total += mon.coeff * pref * q * (std::pow(S2, e) - std::pow(S1, e)) / e;
  }
  if (u.log_coeff() != 0.0) {
    auto anti = [&](double s) {
      return s > 0.0 ? std::pow(s, q) * (std::log(s) - 1.0 / q) : 0.0;
    };
    total += u.log_coeff() * pref * (anti(S2) - anti(S1));
  }
  for (const auto& lp : u.log_powers()) {
    if (lp.coeff == 0.0) continue;
    const double a = lp.delta + 1.0;
    const double g2 = upper_gamma(a, -q * std::log(S2));
    const double g1 = S1 > 0.0 ? upper_gamma(a, -q * std::log(S1)) : 0.0;
    total -= lp.coeff * pref * q * std::pow(q, -a) * (g2 - g1);
  }
  return total;
}

double closed_ddc(const RadialDensity& u, const RadialSetup& st, double t) {
  double total = 0.0;
  for (const auto& term : ddc_terms(u, st)) total += term(t / st.scale);
  return total;
}

// int over {rho_lo < |z| < rho_hi} of the chosen measure, integrating the
// pointwise wedge density along a ray against the sphere area.
QuadratureResult quad_radial(const ModelCurrent& current, const Weight& field, FormKind kind,
                             double rho_lo, double rho_hi, const QuadratureOptions& opts) {
  const int m = current.integration_dim();
  const double area = sphere_area(m);
  std::vector<cplx> z(m);
  auto integrand = [&](double rho) {
    z[0] = rho;
    return form_density(current, field, kind, z).density * area * std::pow(rho, 2 * m - 1);
  };
  if (rho_lo == 0.0) return integrate_from_zero(integrand, rho_hi, opts);
  return integrate(integrand, rho_lo, rho_hi, opts);
}

// Ball mass of dd^c T ^ beta_phi^{p-1} over {|z| < rho1}: quadrature over the
// annulus rho0 < |z| < rho1 in log-radius, closed off by the flux through the
// small inner sphere (Stokes). Slowly varying logarithmic densities put mass
// arbitrarily close to 0, below what the radius itself can resolve.
QuadratureResult quad_ddc_ball(const ModelCurrent& current, const Weight& field,
                               const RadialSetup& st, double rho1,
                               const QuadratureOptions& opts) {
  const int m = current.integration_dim();
  const double area = sphere_area(m);
  const double rho0 = 1e-12 * rho1;
  std::vector<cplx> z(m);
  auto integrand = [&](double v) {
    const double rho = std::exp(v);
    z[0] = rho;
    return form_density(current, field, FormKind::Ddc, z).density * area * std::pow(rho, 2 * m);
  };
  QuadratureResult res = integrate(integrand, std::log(rho0), std::log(rho1), opts);
  const double s0 = rho0 * rho0;
  const auto& u = current.density();
  const double flux = std::pow(st.scale, st.p - 1) * std::pow(2.0, m) *
                      std::pow(st.k, st.p - 1) * std::pow(s0, st.q + st.k * (st.p - 1)) *
                      (s0 * u.dg(s0));
  res.value += flux;
  return res;
}

MassValue from_quad(const QuadratureResult& res, std::string_view what, double factor = 1.0) {
  return MassValue{require_converged(res, what) * factor, Method::Quadrature,
                   res.abs_error * std::abs(factor)};
}

MassValue from_mc(const MCEstimate& est, double factor = 1.0) {
  return MassValue{est.value * factor, Method::MonteCarlo, est.std_error * std::abs(factor)};
}

const RadialSetup& need_radial(const std::optional<RadialSetup>& st) {
  if (!st) {
    throw InputError("closed-form and quadrature routes need a weight whose trace on the current "
                     "is a pure power; use the Monte Carlo engine");
  }
  return *st;
}

bool use_mc(const EvalOptions& opts, const std::optional<RadialSetup>& st) {
  return opts.engine == Engine::MonteCarlo || (opts.engine == Engine::Auto && !st);
}

}  // namespace

double DdcTerm::operator()(double t) const {
  if (coeff == 0.0) return 0.0;
  double v = coeff * std::pow(t, exponent);
  if (log_power != 0.0) v *= std::pow(-std::log(t) / k, log_power);
  return v;
}

std::optional<RadialSetup> radial_setup(const ModelCurrent& current, const Weight& weight) {
  const auto rw = restrict_weight(weight, current);
  if (!rw.pure) return std::nullopt;
  return RadialSetup{current.integration_dim(), current.background_power(), current.bidim(),
                     rw.pure->k, rw.pure->scale};
}

std::vector<DdcTerm> ddc_terms(const RadialDensity& u, const RadialSetup& st) {
  // Flux of dd^c u ^ beta_0^q ^ (dd^c s^k)^{p-1} through {s = S} is
  // 2^m S^m g'(S) (k S^{k-1})^{p-1}; dividing by t^{p-1}, t = S^k, leaves
  // 2^m k^{p-1} S^q (S g'(S)).
  const double pref = std::pow(2.0, st.m) * std::pow(st.k, st.p - 1);
  const double base = st.q / st.k;
  std::vector<DdcTerm> terms;
  for (const auto& mon : u.monomials()) {
    if (mon.exponent != 0.0 && mon.coeff != 0.0) {
      terms.push_back({pref * mon.coeff * mon.exponent, (st.q + mon.exponent) / st.k, 0.0, st.k});
    }
  }
  if (u.log_coeff() != 0.0) terms.push_back({pref * u.log_coeff(), base, 0.0, st.k});
  for (const auto& lp : u.log_powers()) {
    if (lp.coeff == 0.0) continue;
    if (lp.delta == 1.0) {
      terms.push_back({pref * lp.coeff, base, 0.0, st.k});
    } else {
      terms.push_back({pref * lp.coeff * lp.delta, base, lp.delta - 1.0, st.k});
    }
  }
  return terms;
}

bool ddc_over_t_diverges(const std::vector<DdcTerm>& terms) {
  for (const auto& t : terms) {
    if (t.coeff != 0.0 && t.exponent == 0.0) return true;
  }
  return false;
}

double kernel_weight(Kernel kernel, int p, double x) {
  switch (kernel.kind) {
    case KernelKind::FCorrection: return std::pow(x, p) - 1.0;
    case KernelKind::PowerShift: return std::pow(x, p) - std::pow(x, kernel.k * p);
    case KernelKind::DdcAverage: return std::pow(x, p);
  }
  return 0.0;
}

MassValue mass_T(const ModelCurrent& current, const Weight& weight, double r,
                 const EvalOptions& opts) {
  check_radius(weight, r, "r");
  const auto st = radial_setup(current, weight);
  if (use_mc(opts, st)) return from_mc(mc_mass(current, weight, r, opts.mc.samples, opts.mc.seed, opts.mc.threads));
  const auto& setup = need_radial(st);
  if (opts.engine == Engine::Quad) {
    const auto rw = restrict_weight(weight, current);
    // Masses scale like r^p; the tolerance is meant for nu.
    QuadratureOptions q = opts.quad;
    q.abs_tol *= std::pow(r, current.bidim());
    return from_quad(quad_radial(current, rw.field, FormKind::Mass, 0.0,
                                 std::sqrt(level(setup, r)), q),
                     "mass_T");
  }
  return MassValue{closed_mass(current.density(), setup, r), Method::ClosedForm, 0.0};
}

MassValue nu_value(const ModelCurrent& current, const Weight& weight, double r,
                   const EvalOptions& opts) {
  MassValue mv = mass_T(current, weight, r, opts);
  const double denom = std::pow(r, current.bidim());
  mv.value /= denom;
  mv.abs_error_bound /= denom;
  return mv;
}

MassValue nu_ddc(const ModelCurrent& current, const Weight& weight, double t,
                 const EvalOptions& opts) {
  check_radius(weight, t, "t");
  const auto st = radial_setup(current, weight);
  const double denom = std::pow(t, current.bidim() - 1);
  if (use_mc(opts, st)) return from_mc(mc_ddc_mass(current, weight, t, opts.mc), 1.0 / denom);
  const auto& setup = need_radial(st);
  if (opts.engine == Engine::Quad) {
    const auto rw = restrict_weight(weight, current);
    MassValue mv = from_quad(
        quad_ddc_ball(current, rw.field, setup, std::sqrt(level(setup, t)), opts.quad), "nu_ddc");
    mv.value /= denom;
    mv.abs_error_bound /= denom;
    return mv;
  }
  return MassValue{closed_ddc(current.density(), setup, t), Method::ClosedForm, 0.0};
}

MassValue ring_alpha_mass(const ModelCurrent& current, const Weight& weight, double r1, double r2,
                          const EvalOptions& opts) {
  if (!(r1 >= 0.0 && r1 <= r2)) throw InputError("ring radii must satisfy 0 <= r1 <= r2");
  check_radius(weight, r2, "r2");
  const auto st = radial_setup(current, weight);
  if (r1 == r2) {
    return MassValue{0.0, use_mc(opts, st) ? Method::MonteCarlo : Method::ClosedForm, 0.0};
  }
  if (use_mc(opts, st)) return from_mc(mc_ring_alpha(current, weight, r1, r2, opts.mc));
  const auto& setup = need_radial(st);
  if (opts.engine == Engine::Quad) {
    const auto rw = restrict_weight(weight, current);
    const double lo = r1 > 0.0 ? std::sqrt(level(setup, r1)) : 0.0;
    return from_quad(quad_radial(current, rw.field, FormKind::Alpha, lo,
                                 std::sqrt(level(setup, r2)), opts.quad),
                     "ring_alpha_mass");
  }
  return MassValue{closed_ring(current.density(), setup, r1, r2), Method::ClosedForm, 0.0};
}

KernelValue kernel_integral(const ModelCurrent& current, const Weight& weight, double r,
                            Kernel kernel, const EvalOptions& opts) {
  check_radius(weight, r, "r");
  const int p = current.bidim();
  const auto st = radial_setup(current, weight);

  if (use_mc(opts, st)) {
    // Exchange the t- and z-integrals: a point z with phi(z) = v contributes
    // its dd^c density times F(v) = int_v^r K(t/r) t^{-p} dt.
    auto tail = [p, r](double v, double power) {
      // int_v^r t^{power} dt
      if (power == -1.0) return std::log(r / v);
      return (std::pow(r, power + 1.0) - std::pow(v, power + 1.0)) / (power + 1.0);
    };
    const double rp = std::pow(r, p);
    std::function<double(double)> F;
    switch (kernel.kind) {
      case KernelKind::FCorrection:
        F = [=](double v) { return (r - v) / rp - tail(v, -p); };
        break;
      case KernelKind::PowerShift: {
        const double e = (kernel.k - 1.0) * p;
        const double rkp = std::pow(r, kernel.k * p);
        F = [=](double v) { return (r - v) / rp - tail(v, e) / rkp; };
        break;
      }
      case KernelKind::DdcAverage:
        F = [=](double v) { return (r - v) / rp; };
        break;
    }
    const auto rw = restrict_weight(weight, current);
    const auto est = mc_integrate(current, rw.field, FormKind::Ddc, F, r, opts.mc);
    if (est.heavy_tail) {
      throw NumericalError("Monte Carlo kernel integral shows growing sample variance");
    }
    return KernelValue{est.value, false, Method::MonteCarlo, est.std_error};
  }

  const auto& setup = need_radial(st);
  const auto terms = ddc_terms(current.density(), setup);
  KernelValue out;
  if (kernel.kind == KernelKind::FCorrection && ddc_over_t_diverges(terms)) {
    out.diverged = true;
    out.value = std::nan("");
    out.method = Method::ClosedForm;
    return out;
  }
  const double rs = r / setup.scale;

  if (opts.engine == Engine::Quad) {
    auto integrand = [&](double t) {
      double v = 0.0;
      for (const auto& term : terms) v += term(t);
      return kernel_weight(kernel, p, t / rs) * v / t;
    };
    const auto res = integrate_from_zero(integrand, rs, opts.quad);
    out.value = require_converged(res, "kernel integral");
    out.abs_error_bound = res.abs_error;
    out.method = Method::Quadrature;
    return out;
  }

  for (const auto& term : terms) {
    if (term.log_power != 0.0) {
      auto integrand = [&](double t) { return kernel_weight(kernel, p, t / rs) * term(t) / t; };
      const auto res = integrate_from_zero(integrand, rs, opts.quad);
      out.value += require_converged(res, "kernel integral (log-power term)");
      out.abs_error_bound += res.abs_error;
      out.method = Method::Quadrature;
      continue;
    }
    const double g = term.exponent;
    double factor = 0.0;
    switch (kernel.kind) {
      case KernelKind::FCorrection: factor = 1.0 / (g + p) - 1.0 / g; break;
      case KernelKind::PowerShift: factor = 1.0 / (g + p) - 1.0 / (g + kernel.k * p); break;
      case KernelKind::DdcAverage: factor = 1.0 / (g + p); break;
    }
    out.value += term.coeff * std::pow(rs, g) * factor;
  }
  return out;
}

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::Auto: return "auto";
    case Engine::Closed: return "closed";
    case Engine::Quad: return "quad";
    case Engine::MonteCarlo: return "mc";
  }
  return "auto";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::ClosedForm: return "closed_form";
    case Method::Quadrature: return "quadrature";
    case Method::MonteCarlo: return "monte_carlo";
  }
  return "closed_form";
}

Engine parse_engine(const std::string& text) {
  if (text == "auto") return Engine::Auto;
  if (text == "closed") return Engine::Closed;
  if (text == "quad") return Engine::Quad;
  if (text == "mc") return Engine::MonteCarlo;
  throw InputError("unknown engine '" + text + "' (auto|closed|quad|mc)");
}

}  // namespace lelong
