#include "lelong/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "lelong/errors.hpp"
#include "lelong/mc_engine.hpp"
#include "lelong/serialize.hpp"

namespace lelong {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class ReportBuilder {
 public:
  ReportBuilder(std::string id, json inputs) {
    report_.identity_id = std::move(id);
    report_.inputs = std::move(inputs);
  }

  void equality(std::string name, double lhs, double rhs, double tol, std::string note = {}) {
    CheckResult c{std::move(name), lhs, rhs, std::abs(lhs - rhs), tol, false,
                  ReportVerdict::Fail, std::move(note)};
    if (std::isfinite(c.residual) && c.residual <= tol) c.verdict = ReportVerdict::Pass;
    report_.checks.push_back(std::move(c));
  }

  /// Claims lhs <= rhs.
  void inequality(std::string name, double lhs, double rhs, double tol, std::string note = {}) {
    CheckResult c{std::move(name), lhs, rhs, rhs - lhs, tol, true, ReportVerdict::Fail,
                  std::move(note)};
    if (std::isfinite(c.residual) && c.residual >= -tol) c.verdict = ReportVerdict::Pass;
    report_.checks.push_back(std::move(c));
  }

  /// Both sides are +inf; the identity holds in the extended sense.
  void divergent(std::string name, std::string note) {
    const double inf = std::numeric_limits<double>::infinity();
    report_.checks.push_back(
        {std::move(name), inf, inf, 0.0, 0.0, false, ReportVerdict::Pass, std::move(note)});
  }

  void not_applicable(std::string name, std::string note) {
    CheckResult c;
    c.name = std::move(name);
    c.lhs = c.rhs = c.residual = kNaN;
    c.verdict = ReportVerdict::NotApplicable;
    c.note = std::move(note);
    report_.checks.push_back(std::move(c));
  }

  void engine(Method m) { engines_.insert(to_string(m)); }
  void engine(const std::string& name) { engines_.insert(name); }

  IdentityReport finish(std::string note = {}) {
    IdentityReport r = std::move(report_);
    r.note = std::move(note);
    r.engines.assign(engines_.begin(), engines_.end());
    bool any_fail = false, any_pass = false;
    const CheckResult* worst = nullptr;
    double worst_score = -std::numeric_limits<double>::infinity();
    for (const auto& c : r.checks) {
      if (c.verdict == ReportVerdict::NotApplicable) continue;
      any_fail |= c.verdict == ReportVerdict::Fail;
      any_pass |= c.verdict == ReportVerdict::Pass;
      double score = c.inequality ? -c.residual : c.residual;
      score = std::isfinite(score) ? score / std::max(c.tolerance, 1e-300)
                                   : std::numeric_limits<double>::infinity();
      if (!worst || score > worst_score) worst = &c, worst_score = score;
    }
    r.verdict = any_fail ? ReportVerdict::Fail
                         : (any_pass ? ReportVerdict::Pass : ReportVerdict::NotApplicable);
    if (worst) {
      r.lhs = worst->lhs;
      r.rhs = worst->rhs;
      r.residual = worst->residual;
      r.tolerance = worst->tolerance;
      r.inequality = worst->inequality;
    } else {
      r.lhs = r.rhs = r.residual = kNaN;
      if (r.note.empty() && !r.checks.empty()) r.note = r.checks.front().note;
    }
    return r;
  }

 private:
  IdentityReport report_;
  std::set<std::string> engines_;
};

bool monte_carlo_route(const ModelCurrent& current, const Weight& weight, const VerifyOptions& o) {
  return o.eval.engine == Engine::MonteCarlo || !radial_setup(current, weight);
}

EvalOptions engine_opts(const VerifyOptions& o, Engine e, std::uint64_t stream = 0) {
  EvalOptions out = o.eval;
  out.engine = e;
  out.mc.seed = mix_seed(o.eval.mc.seed, stream);
  return out;
}

double mc_tolerance(const VerifyOptions& o, std::initializer_list<double> sigmas) {
  double var = 0.0;
  for (double s : sigmas) var += s * s;
  return std::max(o.mc_sigmas * std::sqrt(var), o.tol_exact);
}

json base_inputs(const ModelCurrent& current, const Weight& weight, const VerifyOptions& o) {
  json in;
  in["current"] = describe(current);
  in["weight"] = describe(weight);
  if (monte_carlo_route(current, weight, o)) {
    in["engine"] = "mc";
    in["samples"] = o.eval.mc.samples;
    in["seed"] = o.eval.mc.seed;
  } else {
    in["engine"] = "deterministic";
  }
  return in;
}

// Pointwise nu(dd^cT, phi, t) from the flux formula.
auto ddc_pointwise(const ModelCurrent& current, const Weight& weight, const VerifyOptions& o) {
  const EvalOptions closed = engine_opts(o, Engine::Closed);
  return [&current, &weight, closed](double t) { return nu_ddc(current, weight, t, closed).value; };
}

double integral(const std::function<double(double)>& f, double a, double b,
                const VerifyOptions& o, std::string_view what) {
  const auto res = a == 0.0 ? integrate_from_zero(f, b, o.eval.quad) : integrate(f, a, b, o.eval.quad);
  return require_converged(res, what);
}

// int_{max(v, lo)}^{hi} t^e dt (zero when v >= hi).
double power_tail(double v, double lo, double hi, double e) {
  const double a = std::max(v, lo);
  if (a >= hi) return 0.0;
  if (e == -1.0) return std::log(hi / a);
  return (std::pow(hi, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
}

std::optional<double> limit_of(const ModelCurrent& current, const Weight& weight,
                               const VerifyOptions& o, std::string& why) {
  const double r_max = std::min(o.profile_r_max, 0.5 * weight.domain_radius());
  if (!(o.profile_r_min < r_max)) {
    why = "profile window empty";
    return std::nullopt;
  }
  EvalOptions eo = o.eval;
  if (eo.engine != Engine::MonteCarlo) eo.engine = Engine::Auto;
  const auto est = estimate_limit(nu_profile(current, weight, o.profile_r_min, r_max,
                                             o.profile_points, eo),
                                  kLimitTolerance);
  if (est.inconclusive) {
    why = "limit estimate inconclusive (best model " + to_string(est.model) + ")";
    return std::nullopt;
  }
  if (est.diverged) {
    why = "nu(T, phi) diverges (" + to_string(est.model) + " model)";
    return std::nullopt;
  }
  if (est.stability > o.tol_limit) {
    why = "limit estimate unstable under a window shift (" + std::to_string(est.stability) + ")";
    return std::nullopt;
  }
  return est.value;
}

bool in_powers_domain(const ModelCurrent& current, const Weight& weight, double k) {
  return powers_domain(current, weight).contains(k);
}

// int_0^x nu(dd^cT, phi, s) ds/s from the term expansion; nullopt if divergent.
std::optional<double> ddc_over_t_closed(const ModelCurrent& current, const Weight& weight,
                                        double x) {
  const auto st = radial_setup(current, weight);
  const auto terms = ddc_terms(current.density(), *st);
  if (ddc_over_t_diverges(terms)) return std::nullopt;
  const double y = x / st->scale;
  double total = 0.0;
  for (const auto& t : terms) {
    if (t.coeff == 0.0) continue;
    if (t.log_power == 0.0) {
      total += t.coeff * std::pow(y, t.exponent) / t.exponent;
    } else {
      // u = -log s:  int_L^inf e^{-g u} (u/k)^lp du
      const double a = t.log_power + 1.0;
      const double L = -std::log(y);
      total += t.coeff * std::pow(t.k, -t.log_power) * std::pow(t.exponent, -a) *
               boost::math::tgamma(a, t.exponent * L);
    }
  }
  return total;
}

}  // namespace

IdentityReport verify_lelong_jensen(const ModelCurrent& current, const Weight& weight, double r1,
                                    double r2, const VerifyOptions& o) {
  if (!(r1 > 0.0 && r1 <= r2 && r2 < weight.domain_radius())) {
    throw InputError("Lelong-Jensen radii must satisfy 0 < r1 <= r2 < R(phi)");
  }
  json in = base_inputs(current, weight, o);
  in["r1"] = r1;
  in["r2"] = r2;
  ReportBuilder rb("lelong_jensen", in);
  const int p = current.bidim();
  const double w1 = std::pow(r1, -p), w2 = std::pow(r2, -p);

  if (r1 == r2) {
    rb.equality("nu(r2) - nu(r1) = ring + dt terms", 0.0, 0.0, o.tol_exact, "degenerate ring");
    return rb.finish();
  }

  if (!monte_carlo_route(current, weight, o)) {
    const auto closed = engine_opts(o, Engine::Closed);
    const double lhs = nu_value(current, weight, r2, closed).value -
                       nu_value(current, weight, r1, closed).value;
    const auto ring = ring_alpha_mass(current, weight, r1, r2, engine_opts(o, Engine::Quad));
    const auto ddc = ddc_pointwise(current, weight, o);
    const double middle = integral(
        [&](double t) { return (std::pow(t, -p) - w2) * std::pow(t, p - 1) * ddc(t); }, r1, r2, o,
        "Lelong-Jensen middle term");
    const double inner =
        (w1 - w2) * integral([&](double t) { return std::pow(t, p - 1) * ddc(t); }, 0.0, r1, o,
                             "Lelong-Jensen inner term");
    rb.engine(Method::ClosedForm);
    rb.engine(Method::Quadrature);
    rb.equality("nu(r2) - nu(r1) = ring + dt terms", lhs, ring.value + middle + inner,
                o.tol_exact);
    return rb.finish();
  }

  const auto rw = restrict_weight(weight, current);
  auto mc = [&](std::uint64_t stream) { return engine_opts(o, Engine::MonteCarlo, stream); };
  const auto nu2 = nu_value(current, weight, r2, mc(1));
  const auto nu1 = nu_value(current, weight, r1, mc(2));
  const auto ring = ring_alpha_mass(current, weight, r1, r2, mc(3));
  const auto middle = mc_integrate(
      current, rw.field, FormKind::Ddc,
      [=](double v) {
        return power_tail(v, r1, r2, -p) - w2 * std::max(r2 - std::max(v, r1), 0.0);
      },
      r2, mc(4).mc);
  const auto inner = mc_integrate(
      current, rw.field, FormKind::Ddc, [=](double v) { return (w1 - w2) * std::max(r1 - v, 0.0); },
      r1, mc(5).mc);
  if (middle.heavy_tail || inner.heavy_tail) {
    rb.not_applicable("nu(r2) - nu(r1) = ring + dt terms",
                      "dd^c samples show growing variance; Monte Carlo route unreliable here");
    return rb.finish();
  }
  rb.engine(Method::MonteCarlo);
  rb.equality("nu(r2) - nu(r1) = ring + dt terms", nu2.value - nu1.value,
              ring.value + middle.value + inner.value,
              mc_tolerance(o, {nu2.abs_error_bound, nu1.abs_error_bound, ring.abs_error_bound,
                               middle.std_error, inner.std_error}));
  return rb.finish();
}

IdentityReport verify_f_monotone(const ModelCurrent& current, const Weight& weight,
                                 const std::vector<double>& grid, const VerifyOptions& o) {
  if (grid.size() < 2 || !std::is_sorted(grid.begin(), grid.end()) || !(grid.front() > 0.0) ||
      !(grid.back() < weight.domain_radius())) {
    throw InputError("f grid must be increasing inside (0, R(phi)) with at least two points");
  }
  json in = base_inputs(current, weight, o);
  in["grid"] = grid;
  ReportBuilder rb("f_monotone", in);
  if (!current.nonpositive()) {
    rb.not_applicable("f nonincreasing", "current is not nonpositive");
    return rb.finish();
  }
  const bool mc = monte_carlo_route(current, weight, o);

  std::vector<FValue> f;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto eo = engine_opts(o, mc ? Engine::MonteCarlo : Engine::Auto, 2 * i);
    f.push_back(f_function(current, weight, grid[i], eo));
    if (f.back().diverged) {
      rb.not_applicable("f nonincreasing", "condition (C) fails: f diverges");
      return rb.finish("divergent");
    }
    rb.engine(f.back().method);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double tol = mc ? mc_tolerance(o, {f[i].abs_error_bound}) : o.tol_exact;
    rb.inequality("f(r) <= 0 at r=" + std::to_string(grid[i]), f[i].value, 0.0, tol);
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double r1 = grid[i], r2 = grid[i + 1];
    const auto ring = ring_alpha_mass(current, weight, r1, r2,
                                      engine_opts(o, mc ? Engine::MonteCarlo : Engine::Quad,
                                                  2 * i + 1));
    rb.engine(ring.method);
    const double tol_step =
        mc ? mc_tolerance(o, {f[i].abs_error_bound, f[i + 1].abs_error_bound}) : o.tol_exact;
    const std::string span = std::to_string(r1) + ".." + std::to_string(r2);
    rb.inequality("f(r2) <= f(r1) on " + span, f[i + 1].value, f[i].value, tol_step);
    const double tol_ring =
        mc ? mc_tolerance(o, {f[i].abs_error_bound, f[i + 1].abs_error_bound,
                              ring.abs_error_bound})
           : o.tol_exact;
    rb.equality("f(r2) - f(r1) = ring alpha mass on " + span, f[i + 1].value - f[i].value,
                ring.value, tol_ring);
  }
  return rb.finish();
}

IdentityReport verify_power_scaling(const ModelCurrent& current, const Weight& weight, double k,
                                    double r, const VerifyOptions& o) {
  if (!(k > 0.0)) throw InputError("k must be positive");
  const Weight wk = weight.power(k);
  if (!(r > 0.0 && r < weight.domain_radius() && std::pow(r, k) < wk.domain_radius())) {
    throw InputError("power scaling needs 0 < r < R(phi)");
  }
  json in = base_inputs(current, weight, o);
  in["k"] = k;
  in["r"] = r;
  ReportBuilder rb("power_scaling", in);
  if (!in_powers_domain(current, weight, k)) {
    rb.not_applicable("nu(T,phi^k,r^k) = k^p[...]", "k outside I_T(phi)");
    return rb.finish();
  }
  const int p = current.bidim();
  const double kp = std::pow(k, p);
  const Kernel kernel{KernelKind::PowerShift, k};

  if (!monte_carlo_route(current, weight, o)) {
    // Left side never touches the transform: closed form for p = 1, radial
    // quadrature of the wedge density otherwise.
    const auto lhs = nu_value(current, wk, std::pow(r, k),
                              engine_opts(o, p == 1 ? Engine::Closed : Engine::Quad));
    const auto nu = nu_value(current, weight, r, engine_opts(o, Engine::Closed));
    const auto ker = kernel_integral(current, weight, r, kernel, engine_opts(o, Engine::Quad));
    rb.engine(lhs.method);
    rb.engine(ker.method);
    rb.equality("nu(T,phi^k,r^k) = k^p[nu(T,phi,r) + kernel]", lhs.value,
                kp * (nu.value + ker.value), o.tol_exact);
    return rb.finish();
  }

  const auto lhs = nu_value(current, wk, std::pow(r, k), engine_opts(o, Engine::MonteCarlo, 1));
  const auto nu = nu_value(current, weight, r, engine_opts(o, Engine::MonteCarlo, 2));
  const auto ker = kernel_integral(current, weight, r, kernel, engine_opts(o, Engine::MonteCarlo, 3));
  rb.engine(Method::MonteCarlo);
  rb.equality("nu(T,phi^k,r^k) = k^p[nu(T,phi,r) + kernel]", lhs.value,
              kp * (nu.value + ker.value),
              mc_tolerance(o, {lhs.abs_error_bound, kp * nu.abs_error_bound,
                               kp * ker.abs_error_bound}));
  return rb.finish();
}

IdentityReport verify_limit_scaling(const ModelCurrent& current, const Weight& weight, double k,
                                    const VerifyOptions& o) {
  if (!(k > 0.0)) throw InputError("k must be positive");
  json in = base_inputs(current, weight, o);
  in["k"] = k;
  ReportBuilder rb("limit_scaling", in);
  if (!in_powers_domain(current, weight, k)) {
    rb.not_applicable("nu(T,phi^k) = k^p nu(T,phi)", "k outside I_T(phi)");
    return rb.finish();
  }
  std::string why;
  const auto base = limit_of(current, weight, o, why);
  const auto scaled = base ? limit_of(current, weight.power(k), o, why) : std::nullopt;
  if (!base || !scaled) {
    rb.not_applicable("nu(T,phi^k) = k^p nu(T,phi)", why);
    return rb.finish(why);
  }
  rb.engine("extrapolation");
  rb.equality("nu(T,phi^k) = k^p nu(T,phi)", *scaled, std::pow(k, current.bidim()) * *base,
              o.tol_limit);
  return rb.finish();
}

IdentityReport verify_ddc_scaling(const ModelCurrent& current, const Weight& weight, double k,
                                  double s, const VerifyOptions& o) {
  if (!(k > 0.0)) throw InputError("k must be positive");
  const Weight wk = weight.power(k);
  if (!(s > 0.0 && s < weight.domain_radius() && std::pow(s, k) < wk.domain_radius())) {
    throw InputError("dd^c scaling needs 0 < s < R(phi)");
  }
  json in = base_inputs(current, weight, o);
  in["k"] = k;
  in["s"] = s;
  ReportBuilder rb("ddc_scaling", in);
  if (!in_powers_domain(current, weight, k)) {
    rb.not_applicable("nu(dd^cT,phi^k,s^k) = k^(p-1) nu(dd^cT,phi,s)", "k outside I_T(phi)");
    return rb.finish();
  }
  const double factor = std::pow(k, current.bidim() - 1);
  const bool mc = monte_carlo_route(current, weight, o);
  const auto lhs =
      nu_ddc(current, wk, std::pow(s, k), engine_opts(o, mc ? Engine::MonteCarlo : Engine::Closed, 1));
  const auto rhs =
      nu_ddc(current, weight, s, engine_opts(o, mc ? Engine::MonteCarlo : Engine::Quad, 2));
  rb.engine(lhs.method);
  rb.engine(rhs.method);
  rb.equality("nu(dd^cT,phi^k,s^k) = k^(p-1) nu(dd^cT,phi,s)", lhs.value, factor * rhs.value,
              mc ? mc_tolerance(o, {lhs.abs_error_bound, factor * rhs.abs_error_bound})
                 : o.tol_exact);
  return rb.finish();
}

IdentityReport verify_corollary1_change_of_variable(const ModelCurrent& current,
                                                    const Weight& weight, double k, double r0,
                                                    const VerifyOptions& o) {
  if (!(k > 0.0 && r0 > 0.0)) throw InputError("k and r0 must be positive");
  json in = base_inputs(current, weight, o);
  in["k"] = k;
  in["r0"] = r0;
  ReportBuilder rb("corollary1_change_of_variable", in);
  const std::string name = "int_0^r0 nu(dd^cT,phi,t^(1/k)) dt/t = k int_0^(r0^(1/k)) nu(dd^cT,phi,s) ds/s";
  if (monte_carlo_route(current, weight, o)) {
    rb.not_applicable(name, "needs a pure-power weight trace");
    return rb.finish();
  }
  const double upper = std::pow(r0, 1.0 / k);
  if (!(upper < weight.domain_radius())) throw InputError("r0^(1/k) must lie below R(phi)");

  const auto ddc = ddc_pointwise(current, weight, o);
  const auto res = integrate_from_zero([&](double t) { return ddc(std::pow(t, 1.0 / k)) / t; },
                                       r0, o.eval.quad);
  const bool lhs_diverged = !res.converged || !std::isfinite(res.value);
  const auto rhs = ddc_over_t_closed(current, weight, upper);
  rb.engine(Method::Quadrature);
  rb.engine(Method::ClosedForm);
  if (lhs_diverged && !rhs) {
    rb.divergent(name, "both sides divergent");
    return rb.finish("consistent divergence");
  }
  if (lhs_diverged != !rhs) {
    rb.equality(name, lhs_diverged ? kNaN : res.value, rhs ? k * *rhs : kNaN, o.tol_exact,
                "only one side diverges");
    return rb.finish();
  }
  rb.equality(name, res.value, k * *rhs, o.tol_exact);
  return rb.finish();
}

IdentityReport verify_corollary2(const ModelCurrent& current, const Weight& weight, double r,
                                 double s, const VerifyOptions& o) {
  if (!(s >= 1.0)) throw InputError("s must be at least 1");
  if (!(r > 0.0 && r < weight.domain_radius())) throw InputError("r must lie in (0, R(phi))");
  json in = base_inputs(current, weight, o);
  in["r"] = r;
  in["s"] = s;
  ReportBuilder rb("corollary2", in);
  if (!current.nonpositive()) {
    rb.not_applicable("nu(T,phi,r) bounds", "current is not nonpositive");
    return rb.finish();
  }
  const int p = current.bidim();
  const bool mc = monte_carlo_route(current, weight, o);
  const Weight ws = weight.scaled(s);

  const auto nu = nu_value(current, weight, r, engine_opts(o, mc ? Engine::MonteCarlo : Engine::Closed, 1));
  const auto ker = kernel_integral(current, weight, r, Kernel{KernelKind::DdcAverage},
                                   engine_opts(o, mc ? Engine::MonteCarlo : Engine::Quad, 2));
  rb.engine(nu.method);
  rb.engine(ker.method);
  rb.inequality("nu(T,phi,r) <= -int_0^r nu(dd^cT,phi,t) t^(p-1)/r^p dt", nu.value, -ker.value,
                mc ? mc_tolerance(o, {nu.abs_error_bound, ker.abs_error_bound}) : o.tol_exact);

  const auto ddc_s = nu_ddc(current, ws, r, engine_opts(o, mc ? Engine::MonteCarlo : Engine::Closed, 3));
  if (s > 1.0) {
    const double c = (1.0 - std::pow(s, -p)) / p;
    rb.inequality("nu(T,phi,r) <= -((1-s^-p)/p) nu(dd^cT,s phi,r)", nu.value, -c * ddc_s.value,
                  mc ? mc_tolerance(o, {nu.abs_error_bound, c * ddc_s.abs_error_bound})
                     : o.tol_exact);
  }
  const auto ddc_r = nu_ddc(current, weight, r / s, engine_opts(o, mc ? Engine::MonteCarlo : Engine::Quad, 4));
  rb.engine(ddc_r.method);
  rb.equality("nu(dd^cT,s phi,r) = nu(dd^cT,phi,r/s)", ddc_s.value, ddc_r.value,
              mc ? mc_tolerance(o, {ddc_s.abs_error_bound, ddc_r.abs_error_bound}) : o.tol_exact);
  return rb.finish();
}

IdentityReport verify_comparison(const ModelCurrent& current, const Weight& phi, const Weight& psi,
                                 double ell, const VerifyOptions& o) {
  if (!(ell > 0.0)) throw InputError("ell must be positive");
  json in = base_inputs(current, phi, o);
  in["psi"] = describe(psi);
  in["ell"] = ell;
  ReportBuilder rb("comparison", in);

  std::string why;
  const auto nphi = limit_of(current, phi, o, why);
  const auto npsi = nphi ? limit_of(current, psi, o, why) : std::nullopt;
  if (!nphi || !npsi) {
    rb.not_applicable("nu(T,psi) vs ell^p nu(T,phi)", why);
    return rb.finish(why);
  }
  rb.engine("extrapolation");
  const double target = std::pow(ell, current.bidim()) * *nphi;
  if (current.nonnegative()) {
    rb.inequality("nu(T,psi) >= ell^p nu(T,phi)", target, *npsi, o.tol_limit);
  }
  if (current.nonpositive()) {
    const auto c = check_condition_C(current, psi, o.eval);
    if (c.verdict == Verdict::Holds) {
      rb.inequality("nu(T,psi) <= ell^p nu(T,phi)", *npsi, target, o.tol_limit);
    } else {
      rb.not_applicable("nu(T,psi) <= ell^p nu(T,phi)", "psi does not satisfy condition (C)");
    }
  }
  // log psi ~ ell log phi on the support: both traces are pure powers with
  // exponents in ratio ell.
  const auto a = restrict_weight(phi, current).pure;
  const auto b = restrict_weight(psi, current).pure;
  if (a && b && std::abs(b->k - ell * a->k) <= 1e-12 * b->k) {
    rb.equality("nu(T,psi) = ell^p nu(T,phi)", *npsi, target, o.tol_limit);
  }
  const bool equivalent = a && b && std::abs(b->k - ell * a->k) <= 1e-12 * b->k;
  if (!current.nonnegative() && !current.nonpositive() && !equivalent) {
    rb.not_applicable("nu(T,psi) vs ell^p nu(T,phi)", "current has no sign");
  }
  return rb.finish();
}

IdentityReport verify_extension_remark(const ModelCurrent& current, const Weight& weight, double r,
                                       const VerifyOptions& o) {
  if (!(r > 0.0 && r < weight.domain_radius())) throw InputError("r must lie in (0, R(phi))");
  json in = base_inputs(current, weight, o);
  in["r"] = r;
  ReportBuilder rb("extension_remark", in);
  const std::string name = "int_{B(r)} ext(T ^ alpha^p) = f(r) - nu(T,phi)";
  if (!current.nonpositive()) {
    rb.not_applicable(name, "current is not nonpositive");
    return rb.finish();
  }
  if (check_condition_C(current, weight, o.eval).verdict != Verdict::Holds) {
    rb.not_applicable(name, "condition (C) not established");
    return rb.finish();
  }
  std::string why;
  const auto limit = limit_of(current, weight, o, why);
  if (!limit) {
    rb.not_applicable(name, why);
    return rb.finish(why);
  }
  rb.engine("extrapolation");
  const bool mc = monte_carlo_route(current, weight, o);
  const auto ext = ring_alpha_mass(current, weight, 0.0, r,
                                   engine_opts(o, mc ? Engine::MonteCarlo : Engine::Quad, 1));
  const auto f = f_function(current, weight, r, engine_opts(o, mc ? Engine::MonteCarlo : Engine::Auto, 2));
  rb.engine(ext.method);
  rb.engine(f.method);
  rb.equality(name, ext.value, f.value - *limit,
              mc ? mc_tolerance(o, {ext.abs_error_bound, f.abs_error_bound}) + o.tol_limit
                 : o.tol_limit);
  return rb.finish();
}

const std::vector<std::string>& identity_ids() {
  static const std::vector<std::string> ids = {
      "lelong_jensen",     "f_monotone", "power_scaling", "limit_scaling",   "ddc_scaling",
      "corollary1_change_of_variable", "corollary2", "comparison", "extension_remark"};
  return ids;
}

namespace {

// Default radii, shrunk to fit the weight's domain.
double fit_radius(double preferred, const Weight& w) {
  return std::min(preferred, 0.5 * w.domain_radius());
}

}  // namespace

IdentityReport verify_by_id(const std::string& id, const ModelCurrent& current,
                            const Weight& weight, const VerifyOptions& o) {
  if (id == "lelong_jensen") {
    const double r2 = fit_radius(0.2, weight);
    return verify_lelong_jensen(current, weight, 0.5 * r2, r2, o);
  }
  if (id == "f_monotone") {
    return verify_f_monotone(current, weight, geometric_grid(1e-4, fit_radius(0.25, weight), 8), o);
  }
  if (id == "power_scaling") {
    const double r = std::min(fit_radius(0.3, weight), std::pow(0.5 * weight.power(2.0).domain_radius(), 0.5));
    return verify_power_scaling(current, weight, 2.0, r, o);
  }
  if (id == "limit_scaling") return verify_limit_scaling(current, weight, 2.0, o);
  if (id == "ddc_scaling") {
    const double s = std::min(fit_radius(0.3, weight), std::pow(0.5 * weight.power(2.0).domain_radius(), 0.5));
    return verify_ddc_scaling(current, weight, 2.0, s, o);
  }
  if (id == "corollary1_change_of_variable") {
    const double r0 = std::min(0.25, std::pow(0.5 * weight.domain_radius(), 2.0));
    return verify_corollary1_change_of_variable(current, weight, 2.0, r0, o);
  }
  if (id == "corollary2") return verify_corollary2(current, weight, fit_radius(0.3, weight), 2.0, o);
  if (id == "comparison") return verify_comparison(current, weight, weight.power(2.0), 2.0, o);
  if (id == "extension_remark") {
    return verify_extension_remark(current, weight, fit_radius(0.2, weight), o);
  }
  throw InputError("unknown identity '" + id + "'");
}

std::vector<PanelCase> default_panel() {
  std::vector<PanelCase> cases;
  auto add = [&](std::string name, CurrentKind kind, int n, int p, RadialDensity u,
                 std::optional<Weight> w = std::nullopt, double k = 1.0) {
    const Domain d{1.0, n};
    ModelCurrent c(kind, d, p, std::move(u));
    if (!c.is_psh()) throw std::logic_error("panel case " + name + " is not psh");
    cases.push_back({std::move(name), std::move(c), w ? *w : Weight::isotropic_power(d, k)});
  };
  const auto S = CurrentKind::Subspace;
  const auto M = CurrentKind::Smooth;
  auto mono = [](std::vector<Monomial> m) { return RadialDensity(std::move(m)); };

  for (double eps : {0.25, 0.5, 1.0}) {
    for (double k : {0.5, 1.0, 2.0}) {
      add("s_eps eps=" + std::to_string(eps) + " k=" + std::to_string(k), S, 2, 1,
          mono({{1.0, eps}, {-1.0, 0.0}}), std::nullopt, k);
    }
  }
  add("log line k=1", S, 2, 1, RadialDensity({}, 1.0));
  add("log line k=2", S, 2, 1, RadialDensity({}, 1.0), std::nullopt, 2.0);
  add("log-power 0.5 line", S, 2, 1, RadialDensity({}, 0.0, {{1.0, 0.5}}));
  add("log-power 1 line", S, 2, 1, RadialDensity({}, 0.0, {{1.0, 1.0}}));
  add("positive line", S, 2, 1, mono({{1.0, 0.5}}));
  add("mixed-sign line", S, 2, 1, mono({{1.0, 1.0}, {-0.5, 0.0}}));
  add("log plus monomial line", S, 2, 1, RadialDensity({{1.0, 0.5}, {-1.0, 0.0}}, 1.0));
  add("constant line k=3", S, 2, 1, mono({{-1.0, 0.0}}), std::nullopt, 3.0);
  add("zero line", S, 2, 1, RadialDensity());
  add("s_eps aniso b=(1,2)", S, 2, 1, mono({{1.0, 0.5}, {-1.0, 0.0}}),
      Weight::anisotropic(Domain{1.0, 2}, {1.0, 2.0}));
  add("plane in C^3 k=1", S, 3, 2, mono({{1.0, 0.5}, {-1.0, 0.0}}));
  add("plane in C^3 k=2", S, 3, 2, mono({{1.0, 0.5}, {-1.0, 0.0}}), std::nullopt, 2.0);
  add("log plane in C^3", S, 3, 2, RadialDensity({}, 1.0));
  add("positive plane in C^3", S, 3, 2, mono({{1.0, 1.0}}));
  add("smooth C^2 p=1 k=1", M, 2, 1, mono({{1.0, 0.5}, {-1.0, 0.0}}));
  add("smooth C^2 p=1 k=2", M, 2, 1, mono({{1.0, 0.5}, {-1.0, 0.0}}), std::nullopt, 2.0);
  add("smooth log C^2 p=1", M, 2, 1, RadialDensity({}, 1.0));
  add("smooth log-power C^2 p=1", M, 2, 1, RadialDensity({}, 0.0, {{1.0, 0.5}}));
  add("smooth C^3 p=1 k=1.5", M, 3, 1, mono({{1.0, 0.7}, {-1.0, 0.0}}), std::nullopt, 1.5);
  add("smooth C^3 p=2", M, 3, 2, mono({{1.0, 0.5}, {-1.0, 0.0}}));
  add("smooth positive C^3 p=2 k=0.5", M, 3, 2, mono({{1.0, 1.0}}), std::nullopt, 0.5);
  return cases;
}

std::vector<PanelCase> monte_carlo_panel() {
  std::vector<PanelCase> cases;
  const Domain d2{1.0, 2}, d3{1.0, 3};
  auto smooth = [](Domain d, int p, std::vector<Monomial> m) {
    return ModelCurrent(CurrentKind::Smooth, d, p, RadialDensity(std::move(m)));
  };
  cases.push_back({"smooth C^2 p=1, aniso (1,2)", smooth(d2, 1, {{1.0, 0.5}, {-1.0, 0.0}}),
                   Weight::anisotropic(d2, {1.0, 2.0})});
  cases.push_back({"smooth C^2 p=1, shifted", smooth(d2, 1, {{1.0, 1.0}, {-1.0, 0.0}}),
                   Weight::shifted(d2, {cplx(0.1, 0.0), cplx(0.0, 0.05)}, 1.0)});
  cases.push_back({"smooth C^3 p=1, pow 1.5", smooth(d3, 1, {{1.0, 0.7}, {-1.0, 0.0}}),
                   Weight::isotropic_power(d3, 1.5)});
  cases.push_back({"smooth C^3 p=2, aniso (1,1,2)", smooth(d3, 2, {{1.0, 0.5}, {-1.0, 0.0}}),
                   Weight::anisotropic(d3, {1.0, 1.0, 2.0})});
  cases.push_back({"smooth C^2 p=2, aniso (1,2)", smooth(d2, 2, {{1.0, 1.0}, {-0.5, 0.0}}),
                   Weight::anisotropic(d2, {1.0, 2.0})});
  return cases;
}

std::vector<IdentityReport> run_panel(const std::vector<PanelCase>& cases,
                                      const VerifyOptions& o) {
  std::vector<IdentityReport> out;
  for (const auto& c : cases) {
    const auto& T = c.current;
    const auto& w = c.weight;
    out.push_back(verify_by_id("lelong_jensen", T, w, o));
    out.push_back(verify_by_id("f_monotone", T, w, o));
    for (double k : {0.5, 2.0}) {
      const double r = std::min(0.3, 0.5 * std::min(w.domain_radius(),
                                                    std::pow(w.power(k).domain_radius(), 1.0 / k)));
      out.push_back(verify_power_scaling(T, w, k, r, o));
      out.push_back(verify_ddc_scaling(T, w, k, r, o));
    }
    out.push_back(verify_by_id("limit_scaling", T, w, o));
    out.push_back(verify_by_id("corollary1_change_of_variable", T, w, o));
    for (double s : {1.0, 2.0, 4.0}) {
      out.push_back(verify_corollary2(T, w, std::min(0.3, 0.5 * w.domain_radius()), s, o));
    }
    for (double ell : {0.5, 2.0}) out.push_back(verify_comparison(T, w, w.power(ell), ell, o));
    out.push_back(verify_by_id("extension_remark", T, w, o));
  }
  sort_reports(out);
  return out;
}

std::vector<IdentityReport> run_monte_carlo_panel(const std::vector<PanelCase>& cases,
                                                  const VerifyOptions& opts) {
  VerifyOptions o = opts;
  o.eval.engine = Engine::MonteCarlo;
  std::vector<IdentityReport> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& w = cases[i].weight;
    const double r2 = std::min(0.2, 0.5 * w.domain_radius());
    o.eval.mc.seed = mix_seed(opts.eval.mc.seed, 100 + i);
    out.push_back(verify_lelong_jensen(cases[i].current, w, 0.5 * r2, r2, o));
  }
  sort_reports(out);
  return out;
}

std::uint64_t input_hash(const json& inputs) {
  // FNV-1a over the canonical dump; stable across platforms.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : inputs.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void sort_reports(std::vector<IdentityReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    if (a.identity_id != b.identity_id) return a.identity_id < b.identity_id;
    return input_hash(a.inputs) < input_hash(b.inputs);
  });
}

json to_json(const IdentityReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"lhs", json_number(c.lhs)},
                      {"rhs", json_number(c.rhs)},
                      {c.inequality ? "slack" : "residual", json_number(c.residual)},
                      {"tolerance", json_number(c.tolerance)},
                      {"inequality", c.inequality},
                      {"verdict", to_string(c.verdict)},
                      {"note", c.note}});
  }
  return {{"identity_id", r.identity_id},
          {"inputs", r.inputs},
          {"lhs", json_number(r.lhs)},
          {"rhs", json_number(r.rhs)},
          {r.inequality ? "slack" : "residual", json_number(r.residual)},
          {"tolerance", json_number(r.tolerance)},
          {"inequality", r.inequality},
          {"verdict", to_string(r.verdict)},
          {"engines", r.engines},
          {"checks", checks},
          {"note", r.note}};
}

json to_json(const std::vector<IdentityReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

std::string to_string(ReportVerdict verdict) {
  switch (verdict) {
    case ReportVerdict::Pass: return "pass";
    case ReportVerdict::Fail: return "fail";
    case ReportVerdict::NotApplicable: return "n/a";
  }
  return "n/a";
}

}  // namespace lelong
