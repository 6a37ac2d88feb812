#include "lelong/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "lelong/errors.hpp"
#include "lelong/mc_engine.hpp"

namespace lelong {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rms(const Eigen::VectorXd& v) { return v.size() ? std::sqrt(v.squaredNorm() / v.size()) : 0.0; }

struct LinearFit {
  double c0 = 0.0;  // constant
  double c1 = 0.0;  // coefficient of the basis column
  double rss = kInf;
};

// Least squares y ~ c0 + c1 * basis.
LinearFit fit_affine(const Eigen::VectorXd& basis, const Eigen::VectorXd& y) {
  Eigen::MatrixXd X(y.size(), 2);
  X.col(0).setOnes();
  X.col(1) = basis;
  if (!basis.allFinite()) return {};
  Eigen::Vector2d c = X.colPivHouseholderQr().solve(y);
  LinearFit out{c(0), c(1), (X * c - y).squaredNorm()};
  if (!std::isfinite(out.rss)) out.rss = kInf;
  return out;
}

// Minimizes rss(rate) over [lo, hi]: a log-spaced scan followed by Brent on
// the bracket around the best scan point.
template <class F>
double minimize_rate(F&& rss, double lo, double hi) {
  constexpr int kScan = 96;
  const double llo = std::log(lo), lhi = std::log(hi);
  int best = 0;
  double best_val = kInf;
  for (int i = 0; i <= kScan; ++i) {
    const double v = rss(std::exp(llo + (lhi - llo) * i / kScan));
    if (v < best_val) best_val = v, best = i;
  }
  const double a = std::exp(llo + (lhi - llo) * std::max(best - 1, 0) / kScan);
  const double b = std::exp(llo + (lhi - llo) * std::min(best + 1, kScan) / kScan);
  auto [x, fx] = boost::math::tools::brent_find_minima(rss, a, b, 52);
  return fx <= best_val ? x : std::exp(llo + (lhi - llo) * best / kScan);
}

ModelFit fit_power(const Eigen::VectorXd& r, const Eigen::VectorXd& y, double scale) {
  // Work with x = r / r_top so the basis stays O(1).
  const double top = r.maxCoeff();
  const Eigen::VectorXd x = r / top;
  auto basis = [&](double alpha) { return x.array().pow(alpha).matrix().eval(); };
  auto rss = [&](double alpha) { return fit_affine(basis(alpha), y).rss; };
  const double alpha = minimize_rate(rss, 0.01, 8.0);
  const LinearFit lf = fit_affine(basis(alpha), y);
  ModelFit fit;
  fit.model = LimitModel::Power;
  fit.rate = alpha;
  fit.B = lf.c0;
  fit.A = lf.c1 / std::pow(top, alpha);
  fit.limit = lf.c0;
  fit.residual = scale > 0.0 ? std::sqrt(lf.rss / y.size()) / scale : 0.0;
  return fit;
}

// value + A r^alpha + A2 r^alpha2 with alpha < alpha2, by variable projection
// over (alpha, gap = alpha2 - alpha): a coarse 2-D scan, then alternating
// Brent refinements from the best few scan points. Used when a single power
// leaves a visible residual, e.g. when the limit is 0 and two powers compete.
ModelFit fit_power2(const Eigen::VectorXd& r, const Eigen::VectorXd& y, double scale) {
  const double top = r.maxCoeff();
  const Eigen::VectorXd x = r / top;
  const Eigen::Index n = y.size();
  auto solve = [&](double a1, double gap, Eigen::Vector3d* coef) {
    Eigen::MatrixXd X(n, 3);
    X.col(0).setOnes();
    X.col(1) = x.array().pow(a1).matrix();
    X.col(2) = x.array().pow(a1 + gap).matrix();
    if (!X.allFinite()) return kInf;
    const Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
    if (coef) *coef = c;
    const double rss = (X * c - y).squaredNorm();
    return std::isfinite(rss) ? rss : kInf;
  };

  constexpr int kGrid = 48;
  constexpr double lo = 0.01, hi = 8.0;
  auto node = [&](int i) { return lo * std::pow(hi / lo, static_cast<double>(i) / (kGrid - 1)); };
  struct Start {
    double rss, a1, gap;
  };
  std::vector<double> table(kGrid * kGrid);
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) table[i * kGrid + j] = solve(node(i), node(j), nullptr);
  }
  // Local minima of the scan; the global one is often a narrow valley that a
  // cluster of nearly equal exponents would otherwise crowd out.
  std::vector<Start> starts;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double v = table[i * kGrid + j];
      bool local = std::isfinite(v);
      for (int di = -1; di <= 1 && local; ++di) {
        for (int dj = -1; dj <= 1 && local; ++dj) {
          const int a = i + di, b = j + dj;
          if ((di || dj) && a >= 0 && a < kGrid && b >= 0 && b < kGrid) local = v <= table[a * kGrid + b];
        }
      }
      if (local) starts.push_back({v, node(i), node(j)});
    }
  }
  std::sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.rss < b.rss; });
  const int kStarts = std::min<int>(12, static_cast<int>(starts.size()));

  Start best{kInf, lo, lo};
  const double step = std::pow(hi / lo, 1.0 / (kGrid - 1));
  for (int s = 0; s < kStarts; ++s) {
    Start cur = starts[s];
    for (int round = 0; round < 30; ++round) {
      const double before = cur.rss;
      auto [a1, f1] = boost::math::tools::brent_find_minima(
          [&](double a) { return solve(a, cur.gap, nullptr); }, std::max(lo, cur.a1 / step),
          std::min(hi, cur.a1 * step), 52);
      if (f1 < cur.rss) cur.a1 = a1, cur.rss = f1;
      auto [g, f2] = boost::math::tools::brent_find_minima(
          [&](double gap) { return solve(cur.a1, gap, nullptr); }, std::max(lo, cur.gap / step),
          std::min(hi, cur.gap * step), 52);
      if (f2 < cur.rss) cur.gap = g, cur.rss = f2;
      if (!(cur.rss < before * (1.0 - 1e-10))) break;
    }
    if (cur.rss < best.rss) best = cur;
  }

  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  const double rss = solve(best.a1, best.gap, &c);
  ModelFit fit;
  fit.model = LimitModel::Power;
  fit.rate = best.a1;
  fit.rate2 = best.a1 + best.gap;
  fit.B = c(0);
  fit.A = c(1) / std::pow(top, fit.rate);
  fit.A2 = c(2) / std::pow(top, fit.rate2);
  fit.limit = c(0);
  fit.residual = scale > 0.0 ? std::sqrt(rss / n) / scale : 0.0;
  return fit;
}

ModelFit fit_log(const Eigen::VectorXd& r, const Eigen::VectorXd& y, double scale) {
  const LinearFit lf = fit_affine(r.array().log().matrix(), y);
  ModelFit fit;
  fit.model = LimitModel::Log;
  fit.A = lf.c1;
  fit.B = lf.c0;
  fit.limit = fit.A > 0.0 ? -kInf : (fit.A < 0.0 ? kInf : fit.B);
  fit.residual = scale > 0.0 ? std::sqrt(lf.rss / y.size()) / scale : 0.0;
  return fit;
}

ModelFit fit_log_power(const Eigen::VectorXd& r, const Eigen::VectorXd& y, double scale) {
  const Eigen::VectorXd L = (-r.array().log()).matrix();
  auto basis = [&](double delta) { return L.array().pow(delta).matrix().eval(); };
  auto rss = [&](double delta) { return fit_affine(basis(delta), y).rss; };
  const double delta = minimize_rate(rss, 0.01, 1.5);
  const LinearFit lf = fit_affine(basis(delta), y);
  ModelFit fit;
  fit.model = LimitModel::LogPower;
  fit.rate = delta;
  fit.A = -lf.c1;
  fit.B = lf.c0;
  fit.limit = fit.A > 0.0 ? -kInf : (fit.A < 0.0 ? kInf : fit.B);
  fit.residual = scale > 0.0 ? std::sqrt(lf.rss / y.size()) / scale : 0.0;
  return fit;
}

double mc_ddc_value(const ModelCurrent& current, const Weight& weight, double t,
                    const EvalOptions& opts, std::uint64_t stream) {
  EvalOptions o = opts;
  o.engine = Engine::MonteCarlo;
  o.mc.seed = mix_seed(opts.mc.seed, stream);
  return nu_ddc(current, weight, t, o).value;
}

}  // namespace

std::vector<double> geometric_grid(double r_min, double r_max, int n) {
  if (n < 2) throw InputError("grid needs at least two points");
  std::vector<double> grid(n);
  const double ratio = std::log(r_max / r_min) / (n - 1);
  for (int i = 0; i < n; ++i) grid[i] = r_min * std::exp(ratio * i);
  grid.front() = r_min;
  grid.back() = r_max;
  return grid;
}

NuProfile nu_profile(const ModelCurrent& current, const Weight& weight, double r_min,
                     double r_max, int n_points, const EvalOptions& opts) {
  if (n_points < 8) throw InputError("a profile needs at least 8 points");
  if (!(r_min > 0.0 && r_min < r_max && r_max < weight.domain_radius())) {
    throw InputError("profile radii must satisfy 0 < r_min < r_max < R(phi)");
  }
  NuProfile profile;
  profile.radii = geometric_grid(r_min, r_max, n_points);
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    EvalOptions o = opts;
    o.mc.seed = mix_seed(opts.mc.seed, i);
    const MassValue mv = nu_value(current, weight, profile.radii[i], o);
    profile.values.push_back(mv.value);
    profile.errors.push_back(mv.abs_error_bound);
    profile.methods.push_back(mv.method);
  }
  return profile;
}

FValue f_function(const ModelCurrent& current, const Weight& weight, double r,
                  const EvalOptions& opts) {
  if (!current.nonpositive()) throw InputError("f is defined for nonpositive currents");
  EvalOptions kopts = opts;
  kopts.mc.seed = mix_seed(opts.mc.seed, 1);
  const KernelValue kv = kernel_integral(current, weight, r, Kernel{KernelKind::FCorrection}, kopts);
  if (kv.diverged) return FValue{-kInf, true, kv.method, 0.0};
  const MassValue nu = nu_value(current, weight, r, opts);
  FValue out;
  out.value = nu.value + kv.value;
  out.method = nu.method == Method::MonteCarlo || kv.method == Method::MonteCarlo
                   ? Method::MonteCarlo
                   : (nu.method == Method::ClosedForm && kv.method == Method::ClosedForm
                          ? Method::ClosedForm
                          : Method::Quadrature);
  out.abs_error_bound = out.method == Method::MonteCarlo
                            ? std::hypot(nu.abs_error_bound, kv.abs_error_bound)
                            : nu.abs_error_bound + kv.abs_error_bound;
  return out;
}

LimitEstimate estimate_limit(const NuProfile& profile, double tolerance) {
  const std::size_t n = profile.size();
  if (n < 8 || profile.values.size() != n) {
    throw InputError("limit estimation needs at least 8 profile points");
  }
  if (!std::is_sorted(profile.radii.begin(), profile.radii.end()) ||
      !(profile.radii.front() > 0.0)) {
    throw InputError("profile radii must be positive and increasing");
  }
  if (profile.radii.back() / profile.radii.front() < 1e3 * (1.0 - 1e-12)) {
    throw InputError("limit estimation needs a profile spanning at least three decades");
  }
  for (double v : profile.values) {
    if (!std::isfinite(v)) throw NumericalError("profile contains non-finite values");
  }

  // Three smallest decades, or the smallest 8 points if that is fewer.
  std::size_t w = 0;
  const double cut = profile.radii.front() * 1e3 * (1.0 + 1e-12);
  while (w < n && profile.radii[w] <= cut) ++w;
  w = std::max<std::size_t>(w, 8);

  Eigen::VectorXd r(w), y(w);
  for (std::size_t i = 0; i < w; ++i) r(i) = profile.radii[i], y(i) = profile.values[i];
  const double scale = rms(y);

  LimitEstimate est;
  est.window_points = static_cast<int>(w);
  est.candidates = {fit_power(r, y, scale), fit_log(r, y, scale), fit_log_power(r, y, scale)};
  // A second power only when no one-term model fits: it can mimic
  // logarithmic growth over a short window.
  const bool any_fits = std::any_of(est.candidates.begin(), est.candidates.end(),
                                    [&](const ModelFit& c) { return c.residual <= tolerance; });
  if (!any_fits) est.candidates.push_back(fit_power2(r, y, scale));

  double best = kInf;
  for (const auto& c : est.candidates) best = std::min(best, c.residual);
  // Candidates are in preference order; accept the first one within round-off of the best.
  const ModelFit* chosen = &est.candidates.front();
  for (const auto& c : est.candidates) {
    if (c.residual <= best * (1.0 + 1e-6) + 1e-13) {
      chosen = &c;
      break;
    }
  }

  est.model = chosen->model;
  est.A = chosen->A;
  est.B = chosen->B;
  est.rate = chosen->rate;
  est.A2 = chosen->A2;
  est.rate2 = chosen->rate2;
  est.fit_residual = chosen->residual;
  if (chosen->residual > tolerance) {
    est.inconclusive = true;
    est.value = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  est.value = chosen->limit;
  est.diverged = !std::isfinite(est.value);
  if (!est.diverged) {
    // Same model on the window moved by about half a decade.
    const std::size_t shift = std::max<std::size_t>(1, w / 6);
    const std::size_t from = w + shift <= n ? shift : 0;
    const std::size_t len = w + shift <= n ? w : w - shift;
    if (len >= 4) {
      Eigen::VectorXd r2(len), y2(len);
      for (std::size_t i = 0; i < len; ++i) r2(i) = profile.radii[from + i], y2(i) = profile.values[from + i];
      const double sc = rms(y2);
      const ModelFit refit = chosen->rate2 > 0.0 ? fit_power2(r2, y2, sc) : fit_power(r2, y2, sc);
      est.stability = std::abs(refit.limit - est.value);
    }
  }
  return est;
}

ConditionCReport check_condition_C(const ModelCurrent& current, const Weight& weight,
                                   const EvalOptions& opts, bool force_fitted) {
  ConditionCReport rep;
  const auto setup = radial_setup(current, weight);

  if (setup && !force_fitted && opts.engine != Engine::MonteCarlo) {
    rep.method = CheckMethod::ClosedForm;
    const auto terms = ddc_terms(current.density(), *setup);
    double lowest = kInf;
    bool log_factor = false;
    for (const auto& t : terms) {
      if (t.coeff == 0.0) continue;
      if (t.exponent < lowest || (t.exponent == lowest && t.log_power != 0.0)) {
        lowest = t.exponent;
        log_factor = t.log_power != 0.0;
      }
    }
    rep.exponent_estimate = lowest;
    if (lowest == kInf) {
      rep.verdict = Verdict::Holds;
      rep.detail = "dd^cT vanishes";
    } else if (lowest > 0.0) {
      rep.verdict = Verdict::Holds;
      rep.detail = "nu(dd^cT, phi, t) = O(t^" + std::to_string(lowest) + ")";
    } else {
      rep.verdict = Verdict::Fails;
      rep.detail = log_factor ? "nu(dd^cT, phi, t) decays like a power of -log t only"
                              : "dd^cT charges the pole of phi";
    }
    return rep;
  }

  rep.method = CheckMethod::Fitted;
  // Radial configurations are evaluated pointwise, so the window can sit very
  // close to 0 where slowly varying logarithmic factors have flattened out.
  double t_lo;
  if (setup) {
    t_lo = std::max(setup->scale * std::pow(1e-150, setup->k), 1e-290);
  } else {
    t_lo = 1e-6 * weight.domain_radius();
  }
  double t_hi = 1e3 * t_lo;
  if (t_hi >= weight.domain_radius()) {
    t_hi = 0.5 * weight.domain_radius();
    t_lo = 1e-3 * t_hi;
  }
  rep.window_lo = t_lo;
  rep.window_hi = t_hi;

  constexpr int kPoints = 7;
  const auto grid = geometric_grid(t_lo, t_hi, kPoints);
  std::vector<double> lx, ly;
  for (int i = 0; i < kPoints; ++i) {
    double v;
    if (setup && opts.engine != Engine::MonteCarlo) {
      EvalOptions o = opts;
      o.engine = Engine::Closed;
      v = nu_ddc(current, weight, grid[i], o).value;
    } else {
      v = mc_ddc_value(current, weight, grid[i], opts, i);
    }
    if (v > 0.0) {
      lx.push_back(std::log(grid[i]));
      ly.push_back(std::log(v));
    }
  }
  if (lx.empty()) {
    rep.verdict = Verdict::Holds;
    rep.exponent_estimate = kInf;
    rep.detail = "nu(dd^cT, phi, t) vanishes on the window";
    return rep;
  }
  if (lx.size() < 2) {
    rep.verdict = Verdict::Inconclusive;
    rep.detail = "too few positive samples";
    return rep;
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  rep.exponent_estimate = slope;
  if (slope > kSlopeThreshold) {
    rep.verdict = Verdict::Holds;
  } else if (slope < -kSlopeThreshold) {
    rep.verdict = Verdict::Fails;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  rep.detail = "log-log slope of nu(dd^cT, phi, t) over three decades";
  return rep;
}

std::string to_string(LimitModel model) {
  switch (model) {
    case LimitModel::Power: return "power";
    case LimitModel::Log: return "log";
    case LimitModel::LogPower: return "log_power";
    case LimitModel::None: return "none";
  }
  return "none";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(CheckMethod method) {
  return method == CheckMethod::ClosedForm ? "closed_form" : "fitted";
}

}  // namespace lelong
