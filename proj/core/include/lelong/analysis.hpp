#pragma once

#include <string>
#include <vector>

#include "lelong/mass_engine.hpp"

namespace lelong {

/// nu(S, phi, r_i) on a geometric grid.
struct NuProfile {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> errors;
  std::vector<Method> methods;

  std::size_t size() const { return radii.size(); }
};

/// Geometric grid of n points from r_min to r_max inclusive.
std::vector<double> geometric_grid(double r_min, double r_max, int n);

NuProfile nu_profile(const ModelCurrent& current, const Weight& weight, double r_min,
                     double r_max, int n_points, const EvalOptions& opts = {});

/// f(r) = nu(T, phi, r) + int_0^r (t^p/r^p - 1) nu(dd^cT, phi, t) dt/t.
struct FValue {
  double value = 0.0;
  bool diverged = false;
  Method method = Method::ClosedForm;
  double abs_error_bound = 0.0;
};

FValue f_function(const ModelCurrent& current, const Weight& weight, double r,
                  const EvalOptions& opts = {});

enum class LimitModel { Power, Log, LogPower, None };

/// One fitted small-r model:
///   Power:    value + A r^alpha (+ A2 r^alpha2 when one term is not enough)
///   Log:      A log r + B
///   LogPower: -A (-log r)^delta + B
struct ModelFit {
  LimitModel model = LimitModel::None;
  double A = 0.0;
  double B = 0.0;
  double rate = 0.0;      ///< alpha or delta; unused for Log
  double A2 = 0.0;
  double rate2 = 0.0;     ///< second power, 0 for one-term fits
  double residual = 0.0;  ///< rms residual / rms value
  double limit = 0.0;     ///< implied lim_{r->0}, possibly infinite
};

struct LimitEstimate {
  /// Finite, +-infinity, or NaN when inconclusive.
  double value = 0.0;
  LimitModel model = LimitModel::None;
  double A = 0.0;
  double B = 0.0;
  double rate = 0.0;
  double A2 = 0.0;
  double rate2 = 0.0;
  double fit_residual = 0.0;
  bool diverged = false;
  bool inconclusive = false;
  /// Change in a finite limit when the same model is refitted on a window
  /// shifted by about half a decade; a cheap measure of extrapolation error.
  double stability = 0.0;
  /// Number of smallest-radius points used by the fit.
  int window_points = 0;
  std::vector<ModelFit> candidates;
};

inline constexpr double kLimitTolerance = 1e-4;

/// Fits the three models over the three smallest decades of the profile and
/// keeps the best (ties go to Power, then Log).
LimitEstimate estimate_limit(const NuProfile& profile, double tolerance = kLimitTolerance);

enum class Verdict { Holds, Fails, Inconclusive };
enum class CheckMethod { ClosedForm, Fitted };

struct ConditionCReport {
  Verdict verdict = Verdict::Inconclusive;
  /// Local exponent of nu(dd^cT, phi, t) at 0 (+inf when dd^cT = 0).
  double exponent_estimate = 0.0;
  CheckMethod method = CheckMethod::ClosedForm;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::string detail;
};

inline constexpr double kSlopeThreshold = 0.01;

ConditionCReport check_condition_C(const ModelCurrent& current, const Weight& weight,
                                   const EvalOptions& opts = {}, bool force_fitted = false);

std::string to_string(LimitModel model);
std::string to_string(Verdict verdict);
std::string to_string(CheckMethod method);

}  // namespace lelong
