#pragma once

#include <optional>
#include <vector>

#include "lelong/current_model.hpp"
#include "lelong/evaluation.hpp"

namespace lelong {

struct MassValue {
  double value = 0.0;
  Method method = Method::ClosedForm;
  /// 0 for closed forms, the quadrature error estimate, or one Monte Carlo
  /// standard error.
  double abs_error_bound = 0.0;
};

/// Radial reduction of a (current, weight) pair whose weight trace on the
/// integration space C^m is scale * |z|^{2k}. The current carries q = m - p
/// factors of beta_0.
struct RadialSetup {
  int m = 1;
  int q = 0;
  int p = 1;
  double k = 1.0;
  double scale = 1.0;
};

std::optional<RadialSetup> radial_setup(const ModelCurrent& current, const Weight& weight);

/// int_{B_phi(r)} T ^ beta_phi^p
MassValue mass_T(const ModelCurrent& current, const Weight& weight, double r,
                 const EvalOptions& opts = {});
/// nu(T, phi, r) = mass_T / r^p
MassValue nu_value(const ModelCurrent& current, const Weight& weight, double r,
                   const EvalOptions& opts = {});
/// nu(dd^c T, phi, t) = t^{1-p} int_{B_phi(t)} dd^c T ^ beta_phi^{p-1}
MassValue nu_ddc(const ModelCurrent& current, const Weight& weight, double t,
                 const EvalOptions& opts = {});
/// int_{B_phi(r1, r2)} T ^ alpha_phi^p. r1 = 0 integrates over the punctured
/// ball, which is the extension of T ^ alpha_phi^p by zero.
MassValue ring_alpha_mass(const ModelCurrent& current, const Weight& weight, double r1, double r2,
                          const EvalOptions& opts = {});

enum class KernelKind {
  FCorrection,  ///< int_0^r (t^p/r^p - 1) nu(dd^cT,phi,t)/t dt
  PowerShift,   ///< int_0^r (t^p/r^p - t^{kp}/r^{kp}) nu(dd^cT,phi,t)/t dt
  DdcAverage    ///< int_0^r nu(dd^cT,phi,t) t^{p-1}/r^p dt
};

struct Kernel {
  KernelKind kind = KernelKind::FCorrection;
  double k = 1.0;  ///< power for PowerShift
};

struct KernelValue {
  double value = 0.0;
  bool diverged = false;
  Method method = Method::ClosedForm;
  double abs_error_bound = 0.0;
};

KernelValue kernel_integral(const ModelCurrent& current, const Weight& weight, double r,
                            Kernel kernel, const EvalOptions& opts = {});

/// One term of nu(dd^c T, phi, t) for a radial setup (scale 1):
///   coeff * t^exponent * (-log(t)/k)^{log_power},   log_power = delta - 1 <= 0.
struct DdcTerm {
  double coeff = 0.0;
  double exponent = 0.0;
  double log_power = 0.0;
  double k = 1.0;

  double operator()(double t) const;
};

/// Term expansion of nu(dd^c T, phi, t) (in units where the weight scale is 1).
std::vector<DdcTerm> ddc_terms(const RadialDensity& density, const RadialSetup& setup);

/// True when t -> nu(dd^cT, phi, t)/t is not integrable at 0.
bool ddc_over_t_diverges(const std::vector<DdcTerm>& terms);

/// Kernel weight K(x), x = t/r in (0, 1]: the kernel integral is
/// int_0^r K(t/r) nu(dd^cT,phi,t) dt/t.
double kernel_weight(Kernel kernel, int p, double x);

}  // namespace lelong
