#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lelong/analysis.hpp"

namespace lelong {

enum class ReportVerdict { Pass, Fail, NotApplicable };

/// One comparison inside a report. Equalities store |lhs - rhs| in
/// `residual`; inequalities claim lhs <= rhs and store the signed slack
/// rhs - lhs.
struct CheckResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool inequality = false;
  ReportVerdict verdict = ReportVerdict::NotApplicable;
  std::string note;
};

/// Outcome of one verifier. The top-level numbers repeat the check closest to
/// (or furthest past) its tolerance.
struct IdentityReport {
  std::string identity_id;
  nlohmann::json inputs;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool inequality = false;
  ReportVerdict verdict = ReportVerdict::NotApplicable;
  std::vector<std::string> engines;
  std::vector<CheckResult> checks;
  std::string note;
};

struct VerifyOptions {
  /// Engine::MonteCarlo (or a weight that is not a pure power on the
  /// current) selects the Monte Carlo route with statistical tolerances.
  EvalOptions eval;
  double tol_exact = 1e-9;
  double tol_limit = 1e-5;
  double mc_sigmas = 3.0;
  /// Profile grid used whenever a limit nu(T, phi) has to be extrapolated.
  double profile_r_min = 1e-6;
  double profile_r_max = 1e-1;
  int profile_points = 32;
};

IdentityReport verify_lelong_jensen(const ModelCurrent& current, const Weight& weight, double r1,
                                    double r2, const VerifyOptions& opts = {});
IdentityReport verify_f_monotone(const ModelCurrent& current, const Weight& weight,
                                 const std::vector<double>& grid, const VerifyOptions& opts = {});
IdentityReport verify_power_scaling(const ModelCurrent& current, const Weight& weight, double k,
                                    double r, const VerifyOptions& opts = {});
IdentityReport verify_limit_scaling(const ModelCurrent& current, const Weight& weight, double k,
                                    const VerifyOptions& opts = {});
IdentityReport verify_ddc_scaling(const ModelCurrent& current, const Weight& weight, double k,
                                  double s, const VerifyOptions& opts = {});
IdentityReport verify_corollary1_change_of_variable(const ModelCurrent& current,
                                                    const Weight& weight, double k, double r0,
                                                    const VerifyOptions& opts = {});
IdentityReport verify_corollary2(const ModelCurrent& current, const Weight& weight, double r,
                                 double s, const VerifyOptions& opts = {});
IdentityReport verify_comparison(const ModelCurrent& current, const Weight& phi, const Weight& psi,
                                 double ell, const VerifyOptions& opts = {});
IdentityReport verify_extension_remark(const ModelCurrent& current, const Weight& weight, double r,
                                       const VerifyOptions& opts = {});

/// Identity ids accepted by `verify_by_id`.
const std::vector<std::string>& identity_ids();

/// Runs one verifier with its default parameters for the given pair.
IdentityReport verify_by_id(const std::string& id, const ModelCurrent& current,
                            const Weight& weight, const VerifyOptions& opts = {});

struct PanelCase {
  std::string name;
  ModelCurrent current;
  Weight weight;
};

/// The 30-case deterministic catalog (pure-power weight traces).
std::vector<PanelCase> default_panel();
/// Smooth currents whose weights need the Monte Carlo route.
std::vector<PanelCase> monte_carlo_panel();

/// Every applicable verifier on every case, ordered by identity id and then
/// by a hash of the inputs.
std::vector<IdentityReport> run_panel(const std::vector<PanelCase>& cases,
                                      const VerifyOptions& opts = {});
/// Lelong-Jensen only, on the Monte Carlo route.
std::vector<IdentityReport> run_monte_carlo_panel(const std::vector<PanelCase>& cases,
                                                  const VerifyOptions& opts);

void sort_reports(std::vector<IdentityReport>& reports);
std::uint64_t input_hash(const nlohmann::json& inputs);

nlohmann::json to_json(const IdentityReport& report);
nlohmann::json to_json(const std::vector<IdentityReport>& reports);

std::string to_string(ReportVerdict verdict);

}  // namespace lelong
