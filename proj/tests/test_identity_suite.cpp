#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lelong/errors.hpp"
#include "lelong/identity_suite.hpp"

using namespace lelong;

namespace {

const Domain kC2{1.0, 2};

ModelCurrent line(RadialDensity u) { return ModelCurrent(CurrentKind::Subspace, kC2, 1, std::move(u)); }
RadialDensity s_eps(double eps) { return RadialDensity({{1.0, eps}, {-1.0, 0.0}}); }
Weight pow_w(double k) { return Weight::isotropic_power(kC2, k); }

void check_consistent(const IdentityReport& r) {
  if (r.verdict == ReportVerdict::NotApplicable) return;
  if (r.inequality) {
    CHECK((r.verdict == ReportVerdict::Pass) == (r.residual >= -r.tolerance));
  } else {
    CHECK((r.verdict == ReportVerdict::Pass) == (r.residual <= r.tolerance));
  }
  for (const auto& c : r.checks) {
    if (c.verdict == ReportVerdict::NotApplicable) continue;
    if (c.inequality) {
      CHECK((c.verdict == ReportVerdict::Pass) == (c.residual >= -c.tolerance));
    } else {
      CHECK((c.verdict == ReportVerdict::Pass) == (c.residual <= c.tolerance));
    }
  }
}

}  // namespace

TEST_CASE("Lelong-Jensen: worked example, degenerate ring and log density") {
  const auto r = verify_lelong_jensen(line(s_eps(0.5)), pow_w(1.0), 0.1, 0.2);
  CHECK(r.identity_id == "lelong_jensen");
  CHECK(r.verdict == ReportVerdict::Pass);
  CHECK(r.residual <= 1e-9);
  CHECK(r.lhs == doctest::Approx(2.0 * (std::sqrt(0.2) - std::sqrt(0.1)) / 1.5).epsilon(1e-12));
  check_consistent(r);

  const auto d = verify_lelong_jensen(line(s_eps(0.5)), pow_w(1.0), 0.2, 0.2);
  CHECK(d.verdict == ReportVerdict::Pass);
  CHECK(d.lhs == 0.0);
  CHECK(d.rhs == 0.0);

  const auto l = verify_lelong_jensen(line(RadialDensity({}, 1.0)), pow_w(1.0), 0.1, 0.2);
  CHECK(l.verdict == ReportVerdict::Pass);
  CHECK(l.lhs == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(l.residual <= 1e-9);

  CHECK_THROWS_AS(verify_lelong_jensen(line(s_eps(0.5)), pow_w(1.0), 0.3, 0.2), InputError);
}

TEST_CASE("Lelong-Jensen on the Monte Carlo route") {
  const ModelCurrent T(CurrentKind::Smooth, kC2, 1, s_eps(1.0));
  VerifyOptions o;
  o.eval.engine = Engine::MonteCarlo;
  o.eval.mc = {200000, 7, 0};
  const auto r = verify_lelong_jensen(T, Weight::anisotropic(kC2, {1.0, 2.0}), 0.05, 0.1, o);
  CHECK(r.verdict == ReportVerdict::Pass);
  CHECK(r.tolerance > 0.0);
  CHECK(std::find(r.engines.begin(), r.engines.end(), "monte_carlo") != r.engines.end());
}

TEST_CASE("f_monotone") {
  const auto grid = geometric_grid(1e-4, 0.25, 8);
  for (double k : {0.5, 2.0}) {
    const auto r = verify_f_monotone(line(s_eps(0.5)), pow_w(k), grid);
    CHECK(r.verdict == ReportVerdict::Pass);
    check_consistent(r);
  }
  CHECK(verify_f_monotone(line(RadialDensity()), pow_w(1.0), grid).verdict == ReportVerdict::Pass);
  const auto l = verify_f_monotone(line(RadialDensity({}, 1.0)), pow_w(1.0), grid);
  CHECK(l.verdict == ReportVerdict::NotApplicable);
  CHECK(l.note.find("diverg") != std::string::npos);
}

TEST_CASE("power scaling: worked example and log density") {
  for (double eps : {0.25, 0.5, 1.0}) {
    const auto r = verify_power_scaling(line(s_eps(eps)), pow_w(1.0), 2.0, 0.3);
    CHECK(r.verdict == ReportVerdict::Pass);
    CHECK(r.residual <= 1e-9);
    const double expect = 2.0 * 4.0 * (std::pow(0.09, eps / 2.0) / (eps + 2.0) - 0.5);
    CHECK(r.lhs == doctest::Approx(expect).epsilon(1e-12));
  }
  const auto l = verify_power_scaling(line(RadialDensity({}, 1.0)), pow_w(1.0), 2.0, 0.3);
  CHECK(l.verdict == ReportVerdict::Pass);
  CHECK(l.lhs == doctest::Approx(2.0 * (2.0 * std::log(0.3) - 1.0)).epsilon(1e-12));
  const auto one = verify_power_scaling(line(s_eps(0.5)), pow_w(1.0), 1.0, 0.3);
  CHECK(one.verdict == ReportVerdict::Pass);
  CHECK(one.residual == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("limit scaling") {
  for (double k : {0.5, 2.0, 3.0}) {
    const auto r = verify_limit_scaling(line(s_eps(0.5)), pow_w(1.0), k);
    CHECK(r.verdict == ReportVerdict::Pass);
    CHECK(r.lhs == doctest::Approx(-2.0 * k).epsilon(1e-6));
  }
  const auto c = verify_limit_scaling(line(RadialDensity({{-1.0, 0.0}})), pow_w(1.0), 3.0);
  CHECK(c.verdict == ReportVerdict::Pass);
  CHECK(c.lhs == doctest::Approx(-6.0).epsilon(1e-9));
  CHECK(c.rhs == doctest::Approx(-6.0).epsilon(1e-9));
  const auto z = verify_limit_scaling(line(RadialDensity()), pow_w(1.0), 2.0);
  CHECK(z.verdict == ReportVerdict::Pass);
  CHECK(z.lhs == 0.0);
  CHECK(verify_limit_scaling(line(RadialDensity({}, 1.0)), pow_w(1.0), 2.0).verdict ==
        ReportVerdict::NotApplicable);
}

TEST_CASE("dd^c scaling") {
  for (double eps : {0.25, 1.0}) {
    for (double k : {0.5, 1.0, 2.0}) {
      const double s = 0.3;
      const auto r = verify_ddc_scaling(line(s_eps(eps)), pow_w(1.0), k, s);
      CHECK(r.verdict == ReportVerdict::Pass);
      CHECK(r.lhs == doctest::Approx(2.0 * eps * std::pow(s, eps)).epsilon(1e-9));
    }
  }
}

TEST_CASE("change of variable in the dd^c integral") {
  const auto r = verify_corollary1_change_of_variable(line(s_eps(0.5)), pow_w(1.0), 2.0, 0.25);
  CHECK(r.verdict == ReportVerdict::Pass);
  CHECK(r.residual <= 1e-9);
  CHECK(std::isfinite(r.lhs));
  const auto z = verify_corollary1_change_of_variable(line(RadialDensity()), pow_w(1.0), 2.0, 0.25);
  CHECK(z.verdict == ReportVerdict::Pass);
  CHECK(z.lhs == 0.0);
  const auto l = verify_corollary1_change_of_variable(line(RadialDensity({}, 1.0)), pow_w(1.0), 2.0, 0.25);
  CHECK(l.verdict == ReportVerdict::Pass);
  CHECK(std::isinf(l.lhs));
  CHECK(std::isinf(l.rhs));
}

TEST_CASE("upper bounds by the dd^c mass") {
  const double r = 0.3;
  const auto rep = verify_corollary2(line(s_eps(0.5)), pow_w(1.0), r, 2.0);
  CHECK(rep.verdict == ReportVerdict::Pass);
  CHECK(std::any_of(rep.checks.begin(), rep.checks.end(), [](const auto& c) { return c.inequality; }));
  check_consistent(rep);
  bool saw_second_bound = false;
  for (const auto& c : rep.checks) {
    if (!c.inequality) continue;
    CHECK(c.residual >= -1e-9);
    if (std::abs(c.rhs - (-0.5 * 2.0 * 0.5 * std::sqrt(0.15))) < 1e-12) saw_second_bound = true;
  }
  CHECK(saw_second_bound);
  CHECK(verify_corollary2(line(s_eps(0.5)), pow_w(1.0), r, 1.0).verdict == ReportVerdict::Pass);
  const auto z = verify_corollary2(line(RadialDensity()), pow_w(1.0), r, 2.0);
  CHECK(z.verdict == ReportVerdict::Pass);
  CHECK(z.lhs == 0.0);
  CHECK_THROWS_AS(verify_corollary2(line(s_eps(0.5)), pow_w(1.0), r, 0.5), InputError);
}

TEST_CASE("comparison: anisotropic pair with ell = 2") {
  const auto psi = Weight::anisotropic(kC2, {1.0, 2.0});
  const auto r = verify_comparison(line(s_eps(0.5)), pow_w(1.0), psi, 2.0);
  CHECK(r.verdict == ReportVerdict::Pass);
  CHECK(r.lhs == doctest::Approx(-4.0).epsilon(1e-6));
  CHECK(r.rhs == doctest::Approx(-4.0).epsilon(1e-6));
  const auto same = verify_comparison(line(s_eps(0.5)), pow_w(1.0), pow_w(1.0), 1.0);
  CHECK(same.verdict == ReportVerdict::Pass);
  const auto pos = verify_comparison(line(RadialDensity({{1.0, 0.5}})), pow_w(1.0), psi, 2.0);
  CHECK(pos.verdict == ReportVerdict::Pass);
  CHECK(pos.lhs == doctest::Approx(0.0).scale(1.0).epsilon(1e-5));
  for (double ell : {0.5, 2.0}) {
    const auto e = verify_comparison(line(s_eps(1.0)), pow_w(1.0), pow_w(ell), ell);
    CHECK(e.verdict == ReportVerdict::Pass);
    CHECK(e.lhs == doctest::Approx(-2.0 * ell).epsilon(1e-6));
  }
  CHECK(verify_comparison(line(RadialDensity({}, 1.0)), pow_w(1.0), pow_w(2.0), 2.0).verdict ==
        ReportVerdict::NotApplicable);
}

TEST_CASE("extension remark") {
  for (double k : {0.5, 2.0}) {
    const auto r = verify_extension_remark(line(s_eps(0.5)), pow_w(k), 0.2);
    CHECK(r.verdict == ReportVerdict::Pass);
    CHECK(r.lhs == 0.0);
  }
  CHECK(verify_extension_remark(line(RadialDensity()), pow_w(1.0), 0.2).verdict == ReportVerdict::Pass);
  CHECK(verify_extension_remark(line(RadialDensity({}, 1.0)), pow_w(1.0), 0.2).verdict ==
        ReportVerdict::NotApplicable);
}

TEST_CASE("verify_by_id covers every id and rejects unknown ones") {
  const auto T = line(s_eps(0.5));
  for (const auto& id : identity_ids()) {
    const auto r = verify_by_id(id, T, pow_w(1.0));
    CHECK(r.identity_id == id);
    CHECK(r.verdict == ReportVerdict::Pass);
  }
  CHECK(identity_ids().size() == 9);
  CHECK_THROWS_AS(verify_by_id("riemann", T, pow_w(1.0)), InputError);
}

TEST_CASE("default panel: thirty cases, no failures, deterministic order") {
  const auto cases = default_panel();
  CHECK(cases.size() == 30);
  const auto reports = run_panel(cases);
  int pass = 0;
  for (const auto& r : reports) {
    CHECK_MESSAGE(r.verdict != ReportVerdict::Fail, r.identity_id, " ", r.inputs.dump());
    if (r.verdict == ReportVerdict::Pass) ++pass;
    check_consistent(r);
    if (r.verdict != ReportVerdict::NotApplicable) CHECK_FALSE(r.engines.empty());
  }
  CHECK(pass > static_cast<int>(reports.size()) * 3 / 4);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const auto& a = reports[i - 1];
    const auto& b = reports[i];
    CHECK((a.identity_id < b.identity_id ||
           (a.identity_id == b.identity_id && input_hash(a.inputs) <= input_hash(b.inputs))));
  }
  CHECK(to_json(run_panel(cases)).dump() == to_json(reports).dump());
}

TEST_CASE("reports serialize non-finite numbers as strings") {
  const auto l = verify_corollary1_change_of_variable(line(RadialDensity({}, 1.0)), pow_w(1.0), 2.0, 0.25);
  const auto j = to_json(l);
  CHECK(j["lhs"] == "inf");
  CHECK(j["verdict"] == "pass");
  CHECK(j.contains("inputs"));
}
