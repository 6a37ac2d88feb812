#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lelong/current_model.hpp"
#include "lelong/errors.hpp"
#include "oracles.hpp"

using namespace lelong;

namespace {

ModelCurrent line(RadialDensity u, double ball = 1.0) {
  return ModelCurrent(CurrentKind::Subspace, Domain{ball, 2}, 1, std::move(u));
}

RadialDensity s_eps(double eps) { return RadialDensity({{1.0, eps}, {-1.0, 0.0}}); }

// d^2 f / dz_j dzbar_k by central differences in the real coordinates.
CMat fd_complex_hessian(const std::function<double(std::span<const cplx>)>& f,
                        std::vector<cplx> z, double h) {
  const int n = static_cast<int>(z.size());
  auto shifted = [&](int j, cplx dj, int k, cplx dk) {
    auto w = z;
    w[j] += dj;
    w[k] += dk;
    return f(w);
  };
  auto d2 = [&](int j, cplx ej, int k, cplx ek) {
    return (shifted(j, h * ej, k, h * ek) - shifted(j, h * ej, k, -h * ek) -
            shifted(j, -h * ej, k, h * ek) + shifted(j, -h * ej, k, -h * ek)) /
           (4.0 * h * h);
  };
  const cplx one{1.0, 0.0}, im{0.0, 1.0};
  CMat H(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double xx = d2(j, one, k, one), yy = d2(j, im, k, im);
      const double xy = d2(j, one, k, im), yx = d2(j, im, k, one);
      H(j, k) = 0.25 * cplx(xx + yy, xy - yx);
    }
  }
  return H;
}

}  // namespace

TEST_CASE("parse_current: the worked example and the zero current") {
  const auto S = parse_current(R"({"n":2,"subspace_dim":1,"monomials":[[1,0.5],[-1,0]]})");
  CHECK(S.kind() == CurrentKind::Subspace);
  CHECK(S.bidim() == 1);
  CHECK(S.sign_class() == SignClass::Nonpositive);
  CHECK(S.is_psh());

  const auto Z = parse_current(R"({"n":2,"subspace_dim":1,"monomials":[[0,0]]})");
  CHECK(Z.sign_class() == SignClass::Zero);
  CHECK(Z.nonpositive());
  CHECK(Z.nonnegative());
}

TEST_CASE("parse_current: psh check depends on the ball radius") {
  // u = rho^2 - rho^4: Laplacian 4 - 16 rho^2 turns negative past rho = 1/2.
  const char* spec = R"({"n":2,"subspace_dim":1,"ball_radius":%s,"monomials":[[1,1],[-1,2]]})";
  char buf[128];
  std::snprintf(buf, sizeof buf, spec, "1.0");
  CHECK_THROWS_AS(parse_current(buf), InputError);
  std::snprintf(buf, sizeof buf, spec, "0.45");
  CHECK(parse_current(buf).is_psh());
}

TEST_CASE("parse_current: parameters and schema errors") {
  const char* spec = R"({"n":2,"subspace_dim":1,"monomials":[[1,"$eps"],[-1,0]]})";
  CHECK_THROWS_AS(parse_current(spec), InputError);
  const auto S = parse_current(spec, {{"eps", 0.25}});
  CHECK(S.density().monomials()[0].exponent == 0.25);

  CHECK_THROWS_AS(parse_current("{not json"), InputError);
  CHECK_THROWS_AS(parse_current("[1,2]"), InputError);
  CHECK_THROWS_AS(parse_current(R"({"subspace_dim":1})"), InputError);
  CHECK_THROWS_AS(parse_current(R"({"n":2,"subspace_dim":1,"colour":"red"})"), InputError);
  CHECK_THROWS_AS(parse_current(R"({"n":2,"subspace_dim":2})"), InputError);
  CHECK_THROWS_AS(parse_current(R"({"n":2,"subspace_dim":1,"monomials":[[1]]})"), InputError);
  CHECK_THROWS_AS(parse_current(R"({"n":2,"subspace_dim":1,"kind":"weird"})"), InputError);
  CHECK_THROWS_AS(parse_current(R"({"n":2,"subspace_dim":1,"ball_radius":2,"log_coeff":1})"),
                  InputError);
  // A concave density is not psh.
  CHECK_THROWS_AS(parse_current(R"({"n":2,"subspace_dim":1,"monomials":[[-1,1]]})"), InputError);
}

TEST_CASE("laplacian_decomposition: monomial, log atom and zero") {
  const double eps = 0.3;
  const auto mono = laplacian_decomposition(RadialDensity({{1.0, eps}}), 1);
  CHECK(mono.atom_mass == 0.0);
  for (double rho : {1e-3, 0.1, 0.7}) {
    CHECK(mono.ac_density(rho) ==
          doctest::Approx(4.0 * eps * eps * std::pow(rho, 2.0 * eps - 2.0)).epsilon(1e-13));
  }
  // Integrating the density over {rho^2 < t} gives 2 eps t^eps in dd^c units.
  const double t = 0.2;
  const double mass = oracle::integrate([&](double r) { return mono.ac_density(r) * r; }, 0.0,
                                        std::sqrt(t));
  CHECK(mass == doctest::Approx(2.0 * eps * std::pow(t, eps)).epsilon(1e-10));

  const auto lg = laplacian_decomposition(RadialDensity({}, 1.0), 1);
  CHECK(lg.atom_mass == 2.0);
  CHECK(lg.ac_density(0.3) == doctest::Approx(0.0).epsilon(1e-12));
  // dd^c-mass of log(rho^2 + eta^2) on the unit disc tends to the atom.
  const double eta = 1e-4;
  const double smoothed = oracle::integrate(
      [&](double r) { return 4.0 * eta * eta / std::pow(r * r + eta * eta, 2) * r; }, 0.0, 1.0);
  CHECK(smoothed == doctest::Approx(lg.atom_mass).epsilon(1e-7));

  const auto zero = laplacian_decomposition(RadialDensity(), 1);
  CHECK(zero.atom_mass == 0.0);
  CHECK(zero.ac_density(0.5) == 0.0);
  // The log term only produces an atom on a line.
  CHECK(laplacian_decomposition(RadialDensity({}, 1.0), 2).atom_mass == 0.0);
}

TEST_CASE("laplacian matches finite differences on random densities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0), expo(0.0, 2.5), delta(0.1, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Monomial> mons;
    for (int i = 0; i < 3; ++i) mons.push_back({coeff(rng), expo(rng) + i * 3.0});
    const RadialDensity u(mons, coeff(rng), {{coeff(rng), delta(rng)}});
    const int p = 1 + trial % 3;
    for (double rho : {0.01, 0.2, 0.6, 0.95}) {
      const double fd = oracle::radial_laplacian([&](double r) { return u(r); }, rho, p);
      const double exact = u.laplacian(rho, p);
      CHECK(exact == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("validate_psh: log-power passes, concave fails with a location") {
  CHECK(line(RadialDensity({}, 0.0, {{1.0, 0.5}})).is_psh());
  CHECK(line(RadialDensity({}, 0.0, {{1.0, 1.0}})).is_psh());
  for (double eps : {0.1, 0.5, 1.0, 3.0}) CHECK(line(s_eps(eps)).is_psh());

  const ModelCurrent bad(CurrentKind::Subspace, Domain{1.0, 2}, 1, RadialDensity({{-1.0, 1.0}}));
  CHECK_FALSE(bad.is_psh());
  REQUIRE(bad.psh_report().first_failure_rho.has_value());
  CHECK(*bad.psh_report().first_failure_rho > 0.0);
  CHECK(bad.psh_report().min_ac_density == doctest::Approx(-4.0));
}

TEST_CASE("accepted currents satisfy the grid invariants") {
  for (const auto& u : {s_eps(0.25), RadialDensity({}, 1.0), RadialDensity({}, 0.0, {{2.0, 0.5}}),
                        RadialDensity({{1.0, 1.0}, {-0.5, 0.0}})}) {
    const auto T = line(u);
    REQUIRE(T.is_psh());
    const auto dec = laplacian_decomposition(u, 1);
    CHECK(dec.atom_mass >= 0.0);
    for (double rho : validation_grid(1.0)) {
      CHECK(dec.ac_density(rho) >= -kPshTolerance);
      if (T.sign_class() == SignClass::Nonpositive) CHECK(u(rho) <= 1e-12);
      if (T.sign_class() == SignClass::Nonnegative) CHECK(u(rho) >= -1e-12);
    }
  }
  const auto grid = validation_grid(0.5);
  CHECK(grid.size() == 512);
  CHECK(grid.front() > 0.5e-6);
  CHECK(grid.back() == doctest::Approx(0.5));
}

TEST_CASE("sign classes") {
  CHECK(line(RadialDensity({{1.0, 0.5}})).sign_class() == SignClass::Nonnegative);
  CHECK(line(RadialDensity({{1.0, 1.0}, {-0.5, 0.0}})).sign_class() == SignClass::Mixed);
  CHECK(line(RadialDensity({}, 1.0)).sign_class() == SignClass::Nonpositive);
}

TEST_CASE("weights: hessians match finite differences and log phi is psh") {
  const Domain d2{1.0, 2}, d3{1.0, 3};
  const std::vector<Weight> weights = {
      Weight::isotropic_power(d2, 1.0), Weight::isotropic_power(d3, 0.7),
      Weight::isotropic_power(d2, 2.5), Weight::anisotropic(d2, {1.0, 2.0}),
      Weight::anisotropic(d3, {0.5, 1.0, 3.0}),
      Weight::shifted(d2, {cplx(0.1, 0.0), cplx(0.0, 0.05)}, 1.0),
      Weight::shifted(d2, {cplx(-0.05, 0.02), cplx(0.03, 0.0)}, 1.5),
      Weight::anisotropic(d2, {1.0, 2.0}).power(1.5).scaled(2.0)};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-0.4, 0.4);
  for (const auto& w : weights) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<cplx> z(w.dim());
      for (auto& c : z) c = {coord(rng), coord(rng)};
      double phi = 0.0;
      CVec grad;
      CMat hess;
      w.derivatives(z, phi, grad, hess);
      CHECK(phi == doctest::Approx(w.value(z)).epsilon(1e-13));
      const auto fd = fd_complex_hessian([&](std::span<const cplx> x) { return w.value(x); }, z, 1e-4);
      CHECK((hess - fd).norm() <= 1e-5 * (1.0 + hess.norm()));

      const CMat lh = w.log_hessian(z);
      const auto fdl = fd_complex_hessian([&](std::span<const cplx> x) { return std::log(w.value(x)); },
                                          z, 1e-5);
      CHECK((lh - fdl).norm() <= 1e-4 * (1.0 + lh.norm()));
      Eigen::SelfAdjointEigenSolver<CMat> es(lh);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * (1.0 + lh.norm()));
      Eigen::SelfAdjointEigenSolver<CMat> eh(hess);
      CHECK(eh.eigenvalues().minCoeff() >= -1e-10 * (1.0 + hess.norm()));
    }
  }
}

TEST_CASE("weights: semi-exhaustive radius and bounding radius") {
  const Domain d{1.0, 2};
  const auto w = Weight::isotropic_power(d, 2.0);
  CHECK(w.domain_radius() == doctest::Approx(0.99));
  CHECK_THROWS_AS(Weight::isotropic_power(d, 1.0, 1.5), InputError);
  CHECK_THROWS_AS(Weight::isotropic_power(d, -1.0), InputError);
  CHECK_THROWS_AS(Weight::anisotropic(d, {1.0}), InputError);
  CHECK_THROWS_AS(Weight::anisotropic(d, {1.0, 0.0}), InputError);
  CHECK(Weight::isotropic_power(d, 1.0, 0.5).domain_radius() == 0.5);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-0.7, 0.7);
  for (const auto& wt : {Weight::anisotropic(d, {1.0, 2.0}),
                         Weight::shifted(d, {cplx(0.2, 0.0), cplx(0.0, 0.1)}, 1.0)}) {
    const double r = 0.3 * wt.domain_radius();
    const double bound = wt.bounding_radius(r);
    for (int i = 0; i < 2000; ++i) {
      std::vector<cplx> z = {{coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
      if (wt.value(z) < r) CHECK(std::sqrt(std::norm(z[0]) + std::norm(z[1])) <= bound + 1e-12);
    }
  }
}

TEST_CASE("parse_weight: micro-syntax and JSON agree") {
  const Domain d{1.0, 2};
  const std::vector<cplx> z = {{0.1, 0.2}, {-0.3, 0.05}};
  CHECK(parse_weight("pow:k=2", d).value(z) ==
        doctest::Approx(Weight::isotropic_power(d, 2.0).value(z)));
  CHECK(parse_weight(R"({"kind":"pow","k":2})", d).value(z) ==
        doctest::Approx(Weight::isotropic_power(d, 2.0).value(z)));
  CHECK(parse_weight("aniso:b=1,2", d).value(z) ==
        doctest::Approx(Weight::anisotropic(d, {1.0, 2.0}).value(z)));
  CHECK(parse_weight(R"({"kind":"aniso","b":[1,2]})", d).value(z) ==
        doctest::Approx(Weight::anisotropic(d, {1.0, 2.0}).value(z)));
  const auto sh = Weight::shifted(d, {cplx(0.1, 0.0), cplx(0.0, 0.2)}, 1.5);
  CHECK(parse_weight("shifted:k=1.5,c=0.1:0;0:0.2", d).value(z) == doctest::Approx(sh.value(z)));
  CHECK(parse_weight(R"({"kind":"shifted","k":1.5,"center":[[0.1,0],[0,0.2]]})", d).value(z) ==
        doctest::Approx(sh.value(z)));
  CHECK(parse_weight("pow:k=1,R=0.5", d).domain_radius() == 0.5);
  CHECK(parse_weight("pow:k=$k", d, {{"k", 3.0}}).exponent() == 3.0);

  CHECK_THROWS_AS(parse_weight("cube:k=1", d), InputError);
  CHECK_THROWS_AS(parse_weight("pow:k=1,2", d), InputError);
  CHECK_THROWS_AS(parse_weight("pow:k=abc", d), InputError);
  CHECK_THROWS_AS(parse_weight("aniso:b=1", d), InputError);
  CHECK_THROWS_AS(parse_weight("pow:k=1,R=5", d), InputError);
  CHECK_THROWS_AS(parse_weight(R"({"kind":"pow","k":1,"extra":0})", d), InputError);
}

TEST_CASE("restrict_weight: pure-power traces") {
  const auto S = line(s_eps(0.5));
  for (double k : {0.5, 1.0, 3.0}) {
    const auto rw = restrict_weight(Weight::isotropic_power(S.domain(), k), S);
    REQUIRE(rw.is_pure());
    CHECK(rw.pure->k == k);
    // Restricting again changes nothing.
    CHECK(rw.field.restricted_to_tail(1).pure_power_exponent() == k);
  }
  const auto ax = restrict_weight(Weight::anisotropic(S.domain(), {1.0, 2.5}), S);
  REQUIRE(ax.is_pure());
  CHECK(ax.pure->k == 2.5);

  const ModelCurrent plane(CurrentKind::Subspace, Domain{1.0, 3}, 2, s_eps(0.5));
  const auto pl = restrict_weight(Weight::anisotropic(plane.domain(), {1.0, 1.0, 1.0}), plane);
  REQUIRE(pl.is_pure());
  CHECK(pl.pure->k == 1.0);
  CHECK_FALSE(restrict_weight(Weight::anisotropic(plane.domain(), {1.0, 1.0, 2.0}), plane).is_pure());

  const auto off = restrict_weight(
      Weight::shifted(S.domain(), {cplx(0.1, 0.0), cplx(0.0, 0.0)}, 1.0), S);
  CHECK_FALSE(off.is_pure());
  CHECK_FALSE(off.warning.empty());
  const auto on = restrict_weight(
      Weight::shifted(S.domain(), {cplx(0.0, 0.0), cplx(0.1, 0.0)}, 1.0), S);
  CHECK_FALSE(on.is_pure());
  CHECK(on.warning.empty());
}

TEST_CASE("powers_domain") {
  const auto S = line(s_eps(0.5));
  const auto L = line(RadialDensity({}, 1.0));
  for (const auto& T : {S, L}) {
    for (double j : {1.0, 0.5, 4.0}) {
      const auto dom = powers_domain(T, Weight::isotropic_power(T.domain(), j));
      CHECK(dom.k_min == 0.0);
      CHECK(dom.unbounded());
      CHECK(dom.contains(1e-3));
      CHECK(dom.contains(1e3));
      CHECK_FALSE(dom.contains(0.0));
    }
  }
  const auto gen = powers_domain(
      S, Weight::shifted(S.domain(), {cplx(0.1, 0.0), cplx(0.0, 0.0)}, 1.0));
  CHECK(gen.contains(1.0));
  CHECK(gen.contains(5.0));
  CHECK(gen.unbounded());
}
