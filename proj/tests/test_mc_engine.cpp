#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "lelong/errors.hpp"
#include "lelong/mass_engine.hpp"
#include "lelong/mc_engine.hpp"

using namespace lelong;

namespace {

const Domain kC2{1.0, 2};

ModelCurrent line(RadialDensity u) { return ModelCurrent(CurrentKind::Subspace, kC2, 1, std::move(u)); }
RadialDensity s_eps(double eps) { return RadialDensity({{1.0, eps}, {-1.0, 0.0}}); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("mc_mass covers the worked example") {
  const auto S = line(s_eps(0.5));
  const auto est = mc_mass(S, Weight::isotropic_power(kC2, 1.0), 0.25, 1000000, 42);
  CHECK(est.n_samples == 1000000);
  CHECK(est.seed == 42);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.value - (-1.0 / 3.0)) <= 3.0 * est.std_error);
}

TEST_CASE("mc_mass of the zero current is exactly zero") {
  const auto est = mc_mass(line(RadialDensity()), Weight::isotropic_power(kC2, 1.0), 0.3, 1000, 9);
  CHECK(est.value == 0.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("Monte Carlo matches closed forms on smooth currents and general weights") {
  const ModelCurrent T(CurrentKind::Smooth, kC2, 1, s_eps(1.0));
  McOptions mc{400000, 5, 0};
  EvalOptions o;
  o.engine = Engine::MonteCarlo;
  o.mc = mc;
  for (double k : {1.0, 2.0}) {
    const auto phi = Weight::isotropic_power(kC2, k);
    for (double r : {0.05, 0.3}) {
      const auto m = mass_T(T, phi, r, o);
      CHECK(m.method == Method::MonteCarlo);
      CHECK(std::abs(m.value - mass_T(T, phi, r).value) <= 4.0 * m.abs_error_bound);
      const auto d = nu_ddc(T, phi, r, o);
      // dd^c|z|^2 has constant density, so the sample variance can vanish.
      CHECK(std::abs(d.value - nu_ddc(T, phi, r).value) <= 4.0 * d.abs_error_bound + 1e-12);
      const auto a = ring_alpha_mass(T, phi, 0.5 * r, r, o);
      CHECK(std::abs(a.value - ring_alpha_mass(T, phi, 0.5 * r, r).value) <= 4.0 * a.abs_error_bound);
    }
  }
  // Anisotropic weight on the z_2-axis restricts to |z_2|^4: a closed form exists for the line.
  const auto S = line(s_eps(1.0));
  const auto psi = Weight::anisotropic(kC2, {1.0, 2.0});
  const auto est = mc_mass(S, psi, 0.1, 400000, 3);
  CHECK(std::abs(est.value - mass_T(S, Weight::isotropic_power(kC2, 2.0), 0.1).value) <=
        4.0 * est.std_error);
}

TEST_CASE("Monte Carlo is reproducible and independent of the thread count") {
  const ModelCurrent T(CurrentKind::Smooth, kC2, 1, s_eps(0.7));
  const auto psi = Weight::anisotropic(kC2, {1.0, 2.0});
  const auto a = mc_mass(T, psi, 0.1, 50000, 7, 1);
  const auto b = mc_mass(T, psi, 0.1, 50000, 7, 4);
  const auto c = mc_mass(T, psi, 0.1, 50000, 7, 1);
  CHECK(same_bits(a.value, b.value));
  CHECK(same_bits(a.std_error, b.std_error));
  CHECK(same_bits(a.value, c.value));
  const auto d = mc_mass(T, psi, 0.1, 50000, 8, 1);
  CHECK_FALSE(same_bits(a.value, d.value));
}

TEST_CASE("standard error scales like n^{-1/2}") {
  const auto S = line(s_eps(0.5));
  const auto phi = Weight::isotropic_power(kC2, 1.0);
  const auto small = mc_mass(S, phi, 0.25, 20000, 1);
  const auto large = mc_mass(S, phi, 0.25, 200000, 1);
  const double ratio = small.std_error / large.std_error;
  CHECK(ratio >= std::sqrt(10.0) / 2.0);
  CHECK(ratio <= std::sqrt(10.0) * 2.0);
}

TEST_CASE("Monte Carlo input validation and infinite variance") {
  const auto S = line(s_eps(0.5));
  const auto phi = Weight::isotropic_power(kC2, 1.0);
  CHECK_THROWS_AS(mc_mass(S, phi, 0.25, 99, 1), InputError);
  CHECK_THROWS_AS(mc_mass(S, phi, 1.5, 1000, 1), InputError);
  // dd^c S_eps has density ~ rho^{2 eps - 2}: infinite variance for eps <= 1/2.
  EvalOptions o;
  o.engine = Engine::MonteCarlo;
  o.mc = {400000, 1, 0};
  CHECK_THROWS_AS(nu_ddc(line(s_eps(0.25)), phi, 0.2, o), NumericalError);
}

TEST_CASE("mix_seed spreads streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t i = 0; i < 256; ++i) seen.insert(mix_seed(s, i));
  }
  CHECK(seen.size() == 4 * 256);
  CHECK(mix_seed(3, 5) == mix_seed(3, 5));
}
