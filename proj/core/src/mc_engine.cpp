#include "lelong/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "lelong/errors.hpp"

namespace lelong {

namespace {

constexpr long kChunk = 4096;

struct ChunkSums {
  double sum = 0.0;
  double sumsq = 0.0;
  long count = 0;
};

double ball_volume(int m, double radius) {
  double v = std::pow(std::numbers::pi * radius * radius, m);
  for (int i = 2; i <= m; ++i) v /= i;
  return v;
}

void check_samples(long n) {
  if (n < kMinSamples) {
    throw InputError("Monte Carlo needs at least " + std::to_string(kMinSamples) + " samples");
  }
}

void check_failure(const MCEstimate& est, std::string_view what) {
  if (est.heavy_tail) {
    throw NumericalError("Monte Carlo estimate of " + std::string(what) +
                         " shows growing sample variance (infinite variance suspected)");
  }
}

// The integrand behaves like rho^a at the origin; its square is integrable on
// C^m only if a > -m. The exponent is read off along a few fixed directions.
bool infinite_variance_at_origin(const ModelCurrent& current, const Weight& field, FormKind kind,
                                 const std::function<double(double)>& kernel, double phi_max,
                                 double radius) {
  const int m = current.integration_dim();
  const double lo = radius * 1e-8;
  const double hi = radius * 1e-6;
  auto integrand = [&](const std::vector<cplx>& dir, double rho) {
    std::vector<cplx> z(dir);
    for (auto& zj : z) zj *= rho;
    const double phi = field.value(z);
    if (!(phi < phi_max)) return 0.0;
    const double kv = kernel(phi);
    return kv == 0.0 ? 0.0 : kv * form_density(current, field, kind, z).density;
  };
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<std::vector<cplx>> dirs = {std::vector<cplx>(m), std::vector<cplx>(m, cplx(norm, 0.0))};
  dirs[0][0] = 1.0;
  for (const auto& dir : dirs) {
    const double f_lo = std::abs(integrand(dir, lo));
    const double f_hi = std::abs(integrand(dir, hi));
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) return true;
    if (f_lo == 0.0 || f_hi == 0.0) continue;
    const double a = std::log(f_lo / f_hi) / std::log(lo / hi);
    if (a <= -m + 1e-6) return true;
  }
  return false;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser applied to a combination of both words.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MCEstimate mc_integrate(const ModelCurrent& current, const Weight& field, FormKind kind,
                        const std::function<double(double)>& kernel, double phi_max,
                        const McOptions& opts) {
  const int m = current.integration_dim();
  if (field.dim() != m) throw InputError("weight field does not live on the integration space");
  const long n = opts.samples;
  if (n < 2) throw InputError("Monte Carlo needs at least two samples");

  const double radius = field.bounding_radius(phi_max);
  const double volume = ball_volume(m, radius);
  const long chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkSums> sums(chunks);

  auto run_chunk = [&](long c) {
    std::mt19937_64 rng(mix_seed(opts.seed, static_cast<std::uint64_t>(c)));
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    std::vector<cplx> z(m);
    ChunkSums acc;
    const long begin = c * kChunk;
    const long end = std::min(n, begin + kChunk);
    for (long i = begin; i < end; ++i) {
      double norm2 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        z[j] = {re, im};
        norm2 += re * re + im * im;
      }
      const double rho = radius * std::pow(unif(rng), 0.5 / m);
      const double scale = rho / std::sqrt(norm2);
      for (auto& zj : z) zj *= scale;

      double value = 0.0;
      const double phi = field.value(z);
      if (phi < phi_max) {
        const double kv = kernel(phi);
        if (kv != 0.0) value = volume * kv * form_density(current, field, kind, z).density;
      }
      acc.sum += value;
      acc.sumsq += value * value;
      ++acc.count;
    }
    sums[c] = acc;
  };

  int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp<int>(threads, 1, static_cast<int>(std::max<long>(1, chunks)));
  if (threads == 1) {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<long> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (long c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
  }

  auto stats = [&](long upto) {
    double s = 0.0;
    double ss = 0.0;
    long cnt = 0;
    for (long c = 0; c < upto; ++c) {
      s += sums[c].sum;
      ss += sums[c].sumsq;
      cnt += sums[c].count;
    }
    const double mean = s / cnt;
    const double var = cnt > 1 ? std::max(0.0, (ss - cnt * mean * mean) / (cnt - 1)) : 0.0;
    return std::pair{mean, var};
  };

  MCEstimate est;
  const auto [mean, var] = stats(chunks);
  est.value = mean;
  est.std_error = std::sqrt(var / n);
  est.n_samples = n;
  est.seed = opts.seed;
  if (chunks >= 4) {
    const auto [mean_half, var_half] = stats(chunks / 2);
    (void)mean_half;
    est.heavy_tail = var > 4.0 * var_half && var > 1e-300;
  }
  est.heavy_tail =
      est.heavy_tail || infinite_variance_at_origin(current, field, kind, kernel, phi_max, radius);

  if (kind == FormKind::Ddc) {
    const double atom = laplacian_decomposition(current.density(), m).atom_mass;
    if (atom != 0.0) {
      const std::vector<cplx> origin(m);
      const double phi0 = field.value(origin);
      if (phi0 < phi_max) est.value += atom * kernel(phi0);
    }
  }
  return est;
}

MCEstimate mc_mass(const ModelCurrent& current, const Weight& weight, double r, long n_samples,
                   std::uint64_t seed, int threads) {
  check_samples(n_samples);
  if (!(r > 0.0 && r < weight.domain_radius())) throw InputError("radius out of (0, R(phi))");
  const auto rw = restrict_weight(weight, current);
  auto est = mc_integrate(current, rw.field, FormKind::Mass, [](double) { return 1.0; }, r,
                          McOptions{n_samples, seed, threads});
  check_failure(est, "the mass");
  return est;
}

MCEstimate mc_ddc_mass(const ModelCurrent& current, const Weight& weight, double t,
                       const McOptions& opts) {
  check_samples(opts.samples);
  if (!(t > 0.0 && t < weight.domain_radius())) throw InputError("radius out of (0, R(phi))");
  const auto rw = restrict_weight(weight, current);
  auto est = mc_integrate(current, rw.field, FormKind::Ddc, [](double) { return 1.0; }, t, opts);
  check_failure(est, "the dd^c mass");
  return est;
}

MCEstimate mc_ring_alpha(const ModelCurrent& current, const Weight& weight, double r1, double r2,
                         const McOptions& opts) {
  check_samples(opts.samples);
  if (!(r1 >= 0.0 && r1 <= r2 && r2 < weight.domain_radius())) {
    throw InputError("ring radii must satisfy 0 <= r1 <= r2 < R(phi)");
  }
  if (r1 == r2) return MCEstimate{0.0, 0.0, opts.samples, opts.seed, false};
  const auto rw = restrict_weight(weight, current);
  auto est = mc_integrate(
      current, rw.field, FormKind::Alpha, [r1](double phi) { return phi >= r1 ? 1.0 : 0.0; }, r2,
      opts);
  check_failure(est, "the ring mass");
  return est;
}

}  // namespace lelong
