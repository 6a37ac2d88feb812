#pragma once

#include <cstdint>
#include <functional>

#include "lelong/current_model.hpp"
#include "lelong/evaluation.hpp"
#include "lelong/forms.hpp"

namespace lelong {

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
  /// Sample variance kept growing with the sample count.
  bool heavy_tail = false;
};

/// Minimum sample count accepted by the public estimators.
inline constexpr long kMinSamples = 100;

/// Monte Carlo estimate of  int kernel(phi(z)) d mu(z)  where mu is the
/// measure selected by `kind` on the integration space of `current` and
/// `field` is the weight restricted to that space. `kernel` must vanish for
/// phi >= phi_max.
///
/// Points are drawn uniformly from the smallest centred ball containing
/// {phi < phi_max}, i.e. with polyradius density proportional to
/// rho^{2m-1}. Samples are split into fixed-size chunks, each with its own
/// generator seeded from (seed, chunk index), and chunk sums are combined in
/// order, so results do not depend on the thread count.
MCEstimate mc_integrate(const ModelCurrent& current, const Weight& field, FormKind kind,
                        const std::function<double(double)>& kernel, double phi_max,
                        const McOptions& opts);

/// int_{B_phi(r)} T ^ beta_phi^p
MCEstimate mc_mass(const ModelCurrent& current, const Weight& weight, double r, long n_samples,
                   std::uint64_t seed, int threads = 0);
/// int_{B_phi(t)} dd^c T ^ beta_phi^{p-1}, including a point mass at 0.
MCEstimate mc_ddc_mass(const ModelCurrent& current, const Weight& weight, double t,
                       const McOptions& opts);
/// int_{B_phi(r1, r2)} T ^ alpha_phi^p; r1 = 0 gives the extension by zero.
MCEstimate mc_ring_alpha(const ModelCurrent& current, const Weight& weight, double r1, double r2,
                         const McOptions& opts);

/// Deterministic 64-bit mixer used to derive per-chunk and per-term seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace lelong
